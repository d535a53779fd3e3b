#pragma once

#include <cstddef>
#include <functional>

namespace mfbm3d {

/// Runs body(i) for i in [0, count) on up to `jobs` threads (jobs <= 1 runs
/// inline). Work is handed out dynamically, so callers must not depend on
/// which thread runs an index. The first exception thrown by any body is
/// rethrown after all threads have joined.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

/// Resolves a --jobs style request: values < 1 mean hardware concurrency.
int resolve_jobs(int requested) noexcept;

}  // namespace mfbm3d
