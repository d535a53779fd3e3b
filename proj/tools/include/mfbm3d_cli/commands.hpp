#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mfbm3d::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitBadArgs = 1,
  kExitIo = 2,
  kExitNumerical = 3,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. Normal output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Default asset directory: $MFBM3D_ASSET_DIR, else ~/.cache/mfbm3d/assets.
std::string default_asset_dir();

}  // namespace mfbm3d::cli
