#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace mfbm3d::cli {

/// Parses a key = value file with optional [section] headers. Keys are
/// returned as written; section names only group entries and are not part
/// of the key. '#' and ';' start comments. Throws std::invalid_argument on a
/// malformed line and IoError when the file cannot be read.
std::map<std::string, std::string> parse_config_file(const std::filesystem::path& path);
std::map<std::string, std::string> parse_config_text(const std::string& text);

}  // namespace mfbm3d::cli
