#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"

namespace offwhite {

using ordered_json = nlohmann::ordered_json;

/// Serialize with insertion-ordered keys and every float printed at 17
/// significant digits, so identical inputs give byte-identical reports.
std::string dump_deterministic(const ordered_json& j, int indent = 2);

/// Write via a temp file in the same directory, then rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace offwhite
