#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mmdflow::csv {

/// 17 significant digits, so every double round-trips exactly. Infinities
/// are written as `inf` / `-inf`.
std::string number(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Index of a named column; throws Error if absent.
    std::size_t column(const std::string& name) const;
};

/// Minimal reader for the comma-separated files this library writes
/// (no quoting, no embedded commas).
Table read(const std::filesystem::path& path);

double to_double(const std::string& field, const std::filesystem::path& origin);

} // namespace mmdflow::csv
