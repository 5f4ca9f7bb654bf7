#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "common/messages.hpp"

namespace digirr::analysis {

// History CSV: header `time,kind,value,flags`, one accepted reading per row.
// Errors name the offending row (1-based, header is row 1).
std::vector<HistoryEntry> read_history_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<HistoryEntry> read_history_csv(const std::filesystem::path& path);

void write_history_csv(std::ostream& out, std::span<const HistoryEntry> rows);

}  // namespace digirr::analysis
