#include "analysis/history.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "ctrlserver/server.hpp"

namespace digirr::analysis {

std::vector<HistoryEntry> read_history_csv(std::istream& in, const std::string& source) {
  std::vector<HistoryEntry> rows;
  std::string line;
  std::size_t row = 0;
  auto bad = [&](const std::string& what) {
    fail(ErrorKind::parse, source + ": row " + std::to_string(row) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (row == 1) {
      if (line != "time,kind,value,flags") bad("expected header 'time,kind,value,flags'");
      continue;
    }
    if (line.empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 4) bad("expected 4 fields, got " + std::to_string(f.size()));
    HistoryEntry e;
    try {
      e.time = csv::parse_double(f[0]);
      e.value = csv::parse_double(f[2]);
      const auto flags = csv::parse_int(f[3]);
      if (flags < 0 || flags > 255) bad("flags out of range");
      e.flags = static_cast<std::uint8_t>(flags);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::parse) throw;
      bad(err.what());
    }
    const auto k = parse_sensor_kind(f[1]);
    if (!k) bad("unknown sensor kind '" + std::string(f[1]) + "'");
    e.kind = *k;
    rows.push_back(e);
  }
  if (row == 0) fail(ErrorKind::parse, source + ": empty file (no header)");
  return rows;
}

std::vector<HistoryEntry> read_history_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  return read_history_csv(in, path.string());
}

void write_history_csv(std::ostream& out, std::span<const HistoryEntry> rows) {
  std::string buf = ctrlserver::history_csv_header();
  for (const auto& e : rows) ctrlserver::append_history_row(buf, e);
  out << buf;
}

}  // namespace digirr::analysis
