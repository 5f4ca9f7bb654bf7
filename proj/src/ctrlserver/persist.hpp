#pragma once

#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace digirr::ctrlserver {

// Append-only JSON-lines log next to a compacted state file:
//   <dir>/events.jsonl   one record per line
//   <dir>/state.json     latest compaction, replaced atomically
class EventLog {
public:
  explicit EventLog(std::filesystem::path dir);
  ~EventLog();
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  struct Recovered {
    std::optional<std::string> state;
    std::vector<std::string> records;
    std::vector<std::string> warnings;
  };

  // Reads state + log. A record that does not parse, and everything after
  // it, is cut off the file and reported as a warning.
  Recovered recover();

  void append(const std::string& record);
  void flush();
  // Writes `state` as the new base and empties the log.
  void compact(const std::string& state);

  std::size_t records_since_compaction() const { return since_compaction_; }
  const std::filesystem::path& dir() const { return dir_; }

private:
  void open_for_append();

  std::filesystem::path dir_;
  std::FILE* out_ = nullptr;
  std::size_t since_compaction_ = 0;
};

}  // namespace digirr::ctrlserver
