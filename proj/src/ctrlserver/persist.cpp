#include "ctrlserver/persist.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "common/error.hpp"

namespace digirr::ctrlserver {
namespace fs = std::filesystem;

EventLog::EventLog(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) fail(ErrorKind::io, "cannot create state dir " + dir_.string() + ": " + ec.message());
}

EventLog::~EventLog() {
  if (out_) std::fclose(out_);
}

void EventLog::open_for_append() {
  if (out_) return;
  out_ = std::fopen((dir_ / "events.jsonl").c_str(), "ab");
  if (!out_) fail(ErrorKind::io, "cannot open " + (dir_ / "events.jsonl").string());
}

EventLog::Recovered EventLog::recover() {
  Recovered r;
  if (std::ifstream in(dir_ / "state.json"); in) {
    std::stringstream ss;
    ss << in.rdbuf();
    r.state = ss.str();
    if (!nlohmann::json::accept(*r.state)) fail(ErrorKind::parse, "state.json is corrupt");
  }

  const fs::path log = dir_ / "events.jsonl";
  std::ifstream in(log, std::ios::binary);
  if (in) {
    std::string line;
    std::uintmax_t good_bytes = 0;
    std::uintmax_t total = fs::file_size(log);
    while (std::getline(in, line)) {
      const bool terminated = !in.eof();
      if (!terminated || !nlohmann::json::accept(line)) {
        r.warnings.push_back("event log: dropped invalid record at byte " + std::to_string(good_bytes) +
                             "; log truncated to " + std::to_string(r.records.size()) + " records");
        break;
      }
      r.records.push_back(line);
      good_bytes += line.size() + 1;
    }
    in.close();
    if (good_bytes < total) fs::resize_file(log, good_bytes);
  }
  since_compaction_ = r.records.size();
  return r;
}

void EventLog::append(const std::string& record) {
  open_for_append();
  std::fwrite(record.data(), 1, record.size(), out_);
  std::fputc('\n', out_);
  ++since_compaction_;
}

void EventLog::flush() {
  if (out_) std::fflush(out_);
}

void EventLog::compact(const std::string& state) {
  const fs::path tmp = dir_ / "state.json.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) fail(ErrorKind::io, "cannot write " + tmp.string());
    out << state;
    out.flush();
    if (!out) fail(ErrorKind::io, "short write on " + tmp.string());
  }
  fs::rename(tmp, dir_ / "state.json");
  if (out_) {
    std::fclose(out_);
    out_ = nullptr;
  }
  // Records carry a revision and the base records the last one it folded
  // in, so leftovers from a crash between these steps are skipped on replay.
  if (fs::exists(dir_ / "events.jsonl")) fs::resize_file(dir_ / "events.jsonl", 0);
  since_compaction_ = 0;
}

}  // namespace digirr::ctrlserver
