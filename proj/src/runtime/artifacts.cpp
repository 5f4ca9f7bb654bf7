#include "runtime/artifacts.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "common/digest.hpp"
#include "common/error.hpp"
#include "ctrlserver/messages.hpp"
#include "runtime/scenario.hpp"

#ifndef DIGIRR_VERSION
#define DIGIRR_VERSION "0.0.0"
#endif

namespace digirr::runtime {
namespace fs = std::filesystem;
using ctrlserver::json;

namespace {

constexpr const char* kPartial = ".partial";

// Output files under construction; removed unless committed.
class Staging {
public:
  explicit Staging(fs::path dir) : dir_(std::move(dir)) {}
  ~Staging() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& n : names_) fs::remove(tmp(n), ec);
  }

  fs::path open(const std::string& name) {
    names_.push_back(name);
    return tmp(name);
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(open(name), std::ios::binary);
    out << content;
    if (!out) fail(ErrorKind::io, "cannot write " + (dir_ / name).string());
  }

  std::map<std::string, std::string> commit() {
    std::map<std::string, std::string> hashes;
    for (const auto& n : names_) {
      fs::rename(tmp(n), dir_ / n);
      hashes[n] = sha256_file_hex(dir_ / n);
    }
    committed_ = true;
    return hashes;
  }

private:
  fs::path tmp(const std::string& name) const { return dir_ / (name + kPartial); }
  fs::path dir_;
  std::vector<std::string> names_;
  bool committed_ = false;
};

// Buffered CSV stream; the history of a year-long run is large.
class CsvStream {
public:
  CsvStream(const fs::path& path, const std::string& header) : out_(path, std::ios::binary) {
    if (!out_) fail(ErrorKind::io, "cannot write " + path.string());
    buf_ = header;
  }
  std::string& buf() { return buf_; }
  void maybe_flush() {
    if (buf_.size() >= (1u << 20)) flush();
  }
  void close() {
    flush();
    out_.close();
    if (!out_) fail(ErrorKind::io, "write failed");
  }

private:
  void flush() {
    out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
    buf_.clear();
  }
  std::ofstream out_;
  std::string buf_;
};

}  // namespace

RunResult run_to_directory(const RunRequest& req, const std::function<bool()>& cancel) {
  const double duration = req.duration.value_or(req.config.duration);
  if (!(duration > 0.0)) fail(ErrorKind::config, "duration must be > 0");
  if (!(req.accel >= 0.0)) fail(ErrorKind::config, "accel must be >= 0");

  ScenarioOptions opts;
  opts.seed = req.seed;
  Scenario sc(req.config, std::move(opts));

  std::error_code ec;
  fs::create_directories(req.out_dir, ec);
  if (ec) fail(ErrorKind::io, "cannot create " + req.out_dir.string() + ": " + ec.message());

  Staging stage(req.out_dir);
  CsvStream history(stage.open("history.csv"), ctrlserver::history_csv_header());
  CsvStream actuation(stage.open("actuation_log.csv"), actuation_csv_header());
  sc.set_history_sink([&](const HistoryEntry& e) {
    ctrlserver::append_history_row(history.buf(), e);
    history.maybe_flush();
  });
  sc.set_actuation_sink([&](const fieldctl::ActuationLogEntry& e) {
    append_actuation_row(actuation.buf(), e);
    actuation.maybe_flush();
  });

  const auto wall0 = std::chrono::steady_clock::now();
  const double t0 = sc.time();
  const double t_end = t0 + duration;
  while (sc.time() < t_end) {
    if (cancel && cancel()) fail(ErrorKind::io, "run cancelled");
    sc.step();
    if (req.accel > 0.0) {
      const auto due = wall0 + std::chrono::duration<double>((sc.time() - t0) / req.accel);
      std::this_thread::sleep_until(due);
    }
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  history.close();
  actuation.close();

  auto& srv = sc.server();
  stage.write("status_table.json", ctrlserver::encode_status_table(srv.status_rows()).dump(2) + "\n");
  stage.write("control_table.json", ctrlserver::encode_control_table(srv.control_rows()).dump(2) + "\n");
  json ledger = json::array();
  for (const auto& c : srv.ledger()) ledger.push_back(ctrlserver::encode(c));
  stage.write("commands.json", ledger.dump(2) + "\n");

  RunResult result;
  result.seed = sc.seed();
  result.ticks = sc.ticks();
  result.wall_seconds = wall;
  result.warnings = sc.warnings();
  result.artifacts = stage.commit();

  json manifest = {
      {"tool", "digirr"},
      {"version", DIGIRR_VERSION},
      {"seed", result.seed},
      {"duration", duration},
      {"dt", req.config.dt},
      {"accel", req.accel},
      {"ticks", result.ticks},
      {"wall_seconds", wall},
      {"config_source", req.config.source},
      {"config_sha256", sha256_hex(req.config.text)},
      {"config_text", req.config.text},
      {"artifacts", result.artifacts},
      {"warnings", result.warnings},
  };
  result.manifest = req.out_dir / "manifest.json";
  const auto tmp = req.out_dir / (std::string("manifest.json") + kPartial);
  {
    std::ofstream out(tmp, std::ios::binary);
    out << manifest.dump(2) << '\n';
    if (!out) fail(ErrorKind::io, "cannot write " + result.manifest.string());
  }
  fs::rename(tmp, result.manifest);
  return result;
}

RunRequest request_from_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::config, path.string() + ": cannot open manifest");
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    fail(ErrorKind::config, path.string() + ": not a valid manifest: " + e.what());
  }
  RunRequest req;
  try {
    const auto text = m.at("config_text").get<std::string>();
    const auto expected = m.at("config_sha256").get<std::string>();
    if (sha256_hex(text) != expected)
      fail(ErrorKind::config, path.string() + ": embedded config does not match config_sha256");
    req.config = parse_scenario(text, m.value("config_source", std::string("<manifest>")));
    req.seed = m.at("seed").get<std::uint64_t>();
    req.duration = m.at("duration").get<double>();
    req.accel = m.value("accel", 0.0);
  } catch (const json::exception& e) {
    fail(ErrorKind::config, path.string() + ": incomplete manifest: " + e.what());
  }
  return req;
}

}  // namespace digirr::runtime
