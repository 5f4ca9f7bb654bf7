// digirr command-line front end. Talks to the library through the C API only.

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <pthread.h>
#include <unistd.h>

#include "CLI11.hpp"
#include "digirr/digirr.h"

namespace fs = std::filesystem;

namespace {

// Owns a string handed out by the library.
struct LibString {
  char* p = nullptr;
  ~LibString() { digirr_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

int report(digirr_status st) {
  if (st == DIGIRR_OK) return 0;
  std::cerr << "digirr: " << digirr_status_name(st) << " error: " << digirr_last_error() << '\n';
  return st == DIGIRR_E_ARGUMENT ? 2 : 1;
}

// "3600", "90s", "30m", "12h", "7d", "1y" -> seconds (365-day year).
double parse_duration(const std::string& text) {
  if (text.empty()) throw CLI::ValidationError("duration", "empty");
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw CLI::ValidationError("duration", "not a number: " + text);
  }
  const std::string unit = text.substr(used);
  double scale = 1.0;
  if (unit.empty() || unit == "s") scale = 1.0;
  else if (unit == "m") scale = 60.0;
  else if (unit == "h") scale = 3600.0;
  else if (unit == "d") scale = 86400.0;
  else if (unit == "y") scale = 365.0 * 86400.0;
  else throw CLI::ValidationError("duration", "unknown unit '" + unit + "' (use s, m, h, d or y)");
  if (!(v > 0.0)) throw CLI::ValidationError("duration", "must be > 0");
  return v * scale;
}

// history.csv + "summary" -> history.summary.csv in the same directory.
std::string beside(const std::string& input, const std::string& suffix) {
  fs::path p(input);
  return (p.parent_path() / (p.stem().string() + "." + suffix + ".csv")).string();
}

// Help and version exit 0; every other parse failure is a usage error.
int usage_exit(const CLI::App& app, const CLI::ParseError& e) {
  const int code = app.exit(e);
  return code == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"digirr: digital irrigation site simulator, control server and analysis tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(digirr_version()));

  // run
  auto* run = app.add_subcommand("run", "Run a scenario in batch and write its artifacts");
  std::string run_config, run_manifest, run_out, run_duration;
  std::optional<std::uint64_t> run_seed;
  double run_accel = 0.0;
  auto* run_cfg_opt = run->add_option("--config", run_config, "Scenario YAML")->check(CLI::ExistingFile);
  auto* run_man_opt = run->add_option("--from-manifest", run_manifest, "Replay the run recorded in a manifest.json")
                          ->check(CLI::ExistingFile);
  run_cfg_opt->excludes(run_man_opt);
  run->add_option("--seed", run_seed, "Override the scenario seed");
  run->add_option("--duration", run_duration, "Simulated span, e.g. 86400, 12h, 30d, 1y");
  run->add_option("--accel", run_accel, "Simulated seconds per wall second (0 = as fast as possible)")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--out-dir", run_out, "Directory for the run artifacts")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "Run the site live behind the HTTP API");
  std::string serve_config;
  int serve_port = -1;
  double serve_accel = 1.0;
  serve->add_option("--config", serve_config, "Scenario YAML")->required()->check(CLI::ExistingFile);
  serve->add_option("--port", serve_port, "TCP port (0 = any free port); default from the config")
      ->check(CLI::Range(0, 65535));
  serve->add_option("--accel", serve_accel, "Simulated seconds per wall second (0 = as fast as possible)")
      ->check(CLI::NonNegativeNumber);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Offline analysis of recorded history");
  analyze->require_subcommand(1);
  auto* summary = analyze->add_subcommand("summary", "Per-sensor monthly statistics of a history CSV");
  std::string sum_in;
  summary->add_option("history", sum_in, "history.csv from a run")->required()->check(CLI::ExistingFile);
  auto* suit = analyze->add_subcommand("suitability", "Rank crops against a history CSV");
  std::string suit_in, suit_crops;
  suit->add_option("history", suit_in, "history.csv from a run")->required()->check(CLI::ExistingFile);
  suit->add_option("--crops", suit_crops, "Crop rules YAML")->required()->check(CLI::ExistingFile);
  auto* fin = analyze->add_subcommand("finance", "Cumulative cash flow and expenditure comparison");
  std::string fin_cfg, fin_out;
  fin->add_option("--config", fin_cfg, "Finance YAML (defaults when omitted)")->check(CLI::ExistingFile);
  fin->add_option("--out-dir", fin_out, "Output directory (default: beside the config, else current directory)");

  // frame
  auto* frame = app.add_subcommand("frame", "Encode or decode 12-byte field frames");
  frame->require_subcommand(1);
  auto* fdec = frame->add_subcommand("decode", "Describe a frame given as hex");
  std::string fhex;
  fdec->add_option("hex", fhex, "Frame bytes as hex, spaces allowed")->required();
  auto* fenc = frame->add_subcommand("encode", "Build a frame");
  int fnode = 1, fkind = 1, fseq = 0, fflags = 0;
  float fvalue = 0.0f;
  fenc->add_option("--node", fnode)->check(CLI::Range(0, 255));
  fenc->add_option("--kind", fkind)->check(CLI::Range(0, 255));
  fenc->add_option("--seq", fseq)->check(CLI::Range(0, 65535));
  fenc->add_option("--value", fvalue);
  fenc->add_option("--flags", fflags)->check(CLI::Range(0, 255));

  // user
  auto* user = app.add_subcommand("adduser", "Add or replace a user in a credentials file");
  std::string u_file, u_name, u_role = "operator";
  user->add_option("--credentials", u_file, "Credentials file")->required();
  user->add_option("--name", u_name)->required();
  user->add_option("--role", u_role)->check(CLI::IsMember({"operator", "admin"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return usage_exit(app, e);
  }

  try {
    if (*run) {
      if (run_config.empty() && run_manifest.empty()) {
        std::cerr << "digirr run: give --config or --from-manifest\n";
        return 2;
      }
      digirr_run_options o{};
      o.config_path = run_config.empty() ? nullptr : run_config.c_str();
      o.manifest_path = run_manifest.empty() ? nullptr : run_manifest.c_str();
      o.out_dir = run_out.c_str();
      if (run_seed) {
        o.has_seed = 1;
        o.seed = *run_seed;
      }
      if (!run_duration.empty()) {
        o.has_duration = 1;
        o.duration = parse_duration(run_duration);
      }
      o.accel = run_accel;
      LibString result;
      if (int rc = report(digirr_run(&o, &result.p))) return rc;
      std::cout << result.str() << '\n';
      return 0;
    }

    if (*serve) {
      // Handle termination signals on a dedicated thread; every thread the
      // library starts inherits the blocked mask.
      sigset_t set;
      sigemptyset(&set);
      sigaddset(&set, SIGINT);
      sigaddset(&set, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &set, nullptr);

      digirr_service* svc = nullptr;
      if (int rc = report(digirr_service_open(serve_config.c_str(), serve_port, serve_accel, &svc))) return rc;
      LibString warnings;
      if (digirr_service_warnings(svc, &warnings.p) == DIGIRR_OK && !warnings.str().empty())
        std::cerr << warnings.str();
      std::cout << "listening on port " << digirr_service_port(svc) << std::endl;

      std::thread waiter([&] {
        int sig = 0;
        sigwait(&set, &sig);
        digirr_service_stop(svc);
      });
      const digirr_status st = digirr_service_run(svc);
      // Wake the waiter if the service stopped on its own.
      pthread_kill(waiter.native_handle(), SIGTERM);
      waiter.join();
      digirr_service_close(svc);
      std::cout << "stopped" << std::endl;
      return report(st);
    }

    if (*summary) {
      const auto out = beside(sum_in, "summary");
      const auto meta = beside(sum_in, "summary_meta");
      if (int rc = report(digirr_analyze_summary(sum_in.c_str(), out.c_str(), meta.c_str()))) return rc;
      std::cout << out << '\n' << meta << '\n';
      return 0;
    }

    if (*suit) {
      const auto out = beside(suit_in, "suitability");
      if (int rc = report(digirr_analyze_suitability(suit_in.c_str(), suit_crops.c_str(), out.c_str()))) return rc;
      std::cout << out << '\n';
      return 0;
    }

    if (*fin) {
      fs::path dir = fin_out.empty() ? (fin_cfg.empty() ? fs::path(".") : fs::path(fin_cfg).parent_path()) : fs::path(fin_out);
      if (dir.empty()) dir = ".";
      fs::create_directories(dir);
      const std::string stem = fin_cfg.empty() ? "finance" : fs::path(fin_cfg).stem().string();
      const auto cash = (dir / (stem + ".cash_flow.csv")).string();
      const auto exp = (dir / (stem + ".expenditure.csv")).string();
      LibString s;
      if (int rc = report(digirr_analyze_finance(fin_cfg.empty() ? nullptr : fin_cfg.c_str(), cash.c_str(), exp.c_str(),
                                                 &s.p)))
        return rc;
      std::cout << s.str() << '\n' << cash << '\n' << exp << '\n';
      return 0;
    }

    if (*fdec) {
      LibString s;
      if (int rc = report(digirr_frame_describe(fhex.c_str(), &s.p))) return rc;
      std::cout << s.str();
      if (!s.str().empty() && s.str().back() != '\n') std::cout << '\n';
      return 0;
    }

    if (*fenc) {
      LibString s;
      if (int rc = report(digirr_frame_encode(static_cast<std::uint8_t>(fnode), static_cast<std::uint8_t>(fkind),
                                              static_cast<std::uint16_t>(fseq), fvalue,
                                              static_cast<std::uint8_t>(fflags), &s.p)))
        return rc;
      std::cout << s.str() << '\n';
      return 0;
    }

    if (*user) {
      std::string password;
      if (const char* env = std::getenv("DIGIRR_PASSWORD")) {
        password = env;
      } else {
        if (isatty(STDIN_FILENO)) std::cerr << "password: " << std::flush;
        std::getline(std::cin, password);
      }
      return report(digirr_user_add(u_file.c_str(), u_name.c_str(), password.c_str(), u_role.c_str()));
    }
  } catch (const CLI::ParseError& e) {
    return usage_exit(app, e);
  } catch (const std::exception& e) {
    std::cerr << "digirr: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
