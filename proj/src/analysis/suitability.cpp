#include "analysis/suitability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/yaml_util.hpp"

namespace digirr::analysis {
namespace {

std::optional<Statistic> parse_stat(const std::string& s) {
  if (s == "mean") return Statistic::mean;
  if (s == "min") return Statistic::min;
  if (s == "max") return Statistic::max;
  if (s == "p10") return Statistic::p10;
  if (s == "p90") return Statistic::p90;
  return std::nullopt;
}

bool derived_metric(const std::string& p) {
  return p == "frost_days" || p == "fire_events" || p == "water_availability";
}

std::vector<CropRule> parse_doc(const yaml::Doc& doc) {
  const auto& src = doc.source;
  yaml::check_keys(src, doc.root, {"crops"});
  const YAML::Node crops = doc.root["crops"];
  if (!crops || !crops.IsSequence() || crops.size() == 0)
    yaml::fail_at(src, doc.root, "'crops' must be a non-empty list");
  std::vector<CropRule> rules;
  for (const auto& c : crops) {
    yaml::check_keys(src, c, {"name", "bands"});
    CropRule rule;
    rule.name = yaml::req<std::string>(src, c, "name");
    const YAML::Node bands = c["bands"];
    if (!bands || !bands.IsSequence() || bands.size() == 0)
      yaml::fail_at(src, c, "crop '" + rule.name + "' needs a non-empty 'bands' list");
    for (const auto& b : bands) {
      yaml::check_keys(src, b, {"parameter", "stat", "hard_lo", "ideal_lo", "ideal_hi", "hard_hi", "weight"});
      Band band;
      band.parameter = yaml::req<std::string>(src, b, "parameter");
      if (!derived_metric(band.parameter) && !parse_sensor_kind(band.parameter))
        yaml::fail_at(src, b["parameter"], "unknown parameter '" + band.parameter + "'");
      if (auto st = yaml::opt<std::string>(src, b, "stat")) {
        auto parsed = parse_stat(*st);
        if (!parsed) yaml::fail_at(src, b["stat"], "stat must be one of mean, min, max, p10, p90");
        band.stat = *parsed;
      }
      band.hard_lo = yaml::req<double>(src, b, "hard_lo");
      band.ideal_lo = yaml::req<double>(src, b, "ideal_lo");
      band.ideal_hi = yaml::req<double>(src, b, "ideal_hi");
      band.hard_hi = yaml::req<double>(src, b, "hard_hi");
      band.weight = yaml::req<double>(src, b, "weight");
      rule.bands.push_back(band);
    }
    try {
      validate_rule(rule);
    } catch (const Error& e) {
      yaml::fail_at(src, c, e.what());
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

}  // namespace

double band_membership(double x, const Band& b) {
  if (std::isnan(x)) return 0.0;
  if (x >= b.ideal_lo && x <= b.ideal_hi) return 1.0;
  if (x < b.ideal_lo) {
    if (x <= b.hard_lo || b.ideal_lo <= b.hard_lo) return 0.0;
    return (x - b.hard_lo) / (b.ideal_lo - b.hard_lo);
  }
  if (x >= b.hard_hi || b.hard_hi <= b.ideal_hi) return 0.0;
  return (b.hard_hi - x) / (b.hard_hi - b.ideal_hi);
}

void validate_rule(const CropRule& rule) {
  double sum = 0.0;
  for (const auto& b : rule.bands) {
    if (!(b.hard_lo <= b.ideal_lo && b.ideal_lo <= b.ideal_hi && b.ideal_hi <= b.hard_hi))
      fail(ErrorKind::config, "crop '" + rule.name + "', parameter '" + b.parameter +
                                  "': need hard_lo <= ideal_lo <= ideal_hi <= hard_hi");
    if (!(b.weight >= 0.0)) fail(ErrorKind::config, "crop '" + rule.name + "': negative weight");
    sum += b.weight;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    fail(ErrorKind::config, "crop '" + rule.name + "': weights sum to " + csv::format_double(sum) + ", not 1");
}

std::optional<double> band_input(const SeasonalSummary& s, const Band& b) {
  if (b.parameter == "frost_days") return static_cast<double>(s.frost_days);
  if (b.parameter == "fire_events") return static_cast<double>(s.fire_events);
  if (b.parameter == "water_availability") return s.water_availability;
  const auto kind = parse_sensor_kind(b.parameter);
  if (!kind) return std::nullopt;
  double acc = 0.0;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  std::size_t n = 0;
  for (const auto& c : s.cells) {
    if (c.kind != *kind) continue;
    ++n;
    lo = std::min(lo, c.min);
    hi = std::max(hi, c.max);
    acc += b.stat == Statistic::p10 ? c.p10 : b.stat == Statistic::p90 ? c.p90 : c.mean;
  }
  if (n == 0) return std::nullopt;
  if (b.stat == Statistic::min) return lo;
  if (b.stat == Statistic::max) return hi;
  return acc / static_cast<double>(n);
}

double score_crop(const SeasonalSummary& s, const CropRule& rule) {
  double score = 0.0;
  for (const auto& b : rule.bands) {
    const auto x = band_input(s, b);
    if (x) score += b.weight * band_membership(*x, b);
  }
  return std::clamp(score, 0.0, 1.0);
}

std::vector<Recommendation> rank_crops(const SeasonalSummary& s, const std::vector<CropRule>& rules) {
  std::vector<Recommendation> out;
  for (const auto& r : rules) {
    validate_rule(r);
    out.push_back({r.name, score_crop(s, r)});
  }
  std::sort(out.begin(), out.end(), [](const Recommendation& a, const Recommendation& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.crop < b.crop;
  });
  return out;
}

std::vector<CropRule> load_crop_rules(const std::filesystem::path& path) { return parse_doc(yaml::load_file(path)); }

std::vector<CropRule> parse_crop_rules(const std::string& text, const std::string& source) {
  return parse_doc(yaml::load_string(text, source));
}

void write_recommendations_csv(std::ostream& out, const std::vector<Recommendation>& recs) {
  out << "rank,crop,score\n";
  int rank = 0;
  for (const auto& r : recs) out << ++rank << ',' << r.crop << ',' << csv::format_double(r.score) << '\n';
}

}  // namespace digirr::analysis
