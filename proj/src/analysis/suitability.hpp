#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "analysis/summary.hpp"

namespace digirr::analysis {

// Which number a band reads from the summary.
enum class Statistic { mean, min, max, p10, p90 };

// One parameter band of a crop rule. `parameter` is a sensor key (read via
// `stat` over the monthly cells) or one of the derived metrics frost_days,
// fire_events, water_availability.
struct Band {
  std::string parameter;
  Statistic stat = Statistic::mean;
  double hard_lo = 0.0;
  double ideal_lo = 0.0;
  double ideal_hi = 0.0;
  double hard_hi = 0.0;
  double weight = 0.0;
};

struct CropRule {
  std::string name;
  std::vector<Band> bands;
};

// 1 inside [ideal_lo, ideal_hi], linear down to 0 at the hard limits, 0 beyond.
double band_membership(double x, const Band& band);

// Throws Error(config): weights not summing to 1 (±1e-9), misordered limits.
void validate_rule(const CropRule& rule);

// The value a band is evaluated at; nullopt when the summary lacks it.
//   mean: mean of the monthly means; min/max: extreme monthly min/max;
//   p10/p90: mean of the monthly percentiles.
std::optional<double> band_input(const SeasonalSummary& s, const Band& band);

struct Recommendation {
  std::string crop;
  double score = 0.0;  // [0, 1]
};

// Missing parameters score 0 membership. Ranked by score descending, ties
// alphabetical.
std::vector<Recommendation> rank_crops(const SeasonalSummary& s, const std::vector<CropRule>& rules);
double score_crop(const SeasonalSummary& s, const CropRule& rule);

// YAML: crops: [{name, bands: [{parameter, stat?, hard_lo, ideal_lo, ideal_hi, hard_hi, weight}]}]
std::vector<CropRule> load_crop_rules(const std::filesystem::path& path);
std::vector<CropRule> parse_crop_rules(const std::string& yaml_text, const std::string& source = "<string>");

void write_recommendations_csv(std::ostream& out, const std::vector<Recommendation>& recs);

}  // namespace digirr::analysis
