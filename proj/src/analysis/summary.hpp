#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "common/messages.hpp"

namespace digirr::analysis {

// Non-leap 365-day calendar starting Jan 1 00:00 at t = epoch_offset.
struct Calendar {
  double epoch_offset = 0.0;  // s
  static constexpr std::array<int, 12> kMonthDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

  int month_of(double t) const;     // 0..11
  long day_of(double t) const;      // days since epoch
  static double month_seconds(int month) { return kMonthDays[month] * 86400.0; }
};

struct SummaryParams {
  double frost_threshold = 0.0;     // degC
  double fire_jump = 0.2;           // rise between consecutive readings that counts as an event
  double lake_min = 10.0;           // m, lake counts as a water source above this
  double stream_min = 0.05;         // m3/s, stream counts as a water source above this
  double min_full_span_days = 28.0; // shorter inputs are flagged partial
};

struct CellStats {
  SensorKind kind = SensorKind::temperature;
  int month = 0;
  std::size_t count = 0;
  double coverage = 0.0;  // samples / samples expected at the observed rate
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double p10 = 0.0;
  double p90 = 0.0;
};

struct SeasonalSummary {
  std::vector<CellStats> cells;  // sorted by (kind, month)
  std::size_t fire_events = 0;
  std::size_t frost_days = 0;
  // Fraction of observed days on which the lake or the stream was usable.
  std::optional<double> water_availability;
  bool partial = false;
  double span_days = 0.0;

  const CellStats* cell(SensorKind kind, int month) const;
  std::size_t months(SensorKind kind) const;
};

// Linear-interpolation percentile (q in [0,1]) of a sorted sample.
double percentile_sorted(std::span<const double> sorted, double q);

// Throws Error(validation) on empty input.
SeasonalSummary summarize(std::span<const HistoryEntry> history, const Calendar& calendar = {},
                          const SummaryParams& params = {});

void write_summary_csv(std::ostream& out, const SeasonalSummary& s);
void write_summary_meta_csv(std::ostream& out, const SeasonalSummary& s);

}  // namespace digirr::analysis
