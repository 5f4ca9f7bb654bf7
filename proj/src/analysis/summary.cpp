#include "analysis/summary.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include "common/csv.hpp"
#include "common/error.hpp"

namespace digirr::analysis {
namespace {

constexpr double kYear = 365.0 * 86400.0;

double month_start(int month) {
  double s = 0.0;
  for (int m = 0; m < month; ++m) s += Calendar::month_seconds(m);
  return s;
}

// Seconds of [t0, t1) falling in each calendar month.
std::array<double, 12> month_overlap(double t0, double t1, const Calendar& cal) {
  std::array<double, 12> out{};
  double t = t0;
  while (t < t1) {
    const double rel = t - cal.epoch_offset;
    const double year_start = std::floor(rel / kYear) * kYear;
    const int m = cal.month_of(t);
    const double end = cal.epoch_offset + year_start + month_start(m) + Calendar::month_seconds(m);
    const double stop = std::min(end, t1);
    out[m] += stop - t;
    t = stop > t ? stop : std::nextafter(t, INFINITY);
  }
  return out;
}

}  // namespace

int Calendar::month_of(double t) const {
  double r = std::fmod(t - epoch_offset, kYear);
  if (r < 0) r += kYear;
  const double day = std::floor(r / 86400.0);
  int acc = 0;
  for (int m = 0; m < 12; ++m) {
    acc += kMonthDays[m];
    if (day < acc) return m;
  }
  return 11;
}

long Calendar::day_of(double t) const { return static_cast<long>(std::floor((t - epoch_offset) / 86400.0)); }

const CellStats* SeasonalSummary::cell(SensorKind kind, int month) const {
  for (const auto& c : cells)
    if (c.kind == kind && c.month == month) return &c;
  return nullptr;
}

std::size_t SeasonalSummary::months(SensorKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [kind](const CellStats& c) { return c.kind == kind; }));
}

double percentile_sorted(std::span<const double> s, double q) {
  if (s.empty()) return std::nan("");
  const double pos = q * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (pos - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

SeasonalSummary summarize(std::span<const HistoryEntry> history, const Calendar& cal, const SummaryParams& p) {
  if (history.empty()) fail(ErrorKind::validation, "summary needs at least one history row");

  std::vector<HistoryEntry> rows(history.begin(), history.end());
  std::sort(rows.begin(), rows.end(), [](const HistoryEntry& a, const HistoryEntry& b) {
    return std::tie(a.time, a.kind, a.value, a.flags) < std::tie(b.time, b.kind, b.value, b.flags);
  });

  SeasonalSummary out;
  const double t_first = rows.front().time;
  const double t_last = rows.back().time;
  out.span_days = (t_last - t_first) / 86400.0;
  out.partial = out.span_days < p.min_full_span_days;

  std::map<SensorKind, std::vector<double>> times;
  std::map<std::pair<SensorKind, int>, std::vector<double>> values;
  for (const auto& e : rows) {
    times[e.kind].push_back(e.time);
    if (std::isfinite(e.value)) values[{e.kind, cal.month_of(e.time)}].push_back(e.value);
  }

  std::map<SensorKind, std::array<double, 12>> expected;
  for (auto& [kind, ts] : times) {
    std::vector<double> gaps;
    for (std::size_t i = 1; i < ts.size(); ++i)
      if (ts[i] > ts[i - 1]) gaps.push_back(ts[i] - ts[i - 1]);
    std::array<double, 12> e{};
    if (!gaps.empty()) {
      std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
      const double period = gaps[gaps.size() / 2];
      const auto overlap = month_overlap(ts.front(), ts.back() + period, cal);
      for (int m = 0; m < 12; ++m) e[m] = overlap[m] / period;
    }
    expected[kind] = e;
  }

  for (auto& [key, v] : values) {
    std::sort(v.begin(), v.end());
    CellStats c;
    c.kind = key.first;
    c.month = key.second;
    c.count = v.size();
    c.min = v.front();
    c.max = v.back();
    double sum = 0.0;
    for (double x : v) sum += x;
    c.mean = sum / static_cast<double>(v.size());
    c.p10 = percentile_sorted(v, 0.10);
    c.p90 = percentile_sorted(v, 0.90);
    const double exp = expected[c.kind][c.month];
    c.coverage = exp > 0.0 ? std::min(1.0, static_cast<double>(c.count) / exp) : 1.0;
    out.cells.push_back(c);
  }

  std::set<long> frost;
  std::optional<double> prev_fire;
  std::map<long, std::pair<double, int>> lake_day, stream_day;
  for (const auto& e : rows) {
    switch (e.kind) {
      case SensorKind::temperature:
        if (e.value < p.frost_threshold) frost.insert(cal.day_of(e.time));
        break;
      case SensorKind::fire_smoke:
        if (prev_fire && e.value - *prev_fire > p.fire_jump) ++out.fire_events;
        prev_fire = e.value;
        break;
      case SensorKind::lake_level: {
        auto& d = lake_day[cal.day_of(e.time)];
        d.first += e.value;
        ++d.second;
        break;
      }
      case SensorKind::stream_flow: {
        auto& d = stream_day[cal.day_of(e.time)];
        d.first += e.value;
        ++d.second;
        break;
      }
      default: break;
    }
  }
  out.frost_days = frost.size();

  std::set<long> days;
  for (const auto& [d, v] : lake_day) days.insert(d);
  for (const auto& [d, v] : stream_day) days.insert(d);
  if (!days.empty()) {
    std::size_t wet = 0;
    for (long d : days) {
      bool ok = false;
      if (auto it = lake_day.find(d); it != lake_day.end())
        ok = ok || it->second.first / it->second.second > p.lake_min;
      if (auto it = stream_day.find(d); it != stream_day.end())
        ok = ok || it->second.first / it->second.second > p.stream_min;
      wet += ok;
    }
    out.water_availability = static_cast<double>(wet) / static_cast<double>(days.size());
  }
  return out;
}

void write_summary_csv(std::ostream& out, const SeasonalSummary& s) {
  std::string buf = "parameter,month,count,coverage,min,max,mean,p10,p90\n";
  for (const auto& c : s.cells) {
    buf += key(c.kind);
    buf += ',';
    csv::append_int(buf, c.month + 1);
    buf += ',';
    csv::append_int(buf, static_cast<std::int64_t>(c.count));
    for (double v : {c.coverage, c.min, c.max, c.mean, c.p10, c.p90}) {
      buf += ',';
      csv::append_double(buf, v);
    }
    buf += '\n';
  }
  out << buf;
}

void write_summary_meta_csv(std::ostream& out, const SeasonalSummary& s) {
  out << "metric,value\n";
  out << "span_days," << csv::format_double(s.span_days) << '\n';
  out << "partial," << (s.partial ? "true" : "false") << '\n';
  out << "fire_events," << s.fire_events << '\n';
  out << "frost_days," << s.frost_days << '\n';
  out << "water_availability,"
      << (s.water_availability ? csv::format_double(*s.water_availability) : std::string("nan")) << '\n';
}

}  // namespace digirr::analysis
