#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <sstream>

#include "analysis/finance.hpp"
#include "analysis/history.hpp"
#include "analysis/suitability.hpp"
#include "analysis/summary.hpp"
#include "common/error.hpp"

using namespace digirr;
using namespace digirr::analysis;

namespace {

constexpr double kDay = 86400.0;

// Hourly readings for `days` days: temperature a sine around 20, lake fixed.
std::vector<HistoryEntry> synthetic(int days) {
  std::vector<HistoryEntry> h;
  for (int i = 0; i < days * 24; ++i) {
    const double t = i * 3600.0;
    h.push_back({t, SensorKind::temperature, 20.0 + 10.0 * std::sin(i * 0.1), 0});
    h.push_back({t, SensorKind::lake_level, i < 24 * 10 ? 5.0 : 40.0, 0});
  }
  return h;
}

}  // namespace

TEST_CASE("linear-interpolation percentiles") {
  // numpy.percentile([1..10], [10, 90]) -> 1.9, 9.1
  const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(percentile_sorted(v, 0.10) == doctest::Approx(1.9));
  CHECK(percentile_sorted(v, 0.90) == doctest::Approx(9.1));
  CHECK(percentile_sorted(v, 0.0) == 1);
  CHECK(percentile_sorted(v, 1.0) == 10);
  const std::vector<double> one{4.0};
  CHECK(percentile_sorted(one, 0.9) == 4.0);
}

TEST_CASE("calendar months") {
  const Calendar c;
  CHECK(c.month_of(0) == 0);
  CHECK(c.month_of(31 * kDay - 1) == 0);
  CHECK(c.month_of(31 * kDay) == 1);
  CHECK(c.month_of(364 * kDay) == 11);
  CHECK(c.month_of(365 * kDay) == 0);
  CHECK(c.day_of(2.5 * kDay) == 2);
}

TEST_CASE("summary is invariant under row order") {
  auto h = synthetic(60);
  const auto a = summarize(h);
  std::mt19937 rng(3);
  std::shuffle(h.begin(), h.end(), rng);
  const auto b = summarize(h);
  std::ostringstream sa, sb;
  write_summary_csv(sa, a);
  write_summary_csv(sb, b);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("cells, coverage and derived metrics") {
  auto h = synthetic(60);
  // Knock out ten days of temperature in February.
  std::erase_if(h, [](const HistoryEntry& e) {
    return e.kind == SensorKind::temperature && e.time >= 35 * kDay && e.time < 45 * kDay;
  });
  h.push_back({50 * kDay + 10, SensorKind::temperature, -2.0, 0});
  h.push_back({0, SensorKind::fire_smoke, 0.0, 0});
  h.push_back({10, SensorKind::fire_smoke, 0.5, 0});
  h.push_back({20, SensorKind::fire_smoke, 0.1, 0});
  const auto s = summarize(h);
  CHECK_FALSE(s.partial);
  // 60 days: all of January and February plus March 1.
  CHECK(s.months(SensorKind::temperature) == 3);
  const auto* jan = s.cell(SensorKind::temperature, 0);
  const auto* feb = s.cell(SensorKind::temperature, 1);
  REQUIRE(jan);
  REQUIRE(feb);
  CHECK(jan->count == 31 * 24);
  CHECK(jan->coverage == doctest::Approx(1.0));
  // 18 of February's 28 days observed, plus the one frost reading.
  CHECK(feb->coverage == doctest::Approx((18.0 * 24 + 1) / (28.0 * 24)).epsilon(1e-12));
  CHECK(feb->min == -2.0);
  CHECK(s.frost_days == 1);
  CHECK(s.fire_events == 1);
  REQUIRE(s.water_availability);
  CHECK(*s.water_availability == doctest::Approx(50.0 / 60.0));
}

TEST_CASE("short inputs are flagged partial") {
  const auto s = summarize(synthetic(3));
  CHECK(s.partial);
  std::ostringstream meta;
  write_summary_meta_csv(meta, s);
  CHECK(meta.str().find("partial,true") != std::string::npos);
  CHECK_THROWS_AS(summarize(std::vector<HistoryEntry>{}), Error);
}

TEST_CASE("history csv round-trips and names the bad row") {
  const auto h = synthetic(1);
  std::stringstream ss;
  write_history_csv(ss, h);
  const auto back = read_history_csv(ss, "h.csv");
  CHECK(back == h);

  std::istringstream bad("time,kind,value,flags\n0,temperature,20,0\n60,temperature,abc,0\n");
  CHECK_THROWS_WITH_AS(read_history_csv(bad, "h.csv"), doctest::Contains("h.csv: row 3"), Error);
  std::istringstream kind("time,kind,value,flags\n0,plasma,20,0\n");
  CHECK_THROWS_WITH_AS(read_history_csv(kind, "h.csv"), doctest::Contains("row 2"), Error);
  std::istringstream empty("");
  CHECK_THROWS_AS(read_history_csv(empty, "h.csv"), Error);
}

TEST_CASE("band membership is trapezoidal") {
  Band b{"temperature", Statistic::mean, 0, 10, 20, 40, 1.0};
  CHECK(band_membership(15, b) == 1.0);
  CHECK(band_membership(5, b) == doctest::Approx(0.5));
  CHECK(band_membership(30, b) == doctest::Approx(0.5));
  CHECK(band_membership(-1, b) == 0.0);
  CHECK(band_membership(41, b) == 0.0);
}

TEST_CASE("crop rules validate and rank") {
  CropRule bad{"x", {{"temperature", Statistic::mean, 0, 10, 20, 40, 0.5}}};
  CHECK_THROWS_AS(validate_rule(bad), Error);
  CropRule misordered{"y", {{"temperature", Statistic::mean, 0, 30, 20, 40, 1.0}}};
  CHECK_THROWS_AS(validate_rule(misordered), Error);

  const auto s = summarize(synthetic(60));
  const std::vector<CropRule> rules{
      {"warm", {{"temperature", Statistic::mean, 10, 15, 25, 35, 1.0}}},
      {"cold", {{"temperature", Statistic::mean, -10, 0, 5, 15, 1.0}}},
      {"wet", {{"water_availability", Statistic::mean, 0, 0.9, 1.0, 1.0, 1.0}}},
      {"aaa_missing", {{"humidity", Statistic::mean, 0, 0.3, 0.7, 1.0, 1.0}}},
  };
  const auto ranked = rank_crops(s, rules);
  REQUIRE(ranked.size() == 4);
  CHECK(ranked[0].crop == "warm");
  CHECK(ranked[0].score == doctest::Approx(1.0));
  CHECK(ranked.back().score == 0.0);
  // Missing and zero-scored crops tie and sort by name.
  CHECK(ranked[2].crop == "aaa_missing");
}

TEST_CASE("crop rule yaml errors carry the line") {
  const std::string text =
      "crops:\n"
      "  - name: rice\n"
      "    bands:\n"
      "      - {parameter: temperature, hard_lo: 0, ideal_lo: 10, ideal_hi: 20, hard_hi: oops, weight: 1}\n";
  CHECK_THROWS_WITH_AS(parse_crop_rules(text, "crops.yaml"), doctest::Contains("crops.yaml:4"), Error);
  const auto ok = parse_crop_rules(
      "crops:\n  - name: rice\n    bands:\n      - {parameter: temperature, stat: p90, hard_lo: 0, ideal_lo: 10, "
      "ideal_hi: 20, hard_hi: 30, weight: 1}\n");
  REQUIRE(ok.size() == 1);
  CHECK(ok[0].bands[0].stat == Statistic::p90);
}

TEST_CASE("cumulative cash flow matches the closed form") {
  const auto s = cumulative_cash_flow({});
  // Frozen from an independent evaluation of -I0 + S1 (g^y - 1) / (g - 1).
  const std::vector<double> expected{-10000, -5000, 525, 6630.125, 13376.288125, 20830.798378125,
                                     29068.032207828124, 38170.175589650076, 48228.04402656334,
                                     59341.98864935248, 71622.89745753449};
  REQUIRE(s.ccf.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) CHECK(s.ccf[i] == doctest::Approx(expected[i]).epsilon(1e-12));
  CHECK(s.break_even_year == 2);
  CHECK(s.multiple_of_investment() == doctest::Approx(7.1622897));
  CashFlowParams never;
  never.first_year_savings = 100;
  never.growth = 1.0;
  never.years = 5;
  CHECK(cumulative_cash_flow(never).break_even_year == -1);
  CashFlowParams bad;
  bad.growth = 0;
  CHECK_THROWS_AS(cumulative_cash_flow(bad), Error);
}

TEST_CASE("expenditure over a cultivation period") {
  const auto e = expenditure_comparison({});
  REQUIRE(e.manual.size() == 7);
  CHECK(e.manual[0] == 10000);
  CHECK(e.manual[6] == 12400);
  CHECK(e.digital[6] == 10900);
  std::ostringstream out;
  write_expenditure_csv(out, e);
  CHECK(out.str().rfind("month,manual,digital\n0,10000,10000\n", 0) == 0);
}

TEST_CASE("finance yaml overrides only what it names") {
  const auto cfg = parse_finance_config("cash_flow:\n  years: 3\nexpenditure:\n  months: 2\n");
  CHECK(cfg.cash_flow.years == 3);
  CHECK(cfg.cash_flow.growth == 1.105);
  CHECK(cfg.expenditure.months == 2);
  CHECK_THROWS_WITH_AS(parse_finance_config("cash_flow:\n  yeers: 3\n", "f.yaml"), doctest::Contains("f.yaml:2"),
                       Error);
}
