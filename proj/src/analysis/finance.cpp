#include "analysis/finance.hpp"

#include <cmath>
#include <ostream>

#include "common/csv.hpp"
#include "common/error.hpp"
#include "common/yaml_util.hpp"

namespace digirr::analysis {

double CashFlowSeries::multiple_of_investment() const { return ccf.back() / -ccf.front(); }

CashFlowSeries cumulative_cash_flow(const CashFlowParams& p) {
  if (!(p.initial_investment > 0.0)) fail(ErrorKind::validation, "initial_investment must be > 0");
  if (!(p.first_year_savings > 0.0)) fail(ErrorKind::validation, "first_year_savings must be > 0");
  if (!(p.growth > 0.0)) fail(ErrorKind::validation, "growth must be > 0");
  if (p.years < 1) fail(ErrorKind::validation, "years must be >= 1");

  CashFlowSeries s;
  s.savings.assign(p.years + 1, 0.0);
  s.ccf.assign(p.years + 1, 0.0);
  s.ccf[0] = -p.initial_investment;
  double sk = p.first_year_savings;
  for (int y = 1; y <= p.years; ++y) {
    s.savings[y] = sk;
    s.ccf[y] = s.ccf[y - 1] + sk;
    sk *= p.growth;
  }
  for (int y = 0; y <= p.years; ++y)
    if (s.ccf[y] >= 0.0) {
      s.break_even_year = y;
      break;
    }
  return s;
}

ExpenditureSeries expenditure_comparison(const ExpenditureParams& p) {
  if (p.months < 1) fail(ErrorKind::validation, "months must be >= 1");
  if (!(p.initial_investment >= 0.0) || !(p.manual_running >= 0.0) || !(p.digital_running >= 0.0))
    fail(ErrorKind::validation, "expenditure inputs must be >= 0");
  ExpenditureSeries s;
  for (int m = 0; m <= p.months; ++m) {
    s.manual.push_back(p.initial_investment + m * p.manual_running);
    s.digital.push_back(p.initial_investment + m * p.digital_running);
  }
  return s;
}

namespace {

FinanceConfig parse_doc(const yaml::Doc& doc) {
  const auto& source = doc.source;
  FinanceConfig cfg;
  if (!doc.root || doc.root.IsNull()) return cfg;
  yaml::check_keys(source, doc.root, {"cash_flow", "expenditure"});
  if (const auto cf = doc.root["cash_flow"]) {
    yaml::check_keys(source, cf, {"initial_investment", "first_year_savings", "growth", "years"});
    auto& c = cfg.cash_flow;
    c.initial_investment = yaml::opt<double>(source, cf, "initial_investment").value_or(c.initial_investment);
    c.first_year_savings = yaml::opt<double>(source, cf, "first_year_savings").value_or(c.first_year_savings);
    c.growth = yaml::opt<double>(source, cf, "growth").value_or(c.growth);
    c.years = yaml::opt<int>(source, cf, "years").value_or(c.years);
  }
  if (const auto ex = doc.root["expenditure"]) {
    yaml::check_keys(source, ex, {"initial_investment", "manual_running", "digital_running", "months"});
    auto& e = cfg.expenditure;
    e.initial_investment = yaml::opt<double>(source, ex, "initial_investment").value_or(e.initial_investment);
    e.manual_running = yaml::opt<double>(source, ex, "manual_running").value_or(e.manual_running);
    e.digital_running = yaml::opt<double>(source, ex, "digital_running").value_or(e.digital_running);
    e.months = yaml::opt<int>(source, ex, "months").value_or(e.months);
  }
  return cfg;
}

}  // namespace

FinanceConfig parse_finance_config(const std::string& text, const std::string& source) {
  return parse_doc(yaml::load_string(text, source));
}

FinanceConfig load_finance_config(const std::filesystem::path& path) { return parse_doc(yaml::load_file(path)); }

void write_cash_flow_csv(std::ostream& out, const CashFlowSeries& s) {
  out << "year,savings,ccf\n";
  for (std::size_t y = 0; y < s.ccf.size(); ++y)
    out << y << ',' << csv::format_double(s.savings[y]) << ',' << csv::format_double(s.ccf[y]) << '\n';
}

void write_expenditure_csv(std::ostream& out, const ExpenditureSeries& s) {
  out << "month,manual,digital\n";
  for (std::size_t m = 0; m < s.manual.size(); ++m)
    out << m << ',' << csv::format_double(s.manual[m]) << ',' << csv::format_double(s.digital[m]) << '\n';
}

}  // namespace digirr::analysis
