#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace digirr::analysis {

// Defaults are a calibration: payback inside 2 years and roughly 7x the
// investment by year 10. Savings grow geometrically, S_k = S1 * g^(k-1).
struct CashFlowParams {
  double initial_investment = 10000.0;  // I0
  double first_year_savings = 5000.0;   // S1
  double growth = 1.105;                // g
  int years = 10;
};

struct CashFlowSeries {
  std::vector<double> savings;  // [0] = 0, [k] = S_k
  std::vector<double> ccf;      // [0] = -I0, [y] = ccf[y-1] + S_y
  int break_even_year = -1;     // first y with ccf[y] >= 0, -1 if none

  double multiple_of_investment() const;  // ccf.back() / I0
};

// Throws Error(validation) unless I0, S1, g > 0 and years >= 1.
CashFlowSeries cumulative_cash_flow(const CashFlowParams& p);

// Cumulative spend over one cultivation period, per 10 hectares.
struct ExpenditureParams {
  double initial_investment = 10000.0;  // shared by both schemes
  double manual_running = 400.0;        // per month
  double digital_running = 150.0;       // per month
  int months = 6;
};

struct ExpenditureSeries {
  std::vector<double> manual;   // [m] for m = 0..months
  std::vector<double> digital;
};

ExpenditureSeries expenditure_comparison(const ExpenditureParams& p);

struct FinanceConfig {
  CashFlowParams cash_flow;
  ExpenditureParams expenditure;
};

// YAML with optional `cash_flow:` and `expenditure:` mappings; absent keys
// keep their defaults.
FinanceConfig load_finance_config(const std::filesystem::path& path);
FinanceConfig parse_finance_config(const std::string& yaml_text, const std::string& source = "<string>");

void write_cash_flow_csv(std::ostream& out, const CashFlowSeries& s);
void write_expenditure_csv(std::ostream& out, const ExpenditureSeries& s);

}  // namespace digirr::analysis
