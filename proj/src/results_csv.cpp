#include "whmc/results_csv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "whmc/error.hpp"

namespace whmc::io {

std::string format_number(double value) {
  if (value == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

const std::vector<std::string>& run_columns() {
  static const std::vector<std::string> cols{
      "t", "x", "x_dot", "theta", "theta_dot", "machine_force", "applied_force",
      "human_action", "uplink_delivered", "downlink_delivered", "humanlink_delivered",
      "step_cost", "accumulated_cost"};
  return cols;
}

const std::vector<std::string>& comparison_leading_columns() {
  static const std::vector<std::string> cols{"t", "variant", "seeds", "mean_accumulated_cost",
                                             "std_accumulated_cost"};
  return cols;
}

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols{
      "preset", "transmit_power_dbm", "mean_snr_db", "seeds", "mean_final_cost",
      "std_final_cost", "uplink_delivery", "downlink_delivery", "humanlink_delivery",
      "analytic_delivery"};
  return cols;
}

namespace {

void write_header(std::ostream& out, const std::vector<std::string>& cols) {
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace

std::string human_actions_field(const std::vector<human::HumanAction>& actions) {
  if (actions.empty()) return "none";
  std::string out;
  for (const auto& a : actions) {
    if (!out.empty()) out += '+';
    out += human::to_string(a.kind);
    if (a.kind == human::ActionKind::kForceCommand) out += ":" + format_number(a.force);
  }
  return out;
}

void write_run_csv(std::ostream& out, const sim::RunResult& result) {
  write_header(out, run_columns());
  out << '\n';
  for (const auto& r : result.records) {
    const auto& s = r.true_state;
    out << format_number(r.t) << ',' << format_number(s.x) << ',' << format_number(s.x_dot)
        << ',' << format_number(s.theta) << ',' << format_number(s.theta_dot) << ','
        << format_number(r.machine_force) << ',' << format_number(r.applied_force) << ','
        << human_actions_field(r.human_actions) << ',' << (r.packets[0].delivered ? 1 : 0) << ','
        << (r.packets[1].delivered ? 1 : 0) << ',' << (r.packets[2].delivered ? 1 : 0) << ','
        << format_number(r.step_cost) << ',' << format_number(r.accumulated_cost) << '\n';
  }
}

void write_comparison_csv(std::ostream& out, const sim::ComparisonTable& table) {
  write_header(out, comparison_leading_columns());
  for (auto seed : table.seeds) out << ",cost_seed_" << seed;
  out << '\n';
  for (const auto& v : table.variants) {
    for (std::size_t k = 0; k < table.times.size(); ++k) {
      out << format_number(table.times[k]) << ',' << to_string(v.decision_maker) << ','
          << table.seeds.size() << ',' << format_number(v.mean[k]) << ','
          << format_number(v.stddev[k]);
      for (const auto& series : v.per_seed) out << ',' << format_number(series[k]);
      out << '\n';
    }
  }
}

void write_sweep_csv(std::ostream& out, const std::vector<sim::SweepPoint>& table) {
  write_header(out, sweep_columns());
  out << '\n';
  for (const auto& p : table) {
    out << p.preset << ',' << format_number(p.transmit_power_dbm) << ','
        << format_number(p.mean_snr_db) << ',' << p.final_costs.size() << ','
        << format_number(p.mean_cost) << ',' << format_number(p.stddev_cost) << ','
        << format_number(p.delivery_ratio[0]) << ',' << format_number(p.delivery_ratio[1]) << ','
        << format_number(p.delivery_ratio[2]) << ',' << format_number(p.analytic_delivery) << '\n';
  }
}

std::size_t CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorKind::kConfig, "csv: missing column '" + name + "'");
  return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::kConfig, "csv: empty input");
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    table.rows.push_back(split(line));
  }
  return table;
}

TableKind classify(const CsvTable& table) {
  if (table.header == run_columns()) return TableKind::kRun;
  if (table.header == sweep_columns()) return TableKind::kSweep;
  const auto& lead = comparison_leading_columns();
  if (table.header.size() > lead.size() &&
      std::equal(lead.begin(), lead.end(), table.header.begin())) {
    return TableKind::kComparison;
  }
  return TableKind::kUnknown;
}

std::vector<CheckResult> check_table(const CsvTable& table) {
  std::vector<CheckResult> checks;
  const TableKind kind = classify(table);
  checks.push_back({"header recognised", kind != TableKind::kUnknown, ""});
  if (kind == TableKind::kUnknown) return checks;

  bool widths_ok = true;
  bool numbers_ok = true;
  for (const auto& row : table.rows) widths_ok &= row.size() == table.header.size();
  checks.push_back({"row widths match header", widths_ok, ""});
  if (!widths_ok) return checks;

  auto numeric = [&](std::size_t row, const std::string& col) {
    double v = 0.0;
    if (!parse_double(table.rows[row][table.column(col)], v)) numbers_ok = false;
    return v;
  };

  if (kind == TableKind::kRun) {
    bool monotone = true;
    bool flags_ok = true;
    bool sums_ok = true;
    double prev = 0.0;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const double acc = numeric(i, "accumulated_cost");
      const double step = numeric(i, "step_cost");
      monotone &= acc >= prev && step >= 0.0;
      // Nine significant digits bound the re-summation error.
      sums_ok &= std::abs(prev + step - acc) <= 1e-8 * std::max(1.0, acc) + 1e-12;
      prev = acc;
      for (const char* c : {"uplink_delivered", "downlink_delivered", "humanlink_delivered"}) {
        const auto& f = table.rows[i][table.column(c)];
        flags_ok &= f == "0" || f == "1";
      }
      for (const char* c : {"t", "x", "x_dot", "theta", "theta_dot", "machine_force", "applied_force"}) {
        numeric(i, c);
      }
    }
    checks.push_back({"accumulated_cost non-decreasing", monotone, ""});
    checks.push_back({"accumulated_cost equals running sum of step_cost", sums_ok, ""});
    checks.push_back({"delivery flags are 0/1", flags_ok, ""});
  } else if (kind == TableKind::kComparison) {
    bool monotone = true;
    bool variants_ok = true;
    std::string variant;
    double prev = 0.0;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      const auto& v = table.rows[i][1];
      variants_ok &= v == "machine_only" || v == "human_only" || v == "whmc";
      const double mean = numeric(i, "mean_accumulated_cost");
      if (v == variant) monotone &= mean >= prev;
      variant = v;
      prev = mean;
      for (std::size_t c = 2; c < table.header.size(); ++c) {
        double x = 0.0;
        numbers_ok &= parse_double(table.rows[i][c], x);
      }
    }
    checks.push_back({"variants are known decision makers", variants_ok, ""});
    checks.push_back({"mean accumulated cost non-decreasing per variant", monotone, ""});
  } else {
    bool ratios_ok = true;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      for (const char* c : {"uplink_delivery", "downlink_delivery", "humanlink_delivery",
                            "analytic_delivery"}) {
        const double r = numeric(i, c);
        ratios_ok &= r >= 0.0 && r <= 1.0;
      }
      numeric(i, "mean_final_cost");
      numeric(i, "transmit_power_dbm");
    }
    checks.push_back({"delivery ratios in [0, 1]", ratios_ok, ""});
  }
  checks.push_back({"numeric fields parse", numbers_ok, ""});
  return checks;
}

}  // namespace whmc::io
