#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "whmc/orchestrator.hpp"

namespace whmc::io {

/// %.9g, with "-0" folded to "0" so outputs stay byte-stable.
std::string format_number(double value);

const std::vector<std::string>& run_columns();
const std::vector<std::string>& sweep_columns();
/// Fixed leading columns; one cost_seed_<seed> column per seed follows.
const std::vector<std::string>& comparison_leading_columns();

void write_run_csv(std::ostream& out, const sim::RunResult& result);
void write_comparison_csv(std::ostream& out, const sim::ComparisonTable& table);
void write_sweep_csv(std::ostream& out, const std::vector<sim::SweepPoint>& table);

std::string human_actions_field(const std::vector<human::HumanAction>& actions);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;  // throws if absent
};

/// Plain comma-separated text without quoting, as written above.
CsvTable read_csv(std::istream& in);

enum class TableKind { kRun, kComparison, kSweep, kUnknown };

TableKind classify(const CsvTable& table);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Structural and invariant checks for a table produced by this library.
std::vector<CheckResult> check_table(const CsvTable& table);

}  // namespace whmc::io
