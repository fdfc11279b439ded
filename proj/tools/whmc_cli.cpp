// Batch entry point: run / compare / sweep / validate.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "whmc/error.hpp"
#include "whmc/invariants.hpp"
#include "whmc/orchestrator.hpp"
#include "whmc/results_csv.hpp"
#include "whmc/scenario_io.hpp"

namespace {

std::vector<std::uint64_t> seed_range(std::uint64_t n) {
  std::vector<std::uint64_t> seeds(n);
  std::iota(seeds.begin(), seeds.end(), 0);
  return seeds;
}

std::vector<double> parse_powers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw whmc::Error(whmc::ErrorKind::kConfig, "--powers: '" + item + "' is not a number");
    }
    out.push_back(v);
  }
  if (out.empty()) throw whmc::Error(whmc::ErrorKind::kConfig, "--powers: empty list");
  return out;
}

// Writes through a temporary string so a failed run never leaves a partial file.
void emit(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw whmc::Error(whmc::ErrorKind::kConfig, "cannot open '" + path + "' for writing");
  out << text;
}

int print_checks(const std::string& title, const std::vector<whmc::io::CheckResult>& checks) {
  int failures = 0;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << title << ": " << c.name;
    if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
    std::cout << '\n';
    failures += c.passed ? 0 : 1;
  }
  return failures;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wireless human-machine collaboration cart-pole simulator"};
  app.require_subcommand(1);

  std::string scenario_arg;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::uint64_t seed_count = 20;
  std::string powers = "20,23,26,29,32,35";
  int stride = 1;
  std::string summary_path;
  std::vector<std::string> csv_files;
  bool skip_suite = false;

  auto* run = app.add_subcommand("run", "Run one scenario and write its trace as CSV");
  run->add_option("--scenario", scenario_arg, "Preset name or JSON file")->default_val("case-study-whmc");
  run->add_option("--seed", seed, "Master seed (overrides the scenario)");
  run->add_option("--out", out_path, "Output CSV path, '-' for stdout")->default_val("run.csv");
  run->add_option("--summary", summary_path, "Also write the QoC report as JSON here");

  auto* compare = app.add_subcommand("compare", "Machine-only vs human-only vs WHMC");
  compare->add_option("--scenario", scenario_arg, "Preset name or JSON file")->default_val("fig5a");
  compare->add_option("--seeds", seed_count, "Number of seeds, expands to 0..N-1")->default_val(20)->check(CLI::PositiveNumber);
  compare->add_option("--stride", stride, "Keep every Nth period")->default_val(1)->check(CLI::PositiveNumber);
  compare->add_option("--out", out_path, "Output CSV path, '-' for stdout")->default_val("compare.csv");

  auto* sweep = app.add_subcommand("sweep", "Transmit-power sweep, engaged vs distracted operator");
  sweep->add_option("--scenario", scenario_arg, "Preset name or JSON file")->default_val("fig5b-engaged");
  sweep->add_option("--powers", powers, "Comma-separated transmit powers in dBm")->default_val("20,23,26,29,32,35");
  sweep->add_option("--seeds", seed_count, "Number of seeds, expands to 0..N-1")->default_val(20)->check(CLI::PositiveNumber);
  sweep->add_option("--out", out_path, "Output CSV path, '-' for stdout")->default_val("sweep.csv");

  auto* validate = app.add_subcommand("validate", "Run the invariant suite and check result CSVs");
  validate->add_option("--csv", csv_files, "Result tables to check")->check(CLI::ExistingFile);
  validate->add_flag("--skip-suite", skip_suite, "Only check the given CSV files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (run->parsed()) {
      whmc::Scenario s = whmc::io::load_scenario(scenario_arg);
      if (seed) s.master_seed = *seed;
      const auto result = whmc::sim::run_scenario(s);
      std::ostringstream csv;
      whmc::io::write_run_csv(csv, result);
      emit(out_path, csv.str());
      const std::string summary = whmc::io::to_json(result.qoc).dump(2) + "\n";
      if (!summary_path.empty()) emit(summary_path, summary);
      if (out_path != "-") std::cout << summary;
      if (result.aborted) {
        std::cerr << "run aborted: " << result.abort_reason << '\n';
        return 3;
      }
    } else if (compare->parsed()) {
      const whmc::Scenario s = whmc::io::load_scenario(scenario_arg);
      const auto table = whmc::sim::compare_decision_makers(s, seed_range(seed_count), stride);
      std::ostringstream csv;
      whmc::io::write_comparison_csv(csv, table);
      emit(out_path, csv.str());
    } else if (sweep->parsed()) {
      const whmc::Scenario s = whmc::io::load_scenario(scenario_arg);
      const auto table = whmc::sim::snr_sweep(s, parse_powers(powers), seed_range(seed_count));
      std::ostringstream csv;
      whmc::io::write_sweep_csv(csv, table);
      emit(out_path, csv.str());
    } else if (validate->parsed()) {
      int failures = 0;
      if (!skip_suite) failures += print_checks("invariants", whmc::run_invariant_suite());
      for (const auto& path : csv_files) {
        std::ifstream in(path);
        failures += print_checks(path, whmc::io::check_table(whmc::io::read_csv(in)));
      }
      std::cout << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed")
                << '\n';
      return failures == 0 ? 0 : 1;
    }
  } catch (const whmc::Error& e) {
    std::cerr << "error (" << whmc::to_string(e.kind()) << "): " << e.what() << '\n';
    return 2;
  }
  return 0;
}
