#include "whmc/invariants.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "whmc/control.hpp"
#include "whmc/dynamics.hpp"
#include "whmc/orchestrator.hpp"
#include "whmc/scenario_io.hpp"
#include "whmc/wireless.hpp"

namespace whmc {
namespace {

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

}  // namespace

std::vector<io::CheckResult> run_invariant_suite() {
  using dynamics::PlantParams;
  using dynamics::PlantState;
  std::vector<io::CheckResult> out;
  const PlantParams params;

  {
    const auto d = dynamics::derivative(PlantState{}, 0.0, params);
    out.push_back({"equilibrium is a fixed point", d.isZero(0.0), ""});
  }
  {
    PlantState s{0.0, 0.0, std::numbers::pi / 6, 0.0, false};
    const double e0 = dynamics::total_energy(s, params);
    for (int i = 0; i < 10000; ++i) s = dynamics::rk4_step(s, 0.0, params, 1e-3);
    const double drift = std::abs(dynamics::total_energy(s, params) - e0) / std::max(std::abs(e0), 1.0);
    out.push_back({"energy drift < 1e-6 over 10 s", drift < 1e-6, "drift=" + fmt(drift)});
  }
  {
    const auto design = control::design_lqr(params, {}, 0.01);
    const auto d = control::discretize_zoh(control::linearize_continuous(params), 0.01);
    const Eigen::MatrixXd r = Eigen::MatrixXd::Constant(1, 1, design.r);
    const double residual = control::dare_residual(d.a, d.b, design.q, r, design.p);
    out.push_back({"DARE residual < 1e-10", residual < 1e-10, "residual=" + fmt(residual)});
    const double rho = control::spectral_radius(d.a - d.b * design.k);
    out.push_back({"nominal closed loop Schur stable", rho < 1.0, "rho=" + fmt(rho)});
  }
  {
    bool monotone = true;
    for (double snr = 1.0; snr < 1000.0; snr *= 1.5) {
      monotone &= wireless::analytic_outage(snr * 1.5, 2.0) < wireless::analytic_outage(snr, 2.0);
      monotone &= wireless::analytic_outage(snr, 2.5) > wireless::analytic_outage(snr, 2.0);
    }
    out.push_back({"outage monotone in SNR and rate", monotone, ""});
  }
  {
    Scenario s = io::preset("case-study-whmc");
    s.duration = 8.0;
    s.master_seed = 7;
    const auto a = sim::run_scenario(s);
    const auto b = sim::run_scenario(s);
    std::ostringstream ca, cb;
    io::write_run_csv(ca, a);
    io::write_run_csv(cb, b);
    out.push_back({"run is deterministic for a fixed seed", ca.str() == cb.str(), ""});
    bool monotone = true;
    for (std::size_t i = 1; i < a.records.size(); ++i) {
      monotone &= a.records[i].accumulated_cost >= a.records[i - 1].accumulated_cost;
    }
    out.push_back({"accumulated cost non-decreasing", monotone, ""});
  }
  return out;
}

}  // namespace whmc
