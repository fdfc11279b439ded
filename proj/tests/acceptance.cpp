// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>

#include "whmc/control.hpp"
#include "whmc/dynamics.hpp"
#include "whmc/orchestrator.hpp"
#include "whmc/rng.hpp"
#include "whmc/scenario_io.hpp"
#include "whmc/session.hpp"
#include "whmc/wireless.hpp"

using namespace whmc;

namespace {

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double stddev_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

std::vector<std::uint64_t> seeds20() {
  std::vector<std::uint64_t> s(20);
  std::iota(s.begin(), s.end(), 0);
  return s;
}

// ---- 1 ----------------------------------------------------------------------
void physics(Outcome& o) {
  using namespace dynamics;
  const PlantParams p;
  bool exact = true;
  for (bool w : {false, true}) {
    const PlantState eq{0.7, 0.0, 0.0, 0.0, w};
    exact &= derivative(eq, 0.0, p).isZero(0.0) && rk4_step(eq, 0.0, p, 1e-3) == eq;
  }
  o.require(exact, "equilibrium fixed point");

  PlantState s{0.0, 0.0, 0.5235987755982988, 0.0, false};
  const double e0 = total_energy(s, p);
  for (int i = 0; i < 10000; ++i) s = rk4_step(s, 0.0, p, 1e-3);
  const double drift = std::abs(total_energy(s, p) - e0) / std::abs(e0);
  o.detail << " drift=" << drift;
  o.require(drift < 1e-6, "energy drift");

  const PlantState s0{0.1, 0.5, 0.6, 1.0, false};
  auto solve = [&](int steps) {
    PlantState r = s0;
    for (int i = 0; i < steps; ++i) r = rk4_step(r, 10.0, p, 1.0 / steps);
    return r.vector();
  };
  const Eigen::Vector4d reference = solve(6400);
  const double ratio = (solve(25) - reference).norm() / (solve(50) - reference).norm();
  o.detail << " richardson=" << ratio;
  o.require(ratio >= 12.0 && ratio <= 20.0, "RK4 order");
}

// ---- 2 ----------------------------------------------------------------------
void control_suite(Outcome& o) {
  using namespace control;
  const dynamics::PlantParams p;
  const auto design = design_lqr(p, LqrWeights{}, 0.01);
  const auto d = discretize_zoh(linearize_continuous(p), 0.01);
  const double res =
      dare_residual(d.a, d.b, design.q, Eigen::MatrixXd::Constant(1, 1, design.r), design.p);
  const double rho = spectral_radius(d.a - d.b * design.k);
  o.detail << " residual=" << res << " rho=" << rho;
  o.require(res < 1e-10, "DARE residual");
  o.require(rho < 1.0, "closed-loop stability");

  const auto c = linearize_continuous(p);
  double worst = 0.0;
  const double eps = 1e-5;
  for (int j = 0; j < 5; ++j) {
    Eigen::Vector4d up = Eigen::Vector4d::Zero(), dn = Eigen::Vector4d::Zero();
    double fu = 0.0, fd = 0.0;
    if (j < 4) {
      up[j] = eps;
      dn[j] = -eps;
    } else {
      fu = eps;
      fd = -eps;
    }
    dynamics::PlantState su, sd;
    su.set_vector(up);
    sd.set_vector(dn);
    const Eigen::Vector4d col =
        (dynamics::derivative(su, fu, p) - dynamics::derivative(sd, fd, p)) / (2 * eps);
    const Eigen::Vector4d ref = j < 4 ? Eigen::Vector4d(c.a.col(j)) : Eigen::Vector4d(c.b.col(0));
    worst = std::max(worst, (col - ref).cwiseAbs().maxCoeff());
  }
  o.detail << " fd=" << worst;
  o.require(worst < 1e-6, "linearization vs finite differences");

  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  const double phi = solve_dare(one, one, one, one)(0, 0);
  o.require(std::abs(phi - (1 + std::sqrt(5.0)) / 2) < 1e-9, "scalar DARE");
}

// ---- 3 ----------------------------------------------------------------------
void channel_suite(Outcome& o) {
  using namespace wireless;
  // Reference: 10 log10(4) + 20 log10(c / (4 pi f)) - 29 log10(50); SNR adds 20 - (-70) dB.
  const double lambda = kSpeedOfLight / 915e6;
  const double ref_db = 10 * std::log10(4.0) + 20 * std::log10(lambda / (4 * M_PI)) -
                        29 * std::log10(50.0);
  const double g_db = to_db(average_gain(50.0, 915e6, 4.0, 2.9));
  const double snr_db = to_db(mean_snr(LinkConfig{}));
  o.detail << " gain_db=" << g_db << " snr_db=" << snr_db;
  o.require(std::abs(g_db - ref_db) < 0.05 && std::abs(g_db + 74.9) < 0.1, "average gain");
  o.require(std::abs(snr_db - (ref_db + 90.0)) < 0.05 &&
                std::abs(snr_db - 15.1) < 0.1,
            "mean SNR");

  const double base_snr_db = to_db(mean_snr(LinkConfig{}));
  int worst_misses = 0;
  double worst_z = 0.0;
  for (double rate : {0.5, 1.0, 2.0, 4.0}) {
    for (double target_db : {5.0, 15.0, 25.0}) {
      LinkConfig cfg;
      cfg.code_rate = rate;
      cfg.transmit_power_dbm = 20.0 + (target_db - base_snr_db);
      Channel ch(cfg, RngStream(static_cast<std::uint64_t>(rate * 100 + target_db), "mc"));
      const int n = 1000000;
      int delivered = 0;
      for (int i = 0; i < n; ++i) delivered += ch.transmit().delivered;
      const double expected = 1.0 - analytic_outage(ch.mean_snr(), rate);
      const double sigma = std::sqrt(expected * (1 - expected) / n);
      const double z = std::abs(static_cast<double>(delivered) / n - expected) / sigma;
      worst_z = std::max(worst_z, z);
      if (z >= 3.0) ++worst_misses;
    }
  }
  o.detail << " worst_z=" << worst_z;
  o.require(worst_misses == 0, "Monte Carlo delivery within 3 sigma");
}

// ---- 4 ----------------------------------------------------------------------
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void determinism(Outcome& o) {
  const auto dir = std::filesystem::temp_directory_path() / "whmc_acceptance";
  std::filesystem::create_directories(dir);
  std::string outputs[2];
  for (int i = 0; i < 2; ++i) {
    const auto path = dir / ("run" + std::to_string(i) + ".csv");
    std::filesystem::remove(path);
    const std::string cmd = std::string("\"") + WHMC_CLI_PATH +
                            "\" run --scenario case-study-whmc --seed 7 --out \"" +
                            path.string() + "\" > /dev/null";
    o.require(std::system(cmd.c_str()) == 0, "run exit status");
    outputs[i] = slurp(path);
  }
  o.detail << " csv_bytes=" << outputs[0].size();
  o.require(!outputs[0].empty() && outputs[0] == outputs[1], "byte-identical CSV");

  bool equal = true;
  for (std::uint64_t seed : {0u, 7u, 13u}) {
    Scenario s = io::preset("fig5b-distracted");
    s.master_seed = seed;
    const auto whmc = sim::run_scenario(s);
    s.decision_maker = DecisionMaker::kMachineOnly;
    const auto mo = sim::run_scenario(s);
    equal &= whmc.records.size() == mo.records.size();
    for (std::size_t k = 0; equal && k < whmc.records.size(); ++k) {
      equal &= whmc.records[k].true_state == mo.records[k].true_state &&
               whmc.records[k].applied_force == mo.records[k].applied_force &&
               whmc.records[k].accumulated_cost == mo.records[k].accumulated_cost;
    }
  }
  o.require(equal, "distracted WHMC trace equals machine_only");
}

// ---- 5 ----------------------------------------------------------------------
void fig5a(Outcome& o) {
  const auto table = sim::compare_decision_makers(io::preset("fig5a"), seeds20(), 1);
  const auto& mo = table.variants[0];
  const auto& ho = table.variants[1];
  const auto& wh = table.variants[2];
  const std::size_t last = table.times.size() - 1;
  std::size_t at5 = 0;
  for (std::size_t i = 0; i < table.times.size(); ++i) {
    if (table.times[i] <= 5.0 + 1e-9) at5 = i;
  }
  o.detail << " t_end=" << table.times[last] << " machine_only=" << mo.mean[last]
           << " human_only=" << ho.mean[last] << " whmc=" << wh.mean[last];
  o.require(wh.mean[last] < mo.mean[last], "WHMC < machine_only");
  o.require(wh.mean[last] < ho.mean[last], "WHMC < human_only");

  int wins = 0;
  for (std::size_t s = 0; s < table.seeds.size(); ++s) {
    wins += wh.per_seed[s][last] < mo.per_seed[s][last] &&
            wh.per_seed[s][last] < ho.per_seed[s][last];
  }
  const double fraction = static_cast<double>(wins) / table.seeds.size();
  o.detail << " seed_wins=" << wins << "/" << table.seeds.size();
  o.require(fraction >= 0.9, "ordering in >= 90% of seeds");

  const double slope_wh = (wh.mean[last] - wh.mean[at5]) / (table.times[last] - table.times[at5]);
  const double slope_mo = (mo.mean[last] - mo.mean[at5]) / (table.times[last] - table.times[at5]);
  o.detail << " slope_whmc=" << slope_wh << " slope_machine_only=" << slope_mo;
  o.require(slope_wh < slope_mo, "post-event slope");
}

// ---- 6 ----------------------------------------------------------------------
void fig5b(Outcome& o) {
  const std::vector<double> powers{20, 23, 26, 29, 32, 35};
  const auto points = sim::snr_sweep(io::preset("fig5b-engaged"), powers, seeds20());
  std::vector<const sim::SweepPoint*> engaged, distracted;
  for (const auto& p : points) (p.preset == "engaged" ? engaged : distracted).push_back(&p);
  if (engaged.size() != powers.size() || distracted.size() != powers.size()) {
    o.require(false, "sweep shape");
    return;
  }

  bool monotone = true;
  for (std::size_t i = 1; i < engaged.size(); ++i) {
    std::vector<double> diff(engaged[i]->final_costs.size());
    for (std::size_t s = 0; s < diff.size(); ++s) {
      diff[s] = engaged[i]->final_costs[s] - engaged[i - 1]->final_costs[s];
    }
    const double se = stddev_of(diff) / std::sqrt(static_cast<double>(diff.size()));
    monotone &= mean_of(diff) <= 3.0 * se;
  }
  o.require(monotone, "engaged cost non-increasing within 3 sigma");

  std::vector<double> gap(engaged.front()->final_costs.size());
  for (std::size_t s = 0; s < gap.size(); ++s) {
    gap[s] = engaged.front()->final_costs[s] - engaged.back()->final_costs[s];
  }
  const double n = static_cast<double>(gap.size());
  const double t_stat = mean_of(gap) / (stddev_of(gap) / std::sqrt(n));
  const boost::math::students_t dist(n - 1);
  const double t_crit = boost::math::quantile(dist, 0.95);
  o.detail << " engaged " << engaged.front()->mean_cost << "->" << engaged.back()->mean_cost
           << " t=" << t_stat << " t_crit=" << t_crit;
  o.require(t_stat > t_crit, "cost(20) - cost(35) > 0 at 95%");

  std::vector<double> means;
  for (const auto* p : distracted) means.push_back(p->mean_cost);
  const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
  const double spread = (*hi - *lo) / mean_of(means);
  o.detail << " distracted_spread=" << spread;
  o.require(spread < 0.10, "distracted spread < 10%");
}

// ---- 7 ----------------------------------------------------------------------
void protocol(Outcome& o) {
  using session::Json;
  using session::Phase;
  session::Session s("acceptance");
  std::int64_t seq = 0;
  auto send = [&](Json m) {
    m["seq"] = ++seq;
    return s.handle(m);
  };
  auto is_error = [](const std::vector<Json>& r) {
    return r.size() == 1 && r[0]["type"] == "error";
  };

  bool rejects = is_error(send({{"type", "start"}})) &&
                 is_error(send({{"type", "input"}, {"action", "remove_weight"}})) &&
                 is_error(send({{"type", "configure"}})) && s.phase() == Phase::kConnected;
  send({{"type", "hello"}});
  rejects &= is_error(send({{"type", "hello"}})) && is_error(send({{"type", "resume"}})) &&
             is_error(send({{"type", "start"}})) && s.phase() == Phase::kGreeted;
  send({{"type", "configure"}, {"scenario", "case-study-whmc"}, {"seed", 19}});
  rejects &= is_error(send({{"type", "pause"}})) && s.phase() == Phase::kConfigured;
  send({{"type", "start"}});
  rejects &= is_error(send({{"type", "configure"}})) && is_error(send({{"type", "start"}})) &&
             s.phase() == Phase::kRunning;
  rejects &= is_error(s.handle(Json{{"type", "pause"}, {"seq", 1}}));
  o.require(rejects, "out-of-order transitions rejected");

  // Scripted operator: removes the weight late, nudges twice, pauses once.
  std::int64_t ticks = 0;
  double live_cost = 0.0;
  while (s.phase() != Phase::kEnded) {
    if (ticks == 555) send({{"type", "input"}, {"action", "remove_weight"}});
    if (ticks == 1200) send({{"type", "input"}, {"action", "force"}, {"value", 0.7}});
    if (ticks == 1201) send({{"type", "input"}, {"action", "force"}, {"value", 0.0}});
    if (ticks == 1500) {
      send({{"type", "pause"}});
      s.tick();
      send({{"type", "resume"}});
    }
    for (const auto& m : s.tick()) {
      if (m["type"] == "end") live_cost = m["accumulated_cost"].get<double>();
    }
    ++ticks;
  }
  const auto replay = sim::run_scenario(s.scenario(), s.input_log());
  o.detail << " live=" << live_cost << " replay=" << replay.final_cost()
           << " inputs=" << s.input_log().size();
  o.require(live_cost == replay.final_cost(), "record/replay equivalence");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"1 physics", physics},       {"2 control", control_suite}, {"3 channel", channel_suite},
      {"4 determinism", determinism}, {"5 fig5a ordering", fig5a}, {"6 fig5b snr sweep", fig5b},
      {"7 protocol", protocol}};
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %s (%.1fs):%s\n", o.passed ? "PASS" : "FAIL", name.c_str(), secs,
                o.detail.str().c_str());
    std::fflush(stdout);
    failures += !o.passed;
  }
  return failures == 0 ? 0 : 1;
}
