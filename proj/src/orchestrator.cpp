#include "whmc/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "whmc/error.hpp"
#include "whmc/parallel.hpp"
#include "whmc/scenario_io.hpp"

namespace whmc::sim {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
constexpr double kStabilizeBand = 0.01;
constexpr double kStabilizeHold = 1.0;

bool contains(const std::vector<human::HumanAction>& actions, human::ActionKind kind) {
  return std::any_of(actions.begin(), actions.end(),
                     [kind](const human::HumanAction& a) { return a.kind == kind; });
}

Topology effective_topology(const Scenario& s) {
  switch (s.decision_maker) {
    case DecisionMaker::kMachineOnly: return Topology::kMachineDominated;
    case DecisionMaker::kHumanOnly: return Topology::kHumanDominated;
    case DecisionMaker::kWhmc: return s.topology;
  }
  return s.topology;
}

void mean_and_stddev(const std::vector<double>& v, double& mean, double& sd) {
  mean = v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  sd = v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0;
}

}  // namespace

ArbitrationResult arbitrate(Topology topology, double machine_force, double human_force,
                            const std::vector<human::HumanAction>& human_actions,
                            double force_limit, double now) {
  ArbitrationResult out;
  switch (topology) {
    case Topology::kMachineDominated:
      out.applied_force = machine_force;
      break;
    case Topology::kSymbiosis:
      out.applied_force = std::clamp(machine_force + human_force, -force_limit, force_limit);
      break;
    case Topology::kHumanDominated:
      out.applied_force = std::clamp(human_force, -force_limit, force_limit);
      break;
  }
  if (contains(human_actions, human::ActionKind::kRemoveWeight)) {
    out.plant_event = dynamics::DisturbanceEvent{now, dynamics::DisturbanceKind::kRemoveWeight};
  }
  return out;
}

double step_cost(const dynamics::PlantState& state, bool failed) {
  if (failed || std::abs(state.theta) > kHalfPi) return kHalfPi * kHalfPi;
  return state.theta * state.theta;
}

Observations observation_filter(InfoStructure info, Topology topology,
                                const TraceView& view) {
  Observations out;
  if (view.uplink_delivered) out.machine.plant = view.true_state.vector();
  if (view.human_link_delivered) out.human.plant = view.true_state;

  const bool aware = info != InfoStructure::kIgnorance;
  const bool trusted = info == InfoStructure::kTrustworthiness;
  if (aware) {
    out.machine.human_attention = view.human_attention;
    if (view.human_link_delivered) out.human.machine_estimate = view.machine_estimate;
  }
  if (trusted) out.machine.human_last_actions = view.human_last_actions;
  // A human-dominated machine offers its command as a recommendation once the
  // human can see the machine at all.
  if (view.human_link_delivered &&
      (trusted || (aware && topology == Topology::kHumanDominated))) {
    out.human.machine_recommendation = view.machine_last_force;
  }
  return out;
}

double QocReport::scalar_summary(const std::array<double, 5>& weights) const {
  const double mean_loss =
      1.0 - (delivery_ratio[0] + delivery_ratio[1] + delivery_ratio[2]) / 3.0;
  const std::array<double, 5> features{final_accumulated_cost, failed ? 1.0 : 0.0,
                                       mean_loss, static_cast<double>(intervention_count),
                                       1.0 - attention_duty_cycle};
  return std::inner_product(weights.begin(), weights.end(), features.begin(), 0.0);
}

QocReport qoc_report(const RunResult& result, const Scenario& scenario) {
  QocReport q;
  const auto& recs = result.records;
  q.final_accumulated_cost = result.final_cost();
  q.failure_time = result.failure_time;
  q.failed = result.failure_time.has_value();

  const auto hold = static_cast<std::size_t>(std::llround(kStabilizeHold / scenario.control_period));
  std::size_t inside = 0;
  for (std::size_t k = 0; k < recs.size(); ++k) {
    inside = std::abs(recs[k].true_state.theta) < kStabilizeBand ? inside + 1 : 0;
    if (inside == hold) {
      q.time_to_stabilize = recs[k + 1 - hold].t;
      break;
    }
  }

  const auto links = scenario.links.all();
  for (std::size_t i = 0; i < 3; ++i) {
    std::int64_t delivered = 0;
    std::int64_t run = 0;
    std::int64_t runs = 0;
    std::int64_t lost = 0;
    double snr_sum = 0.0;
    for (const auto& r : recs) {
      const auto& p = r.packets[i];
      snr_sum += p.instantaneous_snr;
      if (p.delivered) {
        ++delivered;
        if (run > 0) ++runs;
        run = 0;
      } else {
        ++lost;
        ++run;
        q.max_consecutive_losses[i] = std::max(q.max_consecutive_losses[i], run);
      }
    }
    if (run > 0) ++runs;
    q.delivery_ratio[i] = recs.empty() ? 1.0 : static_cast<double>(delivered) / recs.size();
    q.mean_consecutive_losses[i] = runs > 0 ? static_cast<double>(lost) / runs : 0.0;
    q.mean_snr_db[i] = recs.empty() ? 0.0 : wireless::to_db(snr_sum / recs.size());
    q.configured_snr_db[i] = wireless::to_db(wireless::mean_snr(*links[i]));
  }

  std::vector<double> ages;
  std::int64_t active = 0;
  std::int64_t engaged = 0;
  for (const auto& r : recs) {
    if (r.actuation_age) ages.push_back(static_cast<double>(*r.actuation_age));
    if (r.human_active) {
      ++active;
      if (r.attention == human::Attention::kEngaged) ++engaged;
    }
    if (contains(r.delivered_human_actions, human::ActionKind::kRemoveWeight)) {
      ++q.intervention_count;
    }
  }
  mean_and_stddev(ages, q.mean_actuation_age, q.actuation_age_jitter);
  q.attention_duty_cycle = active > 0 ? static_cast<double>(engaged) / active : 0.0;

  std::optional<double> first_attach;
  for (const auto& e : scenario.disturbances) {
    if (e.kind == dynamics::DisturbanceKind::kAttachWeight &&
        (!first_attach || e.time < *first_attach)) {
      first_attach = e.time;
    }
  }
  if (first_attach) {
    for (const auto& r : recs) {
      if (r.weight_removed_by_human && r.t >= *first_attach) {
        q.intervention_latency = r.t - *first_attach;
        break;
      }
    }
  }
  return q;
}

// ---- Simulation -------------------------------------------------------------

Simulation::Simulation(Scenario scenario, bool live)
    : scenario_((scenario.validate(), std::move(scenario))),
      live_(live),
      lqr_(control::design_lqr(scenario_.plant, scenario_.control.weights,
                               scenario_.control_period)),
      uplink_(scenario_.links.sensor_uplink, RngStream(scenario_.master_seed, "sensor_uplink")),
      downlink_(scenario_.links.actuator_downlink,
                RngStream(scenario_.master_seed, "actuator_downlink")),
      human_link_(scenario_.links.human_link, RngStream(scenario_.master_seed, "human_link")),
      attention_rng_(scenario_.master_seed, "human_attention"),
      reaction_rng_(scenario_.master_seed, "human_reaction"),
      state_(scenario_.initial_state),
      estimate_(scenario_.initial_state.vector()),
      actuator_policy_(scenario_.control.actuator_loss),
      human_(human::initial_state(scenario_.human)) {
  schedule_ = scenario_.disturbances;
  std::stable_sort(schedule_.begin(), schedule_.end(),
                   [](const auto& a, const auto& b) { return a.time < b.time; });
  for (const auto& e : schedule_) {
    schedule_substep_.push_back(
        static_cast<std::int64_t>(std::ceil(e.time / scenario_.physics_substep - 1e-9)));
  }
  schedule_done_.assign(schedule_.size(), false);
  records_.reserve(static_cast<std::size_t>(scenario_.period_count()));
}

bool Simulation::done() const { return aborted_ || period_ >= scenario_.period_count(); }

std::int64_t Simulation::queue_live_action(human::TimedHumanAction action) {
  action.apply_period = std::max(action.apply_period, period_);
  live_queue_[action.apply_period].push_back(action.action);
  live_log_.push_back(action);
  return action.apply_period;
}

void Simulation::integrate_period(double force,
                                  std::optional<dynamics::DisturbanceEvent> human_event) {
  const int n = scenario_.substeps_per_period();
  for (int j = 0; j < n; ++j, ++substep_) {
    for (std::size_t e = 0; e < schedule_.size(); ++e) {
      if (!schedule_done_[e] && schedule_substep_[e] <= substep_) {
        state_ = dynamics::apply_event(state_, schedule_[e]);
        schedule_done_[e] = true;
      }
    }
    if (j == 0 && human_event) state_ = dynamics::apply_event(state_, *human_event);
    if (failure_time_) continue;
    state_ = dynamics::rk4_step(state_, force, scenario_.plant, scenario_.physics_substep);
    if (std::abs(state_.theta) > kHalfPi) {
      failure_time_ = static_cast<double>(substep_ + 1) * scenario_.physics_substep;
    }
  }
}

const StepRecord& Simulation::step() {
  if (done()) throw Error(ErrorKind::kInvalidState, "step: simulation already finished");
  const auto& s = scenario_;
  const double t = time();
  const bool machine_enabled = s.decision_maker != DecisionMaker::kHumanOnly;
  const bool human_enabled = s.decision_maker != DecisionMaker::kMachineOnly;
  const Topology topology = effective_topology(s);

  StepRecord rec;
  rec.period = period_;
  rec.t = t;
  rec.true_state = state_;

  // Sensor uplink.
  rec.packets[0] = uplink_.transmit();
  if (rec.packets[0].delivered) {
    estimate_ = state_.vector();
    estimate_sample_period_ = period_;
  } else if (s.control.estimate_loss == control::LossPolicyKind::kZeroInput) {
    estimate_.setZero();
  }
  rec.controller_estimate = estimate_;

  // Machine command over the actuator downlink.
  rec.machine_force =
      machine_enabled ? control::machine_command(lqr_.k, estimate_, s.plant.force_limit) : 0.0;
  rec.packets[1] = downlink_.transmit();
  double machine_next = 0.0;
  std::optional<std::int64_t> machine_next_sample;
  if (machine_enabled) {
    if (rec.packets[1].delivered) {
      actuator_policy_.on_delivery(rec.machine_force);
      machine_next = rec.machine_force;
      machine_next_sample = estimate_sample_period_;
      held_sample_period_ = estimate_sample_period_;
    } else {
      machine_next = actuator_policy_.on_loss();
      if (s.control.actuator_loss == control::LossPolicyKind::kHoldLast) {
        machine_next_sample = held_sample_period_;
      }
    }
  }

  // Human over the human link.
  rec.packets[2] = human_link_.transmit();
  TraceView view;
  view.true_state = state_;
  view.uplink_delivered = rec.packets[0].delivered;
  view.human_link_delivered = rec.packets[2].delivered;
  view.machine_estimate = estimate_;
  view.machine_last_force = rec.machine_force;
  view.human_attention = human_.attention;
  view.human_last_actions = human_last_actions_;
  const Observations obs = observation_filter(s.info_structure, topology, view);
  rec.machine_observation = obs.machine;

  std::vector<human::HumanAction> emitted;
  if (human_enabled) {
    rec.human_active = true;
    if (live_) {
      rec.attention = human::Attention::kEngaged;
      if (auto it = live_queue_.find(period_); it != live_queue_.end()) {
        emitted = std::move(it->second);
        live_queue_.erase(it);
      }
    } else {
      human_ = human::attention_transition(human_, s.human, s.control_period, attention_rng_);
      rec.attention = human_.attention;
      const bool force_control = topology != Topology::kMachineDominated;
      auto res = human::human_step(human_, obs.human, s.human, t, force_control, reaction_rng_);
      human_ = std::move(res.state);
      emitted = std::move(res.actions);
    }
  }
  rec.human_actions = emitted;
  if (!emitted.empty()) human_last_actions_ = emitted;

  // What reaches the actuator this period left the agents one period ago.
  rec.delivered_human_actions = human_in_flight_;
  for (const auto& a : human_in_flight_) {
    if (a.kind == human::ActionKind::kForceCommand) human_force_held_ = a.force;
  }
  const ArbitrationResult arb = arbitrate(topology, machine_in_flight_, human_force_held_,
                                          human_in_flight_, s.plant.force_limit, t);
  rec.applied_force = arb.applied_force;
  rec.weight_removed_by_human = arb.plant_event.has_value() && state_.weight_present;
  if (topology != Topology::kHumanDominated && machine_in_flight_sample_) {
    rec.actuation_age = period_ - *machine_in_flight_sample_;
  }

  machine_in_flight_ = machine_next;
  machine_in_flight_sample_ = machine_next_sample;
  human_in_flight_ = rec.packets[2].delivered ? emitted : std::vector<human::HumanAction>{};

  try {
    integrate_period(rec.applied_force, arb.plant_event);
  } catch (const Error& e) {
    aborted_ = true;
    abort_reason_ = e.what();
  }

  rec.step_cost = step_cost(state_, failure_time_.has_value());
  accumulated_ += rec.step_cost;
  rec.accumulated_cost = accumulated_;
  ++period_;
  records_.push_back(std::move(rec));
  return records_.back();
}

RunResult Simulation::finish() {
  RunResult out;
  out.fingerprint = io::scenario_fingerprint(scenario_);
  out.master_seed = scenario_.master_seed;
  out.failure_time = failure_time_;
  out.aborted = aborted_;
  out.abort_reason = abort_reason_;
  out.records = std::move(records_);
  out.qoc = qoc_report(out, scenario_);
  records_.clear();
  return out;
}

RunResult run_scenario(const Scenario& scenario, const std::optional<LiveInputLog>& live_inputs) {
  Simulation sim(scenario, live_inputs.has_value());
  if (live_inputs) {
    for (const auto& a : *live_inputs) sim.queue_live_action(a);
  }
  while (!sim.done()) sim.step();
  return sim.finish();
}

// ---- experiment drivers -----------------------------------------------------

ComparisonTable compare_decision_makers(const Scenario& base,
                                        const std::vector<std::uint64_t>& seeds,
                                        int record_stride) {
  if (seeds.empty()) throw Error(ErrorKind::kConfig, "compare: at least one seed required");
  if (record_stride < 1) throw Error(ErrorKind::kConfig, "compare: record_stride must be >= 1");
  constexpr std::array<DecisionMaker, 3> kVariants{
      DecisionMaker::kMachineOnly, DecisionMaker::kHumanOnly, DecisionMaker::kWhmc};

  ComparisonTable table;
  table.seeds = seeds;
  const std::int64_t periods = base.period_count();
  for (std::int64_t k = 0; k < periods; ++k) {
    if ((k + 1) % record_stride == 0) table.times.push_back((k + 1) * base.control_period);
  }

  std::vector<std::vector<double>> series(kVariants.size() * seeds.size());
  parallel_for(series.size(), [&](std::size_t job) {
    Scenario s = base;
    s.decision_maker = kVariants[job % kVariants.size()];
    s.master_seed = seeds[job / kVariants.size()];
    const RunResult r = run_scenario(s);
    auto& out = series[job];
    out.reserve(table.times.size());
    for (std::size_t k = 0; k < r.records.size(); ++k) {
      if ((k + 1) % record_stride == 0) out.push_back(r.records[k].accumulated_cost);
    }
  });

  for (std::size_t v = 0; v < kVariants.size(); ++v) {
    VariantSeries vs;
    vs.decision_maker = kVariants[v];
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      vs.per_seed.push_back(std::move(series[i * kVariants.size() + v]));
    }
    vs.mean.resize(table.times.size());
    vs.stddev.resize(table.times.size());
    std::vector<double> column(seeds.size());
    for (std::size_t k = 0; k < table.times.size(); ++k) {
      for (std::size_t i = 0; i < seeds.size(); ++i) column[i] = vs.per_seed[i][k];
      mean_and_stddev(column, vs.mean[k], vs.stddev[k]);
    }
    table.variants.push_back(std::move(vs));
  }
  return table;
}

std::vector<SweepPoint> snr_sweep(const Scenario& base, const std::vector<double>& powers_dbm,
                                  const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw Error(ErrorKind::kConfig, "sweep: at least one seed required");
  for (double p : powers_dbm) {
    if (!(p >= base.min_transmit_power_dbm)) {
      throw Error(ErrorKind::kConfig, "sweep: power below the minimum transmit power");
    }
  }
  const std::array<std::pair<const char*, human::AttentionMode>, 2> presets{
      {{"engaged", human::AttentionMode::kAlwaysEngaged},
       {"distracted", human::AttentionMode::kAlwaysDistracted}}};

  struct Job {
    double cost = 0.0;
    std::array<std::int64_t, 3> delivered{};
    std::int64_t slots = 0;
  };
  const std::size_t per_point = seeds.size();
  const std::size_t points = presets.size() * powers_dbm.size();
  std::vector<Job> jobs(points * per_point);

  auto scenario_for = [&](std::size_t point) {
    Scenario s = base;
    s.human.attention_mode = presets[point / powers_dbm.size()].second;
    for (auto* link : s.links.all()) link->transmit_power_dbm = powers_dbm[point % powers_dbm.size()];
    return s;
  };

  parallel_for(jobs.size(), [&](std::size_t j) {
    Scenario s = scenario_for(j / per_point);
    s.master_seed = seeds[j % per_point];
    const RunResult r = run_scenario(s);
    Job& out = jobs[j];
    out.cost = r.final_cost();
    out.slots = static_cast<std::int64_t>(r.records.size());
    for (const auto& rec : r.records) {
      for (std::size_t i = 0; i < 3; ++i) out.delivered[i] += rec.packets[i].delivered ? 1 : 0;
    }
  });

  std::vector<SweepPoint> table;
  for (std::size_t point = 0; point < points; ++point) {
    const Scenario s = scenario_for(point);
    SweepPoint sp;
    sp.preset = presets[point / powers_dbm.size()].first;
    sp.transmit_power_dbm = powers_dbm[point % powers_dbm.size()];
    const double snr = wireless::mean_snr(s.links.sensor_uplink);
    sp.mean_snr_db = wireless::to_db(snr);
    sp.analytic_delivery = 1.0 - wireless::analytic_outage(snr, s.links.sensor_uplink.code_rate);
    std::array<std::int64_t, 3> delivered{};
    for (std::size_t i = 0; i < per_point; ++i) {
      const Job& job = jobs[point * per_point + i];
      sp.final_costs.push_back(job.cost);
      sp.slots_per_link += job.slots;
      for (std::size_t l = 0; l < 3; ++l) delivered[l] += job.delivered[l];
    }
    for (std::size_t l = 0; l < 3; ++l) {
      sp.delivery_ratio[l] =
          sp.slots_per_link > 0 ? static_cast<double>(delivered[l]) / sp.slots_per_link : 1.0;
    }
    mean_and_stddev(sp.final_costs, sp.mean_cost, sp.stddev_cost);
    table.push_back(std::move(sp));
  }
  return table;
}

}  // namespace whmc::sim
