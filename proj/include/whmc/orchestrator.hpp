#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "whmc/control.hpp"
#include "whmc/human.hpp"
#include "whmc/rng.hpp"
#include "whmc/scenario.hpp"
#include "whmc/wireless.hpp"

namespace whmc::sim {

struct ArbitrationResult {
  double applied_force = 0.0;
  std::optional<dynamics::DisturbanceEvent> plant_event;
};

/// Actuator arbitration between the two agents. `machine_force` and
/// `human_force` are what arrived at the actuator this period; `human_actions`
/// are the human packet's contents (remove_weight maps to a plant event under
/// every topology).
ArbitrationResult arbitrate(Topology topology, double machine_force, double human_force,
                            const std::vector<human::HumanAction>& human_actions,
                            double force_limit, double now);

/// theta^2, saturated at (pi/2)^2 once the pole has fallen.
double step_cost(const dynamics::PlantState& state, bool failed = false);

struct MachineObservation {
  std::optional<Eigen::Vector4d> plant;
  std::optional<human::Attention> human_attention;
  std::optional<std::vector<human::HumanAction>> human_last_actions;
};

struct TraceView {
  dynamics::PlantState true_state;
  bool uplink_delivered = false;
  bool human_link_delivered = false;
  Eigen::Vector4d machine_estimate = Eigen::Vector4d::Zero();
  double machine_last_force = 0.0;
  human::Attention human_attention = human::Attention::kEngaged;
  std::vector<human::HumanAction> human_last_actions;
};

struct Observations {
  MachineObservation machine;
  human::HumanObservation human;
};

/// Per-agent observations. Each agent only sees the plant through its own
/// link; awareness adds the counterpart's state, trustworthiness its action.
Observations observation_filter(InfoStructure info, Topology topology,
                                const TraceView& view);

struct StepRecord {
  std::int64_t period = 0;
  double t = 0.0;
  dynamics::PlantState true_state;  // sampled at t
  Eigen::Vector4d controller_estimate = Eigen::Vector4d::Zero();
  double machine_force = 0.0;       // computed at t
  std::vector<human::HumanAction> human_actions;  // emitted at t
  human::Attention attention = human::Attention::kEngaged;
  bool human_active = false;
  double applied_force = 0.0;       // held over [t, t + period)
  std::optional<std::int64_t> actuation_age;  // periods since the sample behind it
  std::array<wireless::PacketOutcome, 3> packets;  // uplink, downlink, human
  std::vector<human::HumanAction> delivered_human_actions;  // arrived at actuator
  bool weight_removed_by_human = false;
  double step_cost = 0.0;           // of the state at t + period
  double accumulated_cost = 0.0;
  MachineObservation machine_observation;
};

struct QocReport {
  // task layer
  double final_accumulated_cost = 0.0;
  bool failed = false;
  std::optional<double> failure_time;
  std::optional<double> time_to_stabilize;
  // network layer, indexed uplink / downlink / human link
  std::array<double, 3> delivery_ratio{};
  std::array<double, 3> mean_consecutive_losses{};
  std::array<std::int64_t, 3> max_consecutive_losses{};
  std::array<double, 3> mean_snr_db{};        // empirical mean of instantaneous SNR
  std::array<double, 3> configured_snr_db{};  // from path loss and powers
  double mean_actuation_age = 0.0;   // periods between sample and the command applied
  double actuation_age_jitter = 0.0; // standard deviation of the above
  // human layer
  double attention_duty_cycle = 0.0;
  std::int64_t intervention_count = 0;
  std::optional<double> intervention_latency;  // first attach to first human removal

  /// Weighted sum of (final cost, failed, mean loss ratio, interventions,
  /// 1 - attention duty cycle). No weighting is implied by default.
  double scalar_summary(const std::array<double, 5>& weights) const;
};

struct RunResult {
  std::uint64_t fingerprint = 0;
  std::uint64_t master_seed = 0;
  std::vector<StepRecord> records;
  std::optional<double> failure_time;
  bool aborted = false;
  std::string abort_reason;
  QocReport qoc;

  double final_cost() const {
    return records.empty() ? 0.0 : records.back().accumulated_cost;
  }
};

QocReport qoc_report(const RunResult& result, const Scenario& scenario);

using LiveInputLog = std::vector<human::TimedHumanAction>;

/// The closed-loop engine, one control period per step(). run_scenario and the
/// live session both drive this class.
class Simulation {
 public:
  /// live = true replaces the scripted operator with queued live inputs.
  explicit Simulation(Scenario scenario, bool live = false);

  bool done() const;
  std::int64_t period() const { return period_; }
  double time() const { return period_ * scenario_.control_period; }
  const dynamics::PlantState& plant_state() const { return state_; }
  double accumulated_cost() const { return accumulated_; }
  bool failed() const { return failure_time_.has_value(); }
  const Scenario& scenario() const { return scenario_; }
  const control::LqrDesign& lqr() const { return lqr_; }

  /// Queue a live action. It is applied at max(action.apply_period, period()).
  /// Returns the period it will be applied in.
  std::int64_t queue_live_action(human::TimedHumanAction action);
  const LiveInputLog& live_log() const { return live_log_; }

  const StepRecord& step();
  const StepRecord* last_record() const {
    return records_.empty() ? nullptr : &records_.back();
  }
  RunResult finish();

 private:
  void integrate_period(double force, std::optional<dynamics::DisturbanceEvent> human_event);

  Scenario scenario_;
  bool live_;
  control::LqrDesign lqr_;
  wireless::Channel uplink_;
  wireless::Channel downlink_;
  wireless::Channel human_link_;
  RngStream attention_rng_;
  RngStream reaction_rng_;

  dynamics::PlantState state_;
  std::int64_t period_ = 0;
  std::int64_t substep_ = 0;
  std::vector<dynamics::DisturbanceEvent> schedule_;
  std::vector<std::int64_t> schedule_substep_;
  std::vector<bool> schedule_done_;

  Eigen::Vector4d estimate_;
  std::int64_t estimate_sample_period_ = 0;
  std::int64_t held_sample_period_ = 0;
  std::optional<std::int64_t> machine_in_flight_sample_;
  control::LossPolicy actuator_policy_;
  double machine_in_flight_ = 0.0;
  std::vector<human::HumanAction> human_in_flight_;
  double human_force_held_ = 0.0;
  double machine_last_force_ = 0.0;
  std::vector<human::HumanAction> human_last_actions_;
  human::HumanState human_;
  std::map<std::int64_t, std::vector<human::HumanAction>> live_queue_;
  LiveInputLog live_log_;

  double accumulated_ = 0.0;
  std::optional<double> failure_time_;
  bool aborted_ = false;
  std::string abort_reason_;
  std::vector<StepRecord> records_;
};

/// Runs to completion. `live_inputs`, when given, replays a recorded operator
/// session in place of the scripted human.
RunResult run_scenario(const Scenario& scenario,
                       const std::optional<LiveInputLog>& live_inputs = std::nullopt);

// ---- experiment drivers ---------------------------------------------------

struct VariantSeries {
  DecisionMaker decision_maker;
  std::vector<std::vector<double>> per_seed;  // [seed][sample]
  std::vector<double> mean;
  std::vector<double> stddev;
};

struct ComparisonTable {
  std::vector<std::uint64_t> seeds;
  std::vector<double> times;   // sample times (end of period)
  std::vector<VariantSeries> variants;  // machine_only, human_only, whmc
};

/// Runs the three decision makers for every seed. `record_stride` thins the
/// stored accumulated-cost series (1 keeps every period).
ComparisonTable compare_decision_makers(const Scenario& base,
                                        const std::vector<std::uint64_t>& seeds,
                                        int record_stride = 1);

struct SweepPoint {
  std::string preset;  // "engaged" or "distracted"
  double transmit_power_dbm = 0.0;
  double mean_snr_db = 0.0;
  std::vector<double> final_costs;  // per seed
  double mean_cost = 0.0;
  double stddev_cost = 0.0;
  std::array<double, 3> delivery_ratio{};
  double analytic_delivery = 0.0;
  std::int64_t slots_per_link = 0;
};

/// Transmit-power sweep for the engaged and distracted operator presets. The
/// power is applied to all three links.
std::vector<SweepPoint> snr_sweep(const Scenario& base, const std::vector<double>& powers_dbm,
                                  const std::vector<std::uint64_t>& seeds);

}  // namespace whmc::sim
