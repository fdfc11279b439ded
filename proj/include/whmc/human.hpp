#pragma once

#include <optional>
#include <string>
#include <vector>

#include "whmc/dynamics.hpp"
#include "whmc/rng.hpp"

namespace whmc::human {

enum class AttentionMode { kAlwaysEngaged, kAlwaysDistracted, kMarkov };
enum class Attention { kEngaged, kDistracted };

struct HumanParams {
  AttentionMode attention_mode = AttentionMode::kAlwaysEngaged;
  double p_engaged_to_distracted = 0.0;  // per second
  double p_distracted_to_engaged = 0.0;  // per second
  Attention initial_attention = Attention::kEngaged;
  double reaction_delay = 0.25;
  double reaction_jitter = 0.0;  // half-width of a uniform jitter on the delay
  double control_period = 0.3;   // decision interval
  double force_level = 60.0;
  double angle_deadband = 0.05;

  void validate() const;
  bool operator==(const HumanParams&) const = default;
};

struct HumanState {
  Attention attention = Attention::kEngaged;
  std::optional<double> weight_noticed_at;
  bool intervention_sent = false;
  std::optional<double> last_human_decision_time;
  // Not part of what the operator reports, but what a person would remember.
  std::optional<dynamics::PlantState> last_view;
  double reaction_extra = 0.0;
};

enum class ActionKind { kNone, kRemoveWeight, kForceCommand };

struct HumanAction {
  ActionKind kind = ActionKind::kNone;
  double force = 0.0;

  bool operator==(const HumanAction&) const = default;
};

const char* to_string(ActionKind kind);

/// What the operator receives this period after information-structure
/// filtering. An absent plant view means the human link dropped the packet.
struct HumanObservation {
  std::optional<dynamics::PlantState> plant;
  std::optional<double> machine_recommendation;
  std::optional<Eigen::Vector4d> machine_estimate;
};

HumanState initial_state(const HumanParams& params);

HumanState attention_transition(HumanState state, const HumanParams& params,
                                double dt, RngStream& rng);

struct HumanStepResult {
  HumanState state;
  std::vector<HumanAction> actions;
};

/// One operator update at time t. Decisions (remove-weight and, when
/// force_control is set, a bang-bang force command) are only taken at
/// decision instants spaced by params.control_period.
HumanStepResult human_step(HumanState state, const HumanObservation& observation,
                           const HumanParams& params, double t, bool force_control,
                           RngStream& rng);

/// Force the surrogate operator commands for a given pole angle: pushes the
/// cart under the pole at full level outside the deadband.
double human_force_for(double theta, const HumanParams& params);

struct LiveInput {
  std::string action;  // "remove_weight" or "force"
  double value = 0.0;
};

struct TimedHumanAction {
  std::int64_t apply_period = 0;
  HumanAction action;

  bool operator==(const TimedHumanAction&) const = default;
};

/// Maps an operator event received at simulated time t to an action applied at
/// the first control-period boundary at or after t. Throws kProtocol for an
/// unknown action.
TimedHumanAction live_input_adapter(const LiveInput& input, double t,
                                    double control_period, double force_level);

}  // namespace whmc::human
