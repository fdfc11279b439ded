#include "whmc/human.hpp"

#include <cmath>

#include "whmc/error.hpp"

namespace whmc::human {
namespace {

constexpr double kTimeSlack = 1e-9;

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::kConfig, "human." + message);
}

}  // namespace

void HumanParams::validate() const {
  require(p_engaged_to_distracted >= 0.0 && p_engaged_to_distracted <= 1.0,
          "p_engaged_to_distracted must be in [0, 1]");
  require(p_distracted_to_engaged >= 0.0 && p_distracted_to_engaged <= 1.0,
          "p_distracted_to_engaged must be in [0, 1]");
  require(reaction_delay >= 0.0 && std::isfinite(reaction_delay),
          "reaction_delay must be >= 0");
  require(reaction_jitter >= 0.0 && reaction_jitter <= reaction_delay,
          "reaction_jitter must be in [0, reaction_delay]");
  require(control_period > 0.0 && std::isfinite(control_period),
          "control_period must be > 0");
  require(force_level >= 0.0 && std::isfinite(force_level), "force_level must be >= 0");
  require(angle_deadband >= 0.0, "angle_deadband must be >= 0");
}

const char* to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::kNone: return "none";
    case ActionKind::kRemoveWeight: return "remove_weight";
    case ActionKind::kForceCommand: return "force";
  }
  return "unknown";
}

HumanState initial_state(const HumanParams& params) {
  HumanState state;
  switch (params.attention_mode) {
    case AttentionMode::kAlwaysEngaged: state.attention = Attention::kEngaged; break;
    case AttentionMode::kAlwaysDistracted: state.attention = Attention::kDistracted; break;
    case AttentionMode::kMarkov: state.attention = params.initial_attention; break;
  }
  return state;
}

HumanState attention_transition(HumanState state, const HumanParams& params,
                                double dt, RngStream& rng) {
  switch (params.attention_mode) {
    case AttentionMode::kAlwaysEngaged:
      state.attention = Attention::kEngaged;
      return state;
    case AttentionMode::kAlwaysDistracted:
      state.attention = Attention::kDistracted;
      return state;
    case AttentionMode::kMarkov: break;
  }
  const bool engaged = state.attention == Attention::kEngaged;
  const double rate =
      engaged ? params.p_engaged_to_distracted : params.p_distracted_to_engaged;
  const double flip = -std::expm1(-rate * dt);
  // One draw per step in either state keeps the stream aligned across runs.
  if (rng.uniform() < flip) {
    state.attention = engaged ? Attention::kDistracted : Attention::kEngaged;
  }
  return state;
}

double human_force_for(double theta, const HumanParams& params) {
  if (std::abs(theta) <= params.angle_deadband) return 0.0;
  return theta > 0.0 ? params.force_level : -params.force_level;
}

HumanStepResult human_step(HumanState state, const HumanObservation& observation,
                           const HumanParams& params, double t, bool force_control,
                           RngStream& rng) {
  HumanStepResult out;
  const bool engaged = state.attention == Attention::kEngaged;

  if (observation.plant) {
    state.last_view = observation.plant;
    if (!observation.plant->weight_present) {
      // Weight gone: the next attach is a new event.
      state.weight_noticed_at.reset();
      state.intervention_sent = false;
    } else if (engaged && !state.weight_noticed_at) {
      state.weight_noticed_at = t;
      state.reaction_extra = params.reaction_jitter > 0.0
                                 ? (2.0 * rng.uniform() - 1.0) * params.reaction_jitter
                                 : 0.0;
    }
  }

  const bool decision_instant =
      !state.last_human_decision_time ||
      t - *state.last_human_decision_time >= params.control_period - kTimeSlack;
  if (!decision_instant) {
    out.state = state;
    return out;
  }
  state.last_human_decision_time = t;

  if (engaged && state.weight_noticed_at && !state.intervention_sent &&
      t + kTimeSlack >= *state.weight_noticed_at + params.reaction_delay + state.reaction_extra) {
    out.actions.push_back({ActionKind::kRemoveWeight, 0.0});
    state.intervention_sent = true;
  }
  if (force_control) {
    double force = 0.0;
    if (engaged && state.last_view) force = human_force_for(state.last_view->theta, params);
    out.actions.push_back({ActionKind::kForceCommand, force});
  }
  out.state = state;
  return out;
}

TimedHumanAction live_input_adapter(const LiveInput& input, double t,
                                    double control_period, double force_level) {
  TimedHumanAction out;
  if (input.action == "remove_weight") {
    out.action = {ActionKind::kRemoveWeight, 0.0};
  } else if (input.action == "force") {
    if (!std::isfinite(input.value)) {
      throw Error(ErrorKind::kProtocol, "input: force value must be finite");
    }
    const double direction = input.value > 0.0 ? 1.0 : (input.value < 0.0 ? -1.0 : 0.0);
    out.action = {ActionKind::kForceCommand, direction * force_level};
  } else {
    throw Error(ErrorKind::kProtocol, "input: unknown action '" + input.action + "'");
  }
  out.apply_period = static_cast<std::int64_t>(std::ceil(t / control_period - kTimeSlack));
  return out;
}

}  // namespace whmc::human
