#include <cmath>

#include "doctest.h"
#include "whmc/error.hpp"
#include "whmc/human.hpp"

using namespace whmc;
using namespace whmc::human;

namespace {

HumanObservation view(double theta, bool weight) {
  HumanObservation o;
  o.plant = dynamics::PlantState{0.0, 0.0, theta, 0.0, weight};
  return o;
}

}  // namespace

TEST_CASE("engaged operator removes the weight after the reaction delay") {
  const HumanParams params;
  RngStream rng(0, "human_reaction");
  HumanState s = initial_state(params);
  std::optional<double> removed_at;
  // Decision instants fall on a 0.3 s grid starting at the first update.
  for (int k = 0; k <= 800 && !removed_at; ++k) {
    const double t = k * 0.01;
    const auto r = human_step(s, view(0.01, t >= 5.0 - 1e-9), params, t, false, rng);
    s = r.state;
    for (const auto& a : r.actions) {
      if (a.kind == ActionKind::kRemoveWeight) removed_at = t;
    }
  }
  REQUIRE(removed_at);
  CHECK(*removed_at >= 5.25 - 1e-9);
  CHECK(*removed_at == doctest::Approx(5.4));
  CHECK(s.intervention_sent);
}

TEST_CASE("remove_weight is emitted once per attach") {
  const HumanParams params;
  RngStream rng(0, "human_reaction");
  HumanState s = initial_state(params);
  int removals = 0;
  for (int k = 0; k < 300; ++k) {
    const double t = k * 0.01;
    const auto r = human_step(s, view(0.0, true), params, t, false, rng);
    s = r.state;
    for (const auto& a : r.actions) removals += a.kind == ActionKind::kRemoveWeight;
  }
  CHECK(removals == 1);
  // A weight-free view re-arms the operator.
  s = human_step(s, view(0.0, false), params, 3.0, false, rng).state;
  CHECK_FALSE(s.weight_noticed_at);
  CHECK_FALSE(s.intervention_sent);
}

TEST_CASE("distracted operator never acts") {
  HumanParams params;
  params.attention_mode = AttentionMode::kAlwaysDistracted;
  RngStream rng(0, "human_reaction");
  HumanState s = initial_state(params);
  for (int k = 0; k < 1000; ++k) {
    const auto r = human_step(s, view(0.5, true), params, k * 0.01, true, rng);
    s = r.state;
    for (const auto& a : r.actions) {
      CHECK(a.kind == ActionKind::kForceCommand);
      CHECK(a.force == 0.0);
    }
  }
}

TEST_CASE("lost observations keep the last view") {
  const HumanParams params;
  RngStream rng(0, "human_reaction");
  HumanState s = initial_state(params);
  s = human_step(s, view(0.3, false), params, 0.0, true, rng).state;
  const auto r = human_step(s, HumanObservation{}, params, 0.3, true, rng);
  REQUIRE(r.actions.size() == 1);
  CHECK(r.actions[0].force == params.force_level);
}

TEST_CASE("force commands follow the decision grid and deadband") {
  const HumanParams params;
  RngStream rng(0, "human_reaction");
  HumanState s = initial_state(params);
  int decisions = 0;
  for (int k = 0; k < 300; ++k) {
    const auto r = human_step(s, view(-0.2, false), params, k * 0.01, true, rng);
    s = r.state;
    if (!r.actions.empty()) {
      ++decisions;
      CHECK(r.actions[0].force == -params.force_level);
    }
  }
  CHECK(decisions == 10);
  CHECK(human_force_for(0.05, params) == 0.0);
  CHECK(human_force_for(-0.05, params) == 0.0);
  CHECK(human_force_for(0.0501, params) == 60.0);
}

TEST_CASE("Markov attention has the right stationary fraction") {
  HumanParams params;
  params.attention_mode = AttentionMode::kMarkov;
  params.p_engaged_to_distracted = 0.3;
  params.p_distracted_to_engaged = 0.6;
  const double dt = 0.01;
  const double a = -std::expm1(-0.3 * dt);
  const double b = -std::expm1(-0.6 * dt);
  const double pi_engaged = b / (a + b);
  const double lambda = 1.0 - a - b;

  RngStream rng(3, "human_attention");
  HumanState s = initial_state(params);
  const int n = 1000000;
  int engaged = 0;
  for (int i = 0; i < n; ++i) {
    s = attention_transition(s, params, dt, rng);
    engaged += s.attention == Attention::kEngaged;
  }
  const double var = pi_engaged * (1.0 - pi_engaged) / n * (1.0 + lambda) / (1.0 - lambda);
  CHECK(std::abs(static_cast<double>(engaged) / n - pi_engaged) < 3.0 * std::sqrt(var));
}

TEST_CASE("fixed attention modes ignore the rates") {
  HumanParams params;
  params.p_engaged_to_distracted = 1.0;
  RngStream rng(0, "human_attention");
  HumanState s = initial_state(params);
  for (int i = 0; i < 100; ++i) s = attention_transition(s, params, 0.01, rng);
  CHECK(s.attention == Attention::kEngaged);
}

TEST_CASE("live_input_adapter") {
  const auto r = live_input_adapter({"remove_weight", 0.0}, 1.234, 0.01, 60.0);
  CHECK(r.apply_period == 124);
  CHECK(r.action.kind == ActionKind::kRemoveWeight);
  CHECK(live_input_adapter({"remove_weight", 0.0}, 1.23, 0.01, 60.0).apply_period == 123);
  const auto f = live_input_adapter({"force", -0.2}, 0.0, 0.01, 60.0);
  CHECK(f.action == HumanAction{ActionKind::kForceCommand, -60.0});
  CHECK(f.apply_period == 0);
  CHECK_THROWS_AS(live_input_adapter({"jump", 0.0}, 0.0, 0.01, 60.0), Error);
  CHECK_THROWS_AS(live_input_adapter({"force", NAN}, 0.0, 0.01, 60.0), Error);
}

TEST_CASE("HumanParams validation") {
  HumanParams p;
  p.reaction_jitter = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = HumanParams{};
  p.control_period = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
}
