#include "whmc/scenario.hpp"

#include <cmath>

#include "whmc/error.hpp"

namespace whmc {
namespace {

bool is_integer_multiple(double big, double small, double* ratio_out = nullptr) {
  const double ratio = big / small;
  const double rounded = std::round(ratio);
  if (ratio_out) *ratio_out = rounded;
  return rounded >= 1.0 && std::abs(ratio - rounded) < 1e-9 * std::max(1.0, ratio);
}

void fail(const std::string& message) { throw Error(ErrorKind::kConfig, message); }

}  // namespace

int Scenario::substeps_per_period() const {
  return static_cast<int>(std::lround(control_period / physics_substep));
}

std::int64_t Scenario::period_count() const {
  return static_cast<std::int64_t>(std::llround(duration / control_period));
}

void Scenario::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) fail("duration must be > 0");
  if (!(control_period > 0.0)) fail("control_period must be > 0");
  if (!(physics_substep > 0.0)) fail("physics_substep must be > 0");
  if (!is_integer_multiple(control_period, physics_substep)) {
    fail("control_period must be an integer multiple of physics_substep");
  }
  if (!is_integer_multiple(duration, control_period)) {
    fail("duration must be an integer multiple of control_period");
  }
  if (!is_integer_multiple(human.control_period, control_period)) {
    fail("human.control_period must be an integer multiple of control_period");
  }
  plant.validate();
  if (!initial_state.finite()) fail("initial_state must be finite");
  human.validate();
  for (double q : control.weights.q_diagonal) {
    if (!(q >= 0.0) || !std::isfinite(q)) fail("control.q must be finite and >= 0");
  }
  if (!(control.weights.r > 0.0)) fail("control.r must be > 0");
  for (const auto* link : links.all()) {
    const std::string path = std::string("links.") + wireless::to_string(link->name);
    link->validate(path, min_transmit_power_dbm);
    if (link->airtime() > control_period * (1.0 + 1e-9)) {
      fail(path + ".packet_length does not fit in one control period at symbol_rate");
    }
  }
  for (std::size_t i = 0; i < disturbances.size(); ++i) {
    const double t = disturbances[i].time;
    if (!(t >= 0.0) || !std::isfinite(t)) {
      fail("disturbances[" + std::to_string(i) + "].time must be >= 0");
    }
  }
}

const char* to_string(DecisionMaker v) {
  switch (v) {
    case DecisionMaker::kMachineOnly: return "machine_only";
    case DecisionMaker::kHumanOnly: return "human_only";
    case DecisionMaker::kWhmc: return "whmc";
  }
  return "unknown";
}

const char* to_string(Topology v) {
  switch (v) {
    case Topology::kSymbiosis: return "symbiosis";
    case Topology::kMachineDominated: return "machine_dominated";
    case Topology::kHumanDominated: return "human_dominated";
  }
  return "unknown";
}

const char* to_string(InfoStructure v) {
  switch (v) {
    case InfoStructure::kIgnorance: return "ignorance";
    case InfoStructure::kAwareness: return "awareness";
    case InfoStructure::kTrustworthiness: return "trustworthiness";
  }
  return "unknown";
}

}  // namespace whmc
