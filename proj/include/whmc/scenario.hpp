#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "whmc/control.hpp"
#include "whmc/dynamics.hpp"
#include "whmc/human.hpp"
#include "whmc/wireless.hpp"

namespace whmc {

enum class DecisionMaker { kMachineOnly, kHumanOnly, kWhmc };
enum class Topology { kSymbiosis, kMachineDominated, kHumanDominated };
enum class InfoStructure { kIgnorance, kAwareness, kTrustworthiness };

struct ControlConfig {
  control::LqrWeights weights;
  control::LossPolicyKind actuator_loss = control::LossPolicyKind::kZeroInput;
  // What the controller does with its state estimate when the uplink drops:
  // hold_last keeps the previous sample, zero_input substitutes the origin.
  control::LossPolicyKind estimate_loss = control::LossPolicyKind::kHoldLast;

  bool operator==(const ControlConfig& o) const {
    return weights.q_diagonal == o.weights.q_diagonal && weights.r == o.weights.r &&
           actuator_loss == o.actuator_loss && estimate_loss == o.estimate_loss;
  }
};

// Recorded only; no behavioural effect.
struct ScenarioMetadata {
  std::string agent_multiplicity = "single";
  std::string agent_geography = "distributed";

  bool operator==(const ScenarioMetadata&) const = default;
};

struct Links {
  wireless::LinkConfig sensor_uplink{wireless::LinkName::kSensorUplink};
  wireless::LinkConfig actuator_downlink{wireless::LinkName::kActuatorDownlink};
  wireless::LinkConfig human_link{wireless::LinkName::kHumanLink};

  std::array<const wireless::LinkConfig*, 3> all() const {
    return {&sensor_uplink, &actuator_downlink, &human_link};
  }
  std::array<wireless::LinkConfig*, 3> all() {
    return {&sensor_uplink, &actuator_downlink, &human_link};
  }
  bool operator==(const Links&) const = default;
};

struct Scenario {
  DecisionMaker decision_maker = DecisionMaker::kWhmc;
  Topology topology = Topology::kMachineDominated;
  InfoStructure info_structure = InfoStructure::kAwareness;
  dynamics::PlantParams plant;
  dynamics::PlantState initial_state{0.0, 0.0, 0.5235987755982988, 0.0, false};
  ControlConfig control;
  Links links;
  human::HumanParams human;
  std::vector<dynamics::DisturbanceEvent> disturbances{
      {5.0, dynamics::DisturbanceKind::kAttachWeight}};
  double duration = 30.0;
  double control_period = 0.01;
  double physics_substep = 0.001;
  double min_transmit_power_dbm = 20.0;
  std::uint64_t master_seed = 0;
  ScenarioMetadata metadata;

  int substeps_per_period() const;
  std::int64_t period_count() const;
  /// Throws kConfig with a path-qualified message.
  void validate() const;

  bool operator==(const Scenario&) const = default;
};

const char* to_string(DecisionMaker v);
const char* to_string(Topology v);
const char* to_string(InfoStructure v);

}  // namespace whmc
