#include "whmc/scenario_io.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "whmc/error.hpp"

namespace whmc::io {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw Error(ErrorKind::kConfig, (path.empty() ? std::string("<root>") : path) + ": " + why);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

template <typename E>
struct EnumTable {
  std::vector<std::pair<const char*, E>> entries;

  E parse(const Json& j, const std::string& path) const {
    if (!j.is_string()) fail(path, "expected a string");
    const auto s = j.get<std::string>();
    for (const auto& [name, value] : entries) {
      if (s == name) return value;
    }
    fail(path, "unknown value '" + s + "'");
  }
  const char* name(E v) const {
    for (const auto& [name, value] : entries) {
      if (value == v) return name;
    }
    return "unknown";
  }
};

const EnumTable<DecisionMaker> kDecisionMakers{{{"machine_only", DecisionMaker::kMachineOnly},
                                                {"human_only", DecisionMaker::kHumanOnly},
                                                {"whmc", DecisionMaker::kWhmc}}};
const EnumTable<Topology> kTopologies{{{"symbiosis", Topology::kSymbiosis},
                                       {"machine_dominated", Topology::kMachineDominated},
                                       {"human_dominated", Topology::kHumanDominated}}};
const EnumTable<InfoStructure> kInfo{{{"ignorance", InfoStructure::kIgnorance},
                                      {"awareness", InfoStructure::kAwareness},
                                      {"trustworthiness", InfoStructure::kTrustworthiness}}};
const EnumTable<human::AttentionMode> kAttentionModes{
    {{"always_engaged", human::AttentionMode::kAlwaysEngaged},
     {"always_distracted", human::AttentionMode::kAlwaysDistracted},
     {"markov", human::AttentionMode::kMarkov}}};
const EnumTable<human::Attention> kAttention{{{"engaged", human::Attention::kEngaged},
                                              {"distracted", human::Attention::kDistracted}}};
const EnumTable<control::LossPolicyKind> kLossPolicies{
    {{"zero_input", control::LossPolicyKind::kZeroInput},
     {"hold_last", control::LossPolicyKind::kHoldLast}}};
const EnumTable<dynamics::DisturbanceKind> kDisturbances{
    {{"attach_weight", dynamics::DisturbanceKind::kAttachWeight},
     {"remove_weight", dynamics::DisturbanceKind::kRemoveWeight}}};

double as_double(const Json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

bool as_bool(const Json& j, const std::string& path) {
  if (!j.is_boolean()) fail(path, "expected a boolean");
  return j.get<bool>();
}

std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

// Visits every key of an object, rejecting keys without a handler.
using Handlers = std::map<std::string, std::function<void(const Json&, const std::string&)>>;

void visit(const Json& j, const std::string& path, const Handlers& handlers) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    const auto it = handlers.find(key);
    if (it == handlers.end()) fail(join(path, key), "unknown key");
    it->second(value, join(path, key));
  }
}

auto number_into(double& target) {
  return [&target](const Json& j, const std::string& p) { target = as_double(j, p); };
}

void parse_link(const Json& j, const std::string& path, wireless::LinkConfig& link) {
  visit(j, path,
        {{"transmit_power_dbm", number_into(link.transmit_power_dbm)},
         {"noise_power_dbm", number_into(link.noise_power_dbm)},
         {"carrier_frequency_hz", number_into(link.carrier_frequency_hz)},
         {"distance_m", number_into(link.distance_m)},
         {"antenna_gain", number_into(link.antenna_gain)},
         {"path_loss_exponent", number_into(link.path_loss_exponent)},
         {"code_rate", number_into(link.code_rate)},
         {"packet_length",
          [&](const Json& v, const std::string& p) {
            if (!v.is_number_integer()) fail(p, "expected an integer");
            link.packet_length = v.get<int>();
          }},
         {"symbol_rate", number_into(link.symbol_rate)},
         {"ideal", [&](const Json& v, const std::string& p) { link.ideal = as_bool(v, p); }}});
}

Json link_json(const wireless::LinkConfig& l) {
  return Json{{"transmit_power_dbm", l.transmit_power_dbm},
              {"noise_power_dbm", l.noise_power_dbm},
              {"carrier_frequency_hz", l.carrier_frequency_hz},
              {"distance_m", l.distance_m},
              {"antenna_gain", l.antenna_gain},
              {"path_loss_exponent", l.path_loss_exponent},
              {"code_rate", l.code_rate},
              {"packet_length", l.packet_length},
              {"symbol_rate", l.symbol_rate},
              {"ideal", l.ideal}};
}

Scenario base_scenario() { return Scenario{}; }

}  // namespace

std::vector<std::string> preset_names() {
  return {"case-study-whmc", "fig5a", "fig5b-engaged", "fig5b-distracted"};
}

Scenario preset(std::string_view name) {
  Scenario s = base_scenario();
  if (name == "case-study-whmc" || name == "fig5a" || name == "fig5b-engaged") return s;
  if (name == "fig5b-distracted") {
    s.human.attention_mode = human::AttentionMode::kAlwaysDistracted;
    return s;
  }
  throw Error(ErrorKind::kConfig, "unknown preset '" + std::string(name) + "'");
}

Scenario parse_scenario(const Json& document) {
  if (!document.is_object()) fail("", "expected an object");
  Scenario s = preset("case-study-whmc");
  if (document.contains("preset")) {
    const auto name = as_string(document.at("preset"), "preset");
    try {
      s = preset(name);
    } catch (const Error&) {
      fail("preset", "unknown preset '" + name + "'");
    }
  }

  Handlers root{
      {"preset", [](const Json&, const std::string&) {}},
      {"decision_maker",
       [&](const Json& v, const std::string& p) { s.decision_maker = kDecisionMakers.parse(v, p); }},
      {"topology", [&](const Json& v, const std::string& p) { s.topology = kTopologies.parse(v, p); }},
      {"info_structure",
       [&](const Json& v, const std::string& p) { s.info_structure = kInfo.parse(v, p); }},
      {"plant",
       [&](const Json& v, const std::string& p) {
         visit(v, p,
               {{"cart_mass", number_into(s.plant.cart_mass)},
                {"pole_mass", number_into(s.plant.pole_mass)},
                {"pole_length", number_into(s.plant.pole_length)},
                {"weight_mass", number_into(s.plant.weight_mass)},
                {"gravity", number_into(s.plant.gravity)},
                {"force_limit", number_into(s.plant.force_limit)}});
       }},
      {"initial_state",
       [&](const Json& v, const std::string& p) {
         auto& st = s.initial_state;
         visit(v, p,
               {{"x", number_into(st.x)},
                {"x_dot", number_into(st.x_dot)},
                {"theta", number_into(st.theta)},
                {"theta_dot", number_into(st.theta_dot)},
                {"weight_present",
                 [&](const Json& b, const std::string& q) { st.weight_present = as_bool(b, q); }}});
       }},
      {"control",
       [&](const Json& v, const std::string& p) {
         auto& c = s.control;
         visit(v, p,
               {{"q",
                 [&](const Json& q, const std::string& qp) {
                   if (!q.is_array() || q.size() != 4) fail(qp, "expected an array of 4 numbers");
                   for (int i = 0; i < 4; ++i) {
                     c.weights.q_diagonal[i] = as_double(q[i], qp + "[" + std::to_string(i) + "]");
                   }
                 }},
                {"r", number_into(c.weights.r)},
                {"actuator_loss",
                 [&](const Json& x, const std::string& xp) { c.actuator_loss = kLossPolicies.parse(x, xp); }},
                {"estimate_loss",
                 [&](const Json& x, const std::string& xp) { c.estimate_loss = kLossPolicies.parse(x, xp); }}});
       }},
      {"links",
       [&](const Json& v, const std::string& p) {
         visit(v, p,
               {{"sensor_uplink",
                 [&](const Json& x, const std::string& xp) { parse_link(x, xp, s.links.sensor_uplink); }},
                {"actuator_downlink",
                 [&](const Json& x, const std::string& xp) { parse_link(x, xp, s.links.actuator_downlink); }},
                {"human_link",
                 [&](const Json& x, const std::string& xp) { parse_link(x, xp, s.links.human_link); }}});
       }},
      {"human",
       [&](const Json& v, const std::string& p) {
         auto& h = s.human;
         visit(v, p,
               {{"attention_mode",
                 [&](const Json& x, const std::string& xp) { h.attention_mode = kAttentionModes.parse(x, xp); }},
                {"p_engaged_to_distracted", number_into(h.p_engaged_to_distracted)},
                {"p_distracted_to_engaged", number_into(h.p_distracted_to_engaged)},
                {"initial_attention",
                 [&](const Json& x, const std::string& xp) { h.initial_attention = kAttention.parse(x, xp); }},
                {"reaction_delay", number_into(h.reaction_delay)},
                {"reaction_jitter", number_into(h.reaction_jitter)},
                {"control_period", number_into(h.control_period)},
                {"force_level", number_into(h.force_level)},
                {"angle_deadband", number_into(h.angle_deadband)}});
       }},
      {"disturbances",
       [&](const Json& v, const std::string& p) {
         if (!v.is_array()) fail(p, "expected an array");
         s.disturbances.clear();
         for (std::size_t i = 0; i < v.size(); ++i) {
           dynamics::DisturbanceEvent e;
           bool has_time = false;
           bool has_kind = false;
           const std::string ep = p + "[" + std::to_string(i) + "]";
           visit(v[i], ep,
                 {{"time",
                   [&](const Json& x, const std::string& xp) {
                     e.time = as_double(x, xp);
                     has_time = true;
                   }},
                  {"kind", [&](const Json& x, const std::string& xp) {
                     e.kind = kDisturbances.parse(x, xp);
                     has_kind = true;
                   }}});
           if (!has_time) fail(ep + ".time", "missing");
           if (!has_kind) fail(ep + ".kind", "missing");
           s.disturbances.push_back(e);
         }
       }},
      {"duration", number_into(s.duration)},
      {"control_period", number_into(s.control_period)},
      {"physics_substep", number_into(s.physics_substep)},
      {"min_transmit_power_dbm", number_into(s.min_transmit_power_dbm)},
      {"seed",
       [&](const Json& v, const std::string& p) {
         if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
           fail(p, "expected a non-negative integer");
         }
         s.master_seed = v.get<std::uint64_t>();
       }},
      {"metadata",
       [&](const Json& v, const std::string& p) {
         visit(v, p,
               {{"agent_multiplicity",
                 [&](const Json& x, const std::string& xp) { s.metadata.agent_multiplicity = as_string(x, xp); }},
                {"agent_geography",
                 [&](const Json& x, const std::string& xp) { s.metadata.agent_geography = as_string(x, xp); }}});
       }},
  };
  visit(document, "", root);
  s.validate();
  return s;
}

Scenario parse_scenario_text(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::kConfig, std::string("syntax error: ") + e.what());
  }
  return parse_scenario(doc);
}

Scenario load_scenario(const std::string& preset_or_path) {
  const auto names = preset_names();
  if (std::find(names.begin(), names.end(), preset_or_path) != names.end()) {
    return preset(preset_or_path);
  }
  std::ifstream in(preset_or_path);
  if (!in) {
    throw Error(ErrorKind::kConfig,
                "scenario '" + preset_or_path + "' is neither a preset nor a readable file");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario_text(buffer.str());
}

Json to_json(const Scenario& s) {
  Json disturbances = Json::array();
  for (const auto& e : s.disturbances) {
    disturbances.push_back({{"time", e.time}, {"kind", kDisturbances.name(e.kind)}});
  }
  const auto& q = s.control.weights.q_diagonal;
  return Json{
      {"decision_maker", kDecisionMakers.name(s.decision_maker)},
      {"topology", kTopologies.name(s.topology)},
      {"info_structure", kInfo.name(s.info_structure)},
      {"plant",
       {{"cart_mass", s.plant.cart_mass},
        {"pole_mass", s.plant.pole_mass},
        {"pole_length", s.plant.pole_length},
        {"weight_mass", s.plant.weight_mass},
        {"gravity", s.plant.gravity},
        {"force_limit", s.plant.force_limit}}},
      {"initial_state",
       {{"x", s.initial_state.x},
        {"x_dot", s.initial_state.x_dot},
        {"theta", s.initial_state.theta},
        {"theta_dot", s.initial_state.theta_dot},
        {"weight_present", s.initial_state.weight_present}}},
      {"control",
       {{"q", {q[0], q[1], q[2], q[3]}},
        {"r", s.control.weights.r},
        {"actuator_loss", kLossPolicies.name(s.control.actuator_loss)},
        {"estimate_loss", kLossPolicies.name(s.control.estimate_loss)}}},
      {"links",
       {{"sensor_uplink", link_json(s.links.sensor_uplink)},
        {"actuator_downlink", link_json(s.links.actuator_downlink)},
        {"human_link", link_json(s.links.human_link)}}},
      {"human",
       {{"attention_mode", kAttentionModes.name(s.human.attention_mode)},
        {"p_engaged_to_distracted", s.human.p_engaged_to_distracted},
        {"p_distracted_to_engaged", s.human.p_distracted_to_engaged},
        {"initial_attention", kAttention.name(s.human.initial_attention)},
        {"reaction_delay", s.human.reaction_delay},
        {"reaction_jitter", s.human.reaction_jitter},
        {"control_period", s.human.control_period},
        {"force_level", s.human.force_level},
        {"angle_deadband", s.human.angle_deadband}}},
      {"disturbances", disturbances},
      {"duration", s.duration},
      {"control_period", s.control_period},
      {"physics_substep", s.physics_substep},
      {"min_transmit_power_dbm", s.min_transmit_power_dbm},
      {"seed", s.master_seed},
      {"metadata",
       {{"agent_multiplicity", s.metadata.agent_multiplicity},
        {"agent_geography", s.metadata.agent_geography}}},
  };
}

std::uint64_t scenario_fingerprint(const Scenario& scenario) {
  Scenario copy = scenario;
  copy.master_seed = 0;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json(copy).dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Json to_json(const sim::QocReport& q) {
  auto opt = [](const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); };
  Json links = Json::object();
  const std::array<const char*, 3> names{"sensor_uplink", "actuator_downlink", "human_link"};
  for (std::size_t i = 0; i < 3; ++i) {
    links[names[i]] = {{"delivery_ratio", q.delivery_ratio[i]},
                       {"mean_consecutive_losses", q.mean_consecutive_losses[i]},
                       {"max_consecutive_losses", q.max_consecutive_losses[i]},
                       {"mean_snr_db", q.mean_snr_db[i]},
                       {"configured_snr_db", q.configured_snr_db[i]}};
  }
  return Json{
      {"task",
       {{"final_accumulated_cost", q.final_accumulated_cost},
        {"failed", q.failed},
        {"failure_time", opt(q.failure_time)},
        {"time_to_stabilize", opt(q.time_to_stabilize)}}},
      {"network",
       {{"links", links},
        {"mean_actuation_age_periods", q.mean_actuation_age},
        {"actuation_age_jitter_periods", q.actuation_age_jitter}}},
      {"human",
       {{"attention_duty_cycle", q.attention_duty_cycle},
        {"intervention_count", q.intervention_count},
        {"intervention_latency", opt(q.intervention_latency)}}},
  };
}

}  // namespace whmc::io
