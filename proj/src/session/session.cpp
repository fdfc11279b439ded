#include "whmc/session.hpp"

#include <cmath>

#include "whmc/error.hpp"
#include "whmc/human.hpp"
#include "whmc/scenario_io.hpp"
#include "whmc/wireless.hpp"

namespace whmc::session {

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::kConnected: return "connected";
    case Phase::kGreeted: return "greeted";
    case Phase::kConfigured: return "configured";
    case Phase::kRunning: return "running";
    case Phase::kPaused: return "paused";
    case Phase::kEnded: return "ended";
  }
  return "unknown";
}

Session::Session(std::string id) : id_(std::move(id)) {}

double Session::control_period() const {
  return sim_ ? sim_->scenario().control_period : 0.01;
}

const Scenario& Session::scenario() const {
  if (!sim_) throw Error(ErrorKind::kProtocol, "session is not configured");
  return sim_->scenario();
}

const sim::LiveInputLog& Session::input_log() const {
  if (!sim_) throw Error(ErrorKind::kProtocol, "session is not configured");
  return sim_->live_log();
}

double Session::accumulated_cost() const { return sim_ ? sim_->accumulated_cost() : 0.0; }

std::int64_t Session::completed_periods() const { return sim_ ? sim_->period() : 0; }

Json Session::out(Json message) {
  message["seq"] = ++out_seq_;
  return message;
}

Json Session::error(const std::string& code, const std::string& message) {
  return out({{"type", "error"}, {"code", code}, {"message", message}, {"phase", to_string(phase_)}});
}

std::vector<Json> Session::handle_message(std::string_view text) {
  Json message;
  try {
    message = Json::parse(text);
  } catch (const Json::parse_error& e) {
    return {error("malformed", std::string("malformed JSON: ") + e.what())};
  }
  return handle(message);
}

std::vector<Json> Session::handle(const Json& m) {
  if (!m.is_object() || !m.contains("type") || !m["type"].is_string()) {
    return {error("malformed", "message must be an object with a string \"type\"")};
  }
  if (!m.contains("seq") || !m["seq"].is_number_integer()) {
    return {error("malformed", "message must carry an integer \"seq\"")};
  }
  const auto seq = m["seq"].get<std::int64_t>();
  if (in_seq_ && seq <= *in_seq_) {
    return {error("sequence", "seq " + std::to_string(seq) + " is not greater than " +
                                  std::to_string(*in_seq_))};
  }

  const auto type = m["type"].get<std::string>();
  std::vector<Json> replies;
  try {
    if (type == "hello") replies = on_hello(m);
    else if (type == "configure") replies = on_configure(m);
    else if (type == "start") replies = on_start(m);
    else if (type == "pause") replies = on_pause(m);
    else if (type == "resume") replies = on_resume(m);
    else if (type == "input") replies = on_input(m);
    else if (type == "report") replies = on_report(m);
    else if (type == "end") replies = on_end(m);
    else if (type == "state" || type == "error") {
      return {error("out_of_order", "\"" + type + "\" is a server-only message")};
    } else {
      return {error("unknown_type", "unknown message type '" + type + "'")};
    }
  } catch (const Error& e) {
    return {error(e.kind() == ErrorKind::kConfig ? "configuration" : "protocol", e.what())};
  }
  // Only accepted messages consume a sequence number.
  if (replies.empty() || replies.front()["type"] != "error") in_seq_ = seq;
  return replies;
}

std::vector<Json> Session::on_hello(const Json&) {
  if (phase_ != Phase::kConnected) return {error("out_of_order", "hello already received")};
  phase_ = Phase::kGreeted;
  return {out({{"type", "hello"},
               {"session", id_},
               {"protocol", kProtocolVersion},
               {"presets", io::preset_names()}})};
}

std::vector<Json> Session::on_configure(const Json& m) {
  if (phase_ != Phase::kGreeted && phase_ != Phase::kConfigured) {
    return {error("out_of_order", std::string("configure not allowed while ") + to_string(phase_))};
  }
  Scenario scenario;
  const Json requested = m.value("scenario", Json("case-study-whmc"));
  if (requested.is_string()) {
    scenario = io::preset(requested.get<std::string>());
  } else {
    scenario = io::parse_scenario(requested);
  }
  if (m.contains("seed")) {
    const Json& seed = m["seed"];
    if (!seed.is_number_integer() || (!seed.is_number_unsigned() && seed.get<std::int64_t>() < 0)) {
      return {error("configuration", "seed must be a non-negative integer")};
    }
    scenario.master_seed = seed.get<std::uint64_t>();
  }
  double pacing = m.value("pacing", 1.0);
  int decimation = m.value("decimation", 2);
  if (!(pacing >= 0.0) || !std::isfinite(pacing)) return {error("configuration", "pacing must be >= 0")};
  if (decimation < 1) return {error("configuration", "decimation must be >= 1")};

  auto sim = std::make_unique<sim::Simulation>(scenario, /*live=*/true);
  sim_ = std::move(sim);
  pacing_factor_ = pacing;
  decimation_ = decimation;
  phase_ = Phase::kConfigured;
  return {out({{"type", "configure"},
               {"scenario", io::to_json(sim_->scenario())},
               {"pacing", pacing_factor_},
               {"decimation", decimation_},
               {"control_period", sim_->scenario().control_period}})};
}

std::vector<Json> Session::on_start(const Json&) {
  if (phase_ != Phase::kConfigured) {
    return {error("out_of_order", std::string("start not allowed while ") + to_string(phase_))};
  }
  phase_ = Phase::kRunning;
  std::vector<Json> replies{out({{"type", "start"}})};
  if (pacing_factor_ > 0.0) replies.push_back(out(state_message()));
  return replies;
}

std::vector<Json> Session::on_pause(const Json&) {
  if (phase_ != Phase::kRunning) {
    return {error("out_of_order", std::string("pause not allowed while ") + to_string(phase_))};
  }
  phase_ = Phase::kPaused;
  return {out({{"type", "pause"}, {"t", sim_->time()}})};
}

std::vector<Json> Session::on_resume(const Json&) {
  if (phase_ != Phase::kPaused) {
    return {error("out_of_order", std::string("resume not allowed while ") + to_string(phase_))};
  }
  phase_ = Phase::kRunning;
  return {out({{"type", "resume"}, {"t", sim_->time()}})};
}

std::vector<Json> Session::on_input(const Json& m) {
  if (phase_ != Phase::kRunning) {
    return {error("out_of_order", std::string("input not accepted while ") + to_string(phase_))};
  }
  if (!m.contains("action") || !m["action"].is_string()) {
    return {error("malformed", "input requires a string \"action\"")};
  }
  human::LiveInput input{m["action"].get<std::string>(), 0.0};
  if (m.contains("value")) {
    if (!m["value"].is_number()) return {error("malformed", "input \"value\" must be a number")};
    input.value = m["value"].get<double>();
  }
  const auto& s = sim_->scenario();
  const auto timed =
      human::live_input_adapter(input, sim_->time(), s.control_period, s.human.force_level);
  const auto period = sim_->queue_live_action(timed);
  Json ack{{"type", "input"},
           {"accepted", true},
           {"action", input.action},
           {"apply_period", period},
           {"apply_t", period * s.control_period}};
  if (m.contains("client_ts")) ack["client_ts"] = m["client_ts"];
  ack["client_seq"] = m["seq"];
  return {out(std::move(ack))};
}

std::vector<Json> Session::on_report(const Json&) {
  if (phase_ == Phase::kEnded && result_) {
    return {out({{"type", "report"}, {"qoc", io::to_json(result_->qoc)}, {"final", true}})};
  }
  if (!sim_) return {error("out_of_order", "report requires a configured session")};
  return {error("out_of_order", "report is available once the session has ended")};
}

std::vector<Json> Session::on_end(const Json&) {
  if (phase_ == Phase::kConnected || phase_ == Phase::kEnded) {
    return {error("out_of_order", std::string("end not allowed while ") + to_string(phase_))};
  }
  if (!sim_) {
    phase_ = Phase::kEnded;
    return {out({{"type", "end"}, {"reason", "client"}})};
  }
  return finish();
}

Json Session::state_message() const {
  const auto& st = sim_->plant_state();
  Json links = Json::object();
  Json snr = Json::object();
  const std::array<const char*, 3> names{"sensor_uplink", "actuator_downlink", "human_link"};
  const auto* last = sim_->last_record();
  for (std::size_t i = 0; i < 3; ++i) {
    links[names[i]] = last ? Json(last->packets[i].delivered) : Json(nullptr);
    snr[names[i]] = last && last->packets[i].instantaneous_snr > 0.0
                        ? Json(wireless::to_db(last->packets[i].instantaneous_snr))
                        : Json(nullptr);
  }
  return Json{{"type", "state"},
              {"t", sim_->time()},
              {"completed_periods", sim_->period()},
              {"x", st.x},
              {"x_dot", st.x_dot},
              {"theta", st.theta},
              {"theta_dot", st.theta_dot},
              {"weight_present", st.weight_present},
              {"accumulated_cost", sim_->accumulated_cost()},
              {"failed", sim_->failed()},
              {"delivered", links},
              {"snr_db", snr}};
}

std::vector<Json> Session::finish() {
  result_ = sim_->finish();
  phase_ = Phase::kEnded;
  return {out({{"type", "report"}, {"qoc", io::to_json(result_->qoc)}, {"final", true}}),
          out({{"type", "end"},
               {"reason", sim_->done() ? "completed" : "client"},
               {"accumulated_cost", result_->final_cost()},
               {"inputs", static_cast<std::int64_t>(sim_->live_log().size())}})};
}

std::vector<Json> Session::tick() {
  if (phase_ != Phase::kRunning) return {};
  std::vector<Json> messages;
  if (pacing_factor_ <= 0.0) {
    while (!sim_->done()) sim_->step();
    return finish();
  }
  sim_->step();
  if (sim_->period() % decimation_ == 0 || sim_->done()) messages.push_back(out(state_message()));
  if (sim_->done()) {
    for (auto& m : finish()) messages.push_back(std::move(m));
  }
  return messages;
}

Pacer::Pacer(double control_period, double pacing_factor, Clock::time_point start)
    : interval_(pacing_factor > 0.0
                    ? std::chrono::duration_cast<Clock::duration>(
                          std::chrono::duration<double>(control_period / pacing_factor))
                    : Clock::duration::zero()),
      pacing_factor_(pacing_factor),
      start_(start) {}

Pacer::Clock::time_point Pacer::next_deadline() const {
  if (free_running()) return start_;
  return start_ + interval_ * (ticks_ - base_ticks_ + 1);
}

void Pacer::rebase(Clock::time_point now) {
  start_ = now;
  base_ticks_ = ticks_;
}

}  // namespace whmc::session
