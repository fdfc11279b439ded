#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "whmc/orchestrator.hpp"
#include "whmc/scenario.hpp"

namespace whmc::session {

using Json = nlohmann::json;

enum class Phase { kConnected, kGreeted, kConfigured, kRunning, kPaused, kEnded };

const char* to_string(Phase phase);

inline constexpr int kProtocolVersion = 1;

/// Transport-independent protocol state machine for one live session. Every
/// outgoing message carries a per-session "seq" that increases by one; every
/// incoming message must carry a "seq" larger than the previous one.
///
///   client: hello -> configure -> start -> (input | pause | resume)* -> end
///   server: hello, configure, start, pause, resume, input (acks), state
///           stream, report, end, error
///
/// Rejected messages produce a single error reply and leave the session as it
/// was.
class Session {
 public:
  explicit Session(std::string id);

  std::vector<Json> handle_message(std::string_view text);
  std::vector<Json> handle(const Json& message);

  /// Advances one control period when running. Returns the state message when
  /// the period lands on the decimation grid, and report + end when the run
  /// finishes. With pacing_factor 0 a tick runs the whole scenario and streams
  /// nothing but the final report.
  std::vector<Json> tick();

  Phase phase() const { return phase_; }
  const std::string& id() const { return id_; }
  double pacing_factor() const { return pacing_factor_; }
  int decimation() const { return decimation_; }
  double control_period() const;
  bool has_simulation() const { return sim_ != nullptr; }
  const Scenario& scenario() const;
  const sim::LiveInputLog& input_log() const;
  double accumulated_cost() const;
  std::int64_t completed_periods() const;
  /// Final result once ended (the trace is moved out of the engine).
  const std::optional<sim::RunResult>& result() const { return result_; }

 private:
  Json out(Json message);
  Json error(const std::string& code, const std::string& message);
  Json state_message() const;
  std::vector<Json> finish();

  std::vector<Json> on_hello(const Json& m);
  std::vector<Json> on_configure(const Json& m);
  std::vector<Json> on_start(const Json& m);
  std::vector<Json> on_pause(const Json& m);
  std::vector<Json> on_resume(const Json& m);
  std::vector<Json> on_input(const Json& m);
  std::vector<Json> on_report(const Json& m);
  std::vector<Json> on_end(const Json& m);

  std::string id_;
  Phase phase_ = Phase::kConnected;
  std::int64_t out_seq_ = 0;
  std::optional<std::int64_t> in_seq_;
  double pacing_factor_ = 1.0;
  int decimation_ = 2;
  std::unique_ptr<sim::Simulation> sim_;
  std::optional<sim::RunResult> result_;
};

/// Wall-clock schedule for ticks. Deadlines are absolute (start + k * period /
/// pacing), so a late tick is executed immediately rather than skipped and
/// simulated time never drifts from the tick count.
class Pacer {
 public:
  using Clock = std::chrono::steady_clock;

  Pacer(double control_period, double pacing_factor, Clock::time_point start);

  bool free_running() const { return pacing_factor_ <= 0.0; }
  Clock::time_point next_deadline() const;
  void on_tick() { ++ticks_; }
  std::int64_t ticks() const { return ticks_; }
  /// Re-anchors after a pause so the stream resumes at the paced rate.
  void rebase(Clock::time_point now);

 private:
  Clock::duration interval_;
  double pacing_factor_;
  Clock::time_point start_;
  std::int64_t base_ticks_ = 0;
  std::int64_t ticks_ = 0;
};

}  // namespace whmc::session
