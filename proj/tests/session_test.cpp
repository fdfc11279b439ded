#include <chrono>
#include <numbers>

#include "doctest.h"
#include "whmc/orchestrator.hpp"
#include "whmc/session.hpp"

using namespace whmc;
using namespace whmc::session;

namespace {

struct Client {
  Session session{"test"};
  std::int64_t seq = 0;
  std::vector<Json> send(Json m) {
    m["seq"] = ++seq;
    return session.handle(m);
  }
};

Client configured(Json configure = Json::object()) {
  Client c;
  c.send({{"type", "hello"}});
  configure["type"] = "configure";
  if (!configure.contains("scenario")) configure["scenario"] = "case-study-whmc";
  auto r = c.send(configure);
  REQUIRE(r.size() == 1);
  REQUIRE(r[0]["type"] == "configure");
  return c;
}

void check_error(const std::vector<Json>& replies, const std::string& code) {
  REQUIRE(replies.size() == 1);
  CHECK(replies[0]["type"] == "error");
  CHECK(replies[0]["code"] == code);
}

}  // namespace

TEST_CASE("handshake and first state") {
  Client c;
  const auto hello = c.send({{"type", "hello"}});
  REQUIRE(hello.size() == 1);
  CHECK(hello[0]["type"] == "hello");
  CHECK(hello[0]["protocol"] == kProtocolVersion);
  CHECK(hello[0]["presets"].size() == 4);
  CHECK(c.session.phase() == Phase::kGreeted);

  const auto cfg = c.send({{"type", "configure"}, {"scenario", "case-study-whmc"}, {"seed", 3}});
  REQUIRE(cfg.size() == 1);
  CHECK(cfg[0]["scenario"]["seed"] == 3);
  CHECK(c.session.phase() == Phase::kConfigured);

  const auto start = c.send({{"type", "start"}});
  REQUIRE(start.size() == 2);
  CHECK(start[0]["type"] == "start");
  const Json& s = start[1];
  CHECK(s["type"] == "state");
  CHECK(s["t"] == 0.0);
  CHECK(s["theta"].get<double>() == doctest::Approx(std::numbers::pi / 6).epsilon(1e-15));
  CHECK(s["completed_periods"] == 0);
  CHECK(c.session.phase() == Phase::kRunning);
}

TEST_CASE("outgoing seq increases by one") {
  Client c = configured();
  std::vector<Json> all;
  for (auto& m : c.send({{"type", "start"}})) all.push_back(m);
  for (int i = 0; i < 20; ++i) {
    for (auto& m : c.session.tick()) all.push_back(m);
  }
  for (std::size_t i = 1; i < all.size(); ++i) {
    CHECK(all[i]["seq"].get<std::int64_t>() == all[i - 1]["seq"].get<std::int64_t>() + 1);
  }
  // decimation 2: a state every second period
  CHECK(all.size() == 2 + 10);
}

TEST_CASE("rejected messages leave the session unchanged") {
  Client c;
  check_error(c.send({{"type", "start"}}), "out_of_order");
  CHECK(c.session.phase() == Phase::kConnected);
  check_error(c.session.handle_message("{not json"), "malformed");
  check_error(c.session.handle(Json{{"type", "hello"}}), "malformed");
  check_error(c.send({{"type", "dance"}}), "unknown_type");
  check_error(c.send({{"type", "state"}}), "out_of_order");
  CHECK(c.session.phase() == Phase::kConnected);

  c.send({{"type", "hello"}});
  check_error(c.session.handle(Json{{"type", "hello"}, {"seq", c.seq}}), "sequence");
  check_error(c.send({{"type", "configure"}, {"scenario", "no-such-preset"}}), "configuration");
  check_error(c.send({{"type", "configure"}, {"scenario", {{"plant", {{"cart_mass", -1}}}}}}),
              "configuration");
  CHECK(c.session.phase() == Phase::kGreeted);
  check_error(c.send({{"type", "input"}, {"action", "remove_weight"}}), "out_of_order");
  check_error(c.send({{"type", "report"}}), "out_of_order");
}

TEST_CASE("input acks carry the apply period") {
  Client c = configured();
  c.send({{"type", "start"}});
  for (int i = 0; i < 7; ++i) c.session.tick();
  const auto ack = c.send({{"type", "input"}, {"action", "remove_weight"}, {"client_ts", 123.5}});
  REQUIRE(ack.size() == 1);
  CHECK(ack[0]["type"] == "input");
  CHECK(ack[0]["apply_period"] == 7);
  CHECK(ack[0]["apply_t"].get<double>() == doctest::Approx(0.07));
  CHECK(ack[0]["client_seq"] == c.seq);
  CHECK(ack[0]["client_ts"] == 123.5);
  check_error(c.send({{"type", "input"}, {"action", "jump"}}), "protocol");
  check_error(c.send({{"type", "input"}}), "malformed");
  CHECK(c.session.input_log().size() == 1);
}

TEST_CASE("remove_weight with no weight present leaves the plant alone") {
  Client a = configured({{"seed", 2}});
  Client b = configured({{"seed", 2}});
  a.send({{"type", "start"}});
  b.send({{"type", "start"}});
  a.send({{"type", "input"}, {"action", "remove_weight"}});
  for (int i = 0; i < 100; ++i) {
    a.session.tick();
    b.session.tick();
  }
  CHECK(a.session.accumulated_cost() == b.session.accumulated_cost());
}

TEST_CASE("pause, resume and end") {
  Client c = configured();
  c.send({{"type", "start"}});
  c.session.tick();
  const auto p = c.send({{"type", "pause"}});
  CHECK(p[0]["type"] == "pause");
  CHECK(c.session.tick().empty());
  CHECK(c.session.completed_periods() == 1);
  check_error(c.send({{"type", "input"}, {"action", "remove_weight"}}), "out_of_order");
  CHECK(c.send({{"type", "resume"}})[0]["type"] == "resume");
  c.session.tick();
  const auto end = c.send({{"type", "end"}});
  REQUIRE(end.size() == 2);
  CHECK(end[0]["type"] == "report");
  CHECK(end[1]["type"] == "end");
  CHECK(end[1]["reason"] == "client");
  CHECK(c.session.phase() == Phase::kEnded);
  CHECK(c.send({{"type", "report"}})[0]["type"] == "report");
  check_error(c.send({{"type", "end"}}), "out_of_order");
}

TEST_CASE("batch mode runs to completion in one tick") {
  Client c = configured({{"pacing", 0}, {"seed", 5}});
  const auto start = c.send({{"type", "start"}});
  CHECK(start.size() == 1);
  const auto done = c.session.tick();
  REQUIRE(done.size() == 2);
  CHECK(done[1]["reason"] == "completed");
  Scenario s = c.session.scenario();
  const auto offline = sim::run_scenario(s, sim::LiveInputLog{});
  CHECK(done[1]["accumulated_cost"].get<double>() == offline.final_cost());
}

TEST_CASE("a recorded session replays offline") {
  Client c = configured({{"seed", 11}});
  c.send({{"type", "start"}});
  std::int64_t ticks = 0;
  while (c.session.phase() != Phase::kEnded) {
    if (ticks == 540) c.send({{"type", "input"}, {"action", "remove_weight"}});
    if (ticks == 900) c.send({{"type", "input"}, {"action", "force"}, {"value", 1}});
    c.session.tick();
    ++ticks;
  }
  const auto& live = *c.session.result();
  const auto replay = sim::run_scenario(c.session.scenario(), c.session.input_log());
  REQUIRE(live.records.size() == replay.records.size());
  for (std::size_t k = 0; k < live.records.size(); ++k) {
    CHECK(live.records[k].true_state == replay.records[k].true_state);
  }
}

TEST_CASE("interleaved sessions stay isolated") {
  Client a = configured({{"seed", 4}});
  Client b = configured({{"seed", 4}});
  Client solo = configured({{"seed", 4}});
  for (Client* c : {&a, &b, &solo}) c->send({{"type", "start"}});
  for (int i = 0; i < 300; ++i) {
    a.session.tick();
    if (i % 3 == 0) b.session.tick();
  }
  while (b.session.completed_periods() < 300) b.session.tick();
  for (int i = 0; i < 300; ++i) solo.session.tick();
  CHECK(a.session.accumulated_cost() == solo.session.accumulated_cost());
  CHECK(b.session.accumulated_cost() == solo.session.accumulated_cost());
}

TEST_CASE("pacer deadlines") {
  using namespace std::chrono;
  const Pacer::Clock::time_point t0{};
  Pacer real(0.01, 1.0, t0);
  CHECK(real.next_deadline() - t0 == milliseconds(10));
  for (int i = 0; i < 100; ++i) real.on_tick();
  CHECK(real.next_deadline() - t0 == milliseconds(1010));

  Pacer half(0.01, 0.5, t0);
  half.on_tick();
  CHECK(half.next_deadline() - t0 == milliseconds(40));

  Pacer fast(0.01, 4.0, t0);
  CHECK(fast.next_deadline() - t0 == microseconds(2500));

  Pacer batch(0.01, 0.0, t0);
  CHECK(batch.free_running());
  CHECK(batch.next_deadline() == t0);

  // A pause rebases: the next deadline is one interval after the resume.
  const auto resume = t0 + seconds(5);
  real.rebase(resume);
  CHECK(real.next_deadline() - resume == milliseconds(10));
  CHECK(real.ticks() == 100);
}

TEST_CASE("inputs take effect strictly after the state they answer") {
  Client c = configured({{"seed", 1}, {"decimation", 1}});
  c.send({{"type", "start"}});
  Json last_state;
  while (c.session.completed_periods() < 520) {
    for (auto& m : c.session.tick()) {
      if (m["type"] == "state") last_state = m;
    }
  }
  const std::int64_t seen = last_state["completed_periods"].get<std::int64_t>();
  const auto ack = c.send({{"type", "input"}, {"action", "remove_weight"}});
  CHECK(ack[0]["apply_period"].get<std::int64_t>() >= seen);
  while (c.session.phase() != Phase::kEnded) c.session.tick();
  for (const auto& rec : c.session.result()->records) {
    for (const auto& a : rec.delivered_human_actions) {
      if (a.kind == human::ActionKind::kRemoveWeight) CHECK(rec.period > seen);
    }
  }
}
