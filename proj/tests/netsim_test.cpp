#include <gtest/gtest.h>

#include <algorithm>

#include "bferl/netsim.hpp"

using namespace bferl;

namespace {

TEST(Config, ParsesAllKeys) {
  SimConfig c = parse_config(R"(# comment
n_vehicles = 4
n_rsus = 2
ecus_per_vehicle = 30
n_rounds = 5
seed = 77
link_latency_ms = 20
subset_size = 4
force_attacked_ecu = true
attack = FakeData,1,2
attack = Replay, 3, 1   # trailing comment
maintenance = 0,1,7
)");
  EXPECT_EQ(c.n_vehicles, 4u);
  EXPECT_EQ(c.n_rsus, 2u);
  EXPECT_EQ(c.ecus_per_vehicle, 30u);
  EXPECT_EQ(c.n_rounds, 5u);
  EXPECT_EQ(c.seed, 77u);
  EXPECT_EQ(c.link_latency_ms, 20u);
  EXPECT_EQ(c.subset_size, 4u);
  EXPECT_TRUE(c.force_attacked_ecu);
  ASSERT_EQ(c.attacks.size(), 2u);
  EXPECT_EQ(c.attacks[1].kind, AttackKind::Replay);
  EXPECT_EQ(c.attacks[1].target, 3u);
  ASSERT_EQ(c.maintenance.size(), 1u);
  EXPECT_EQ(c.maintenance[0].ecu, 7u);
  EXPECT_EQ(parse_config(format_config(c)).attacks.size(), 2u);
  EXPECT_EQ(format_config(parse_config(format_config(c))), format_config(c));
}

TEST(Config, Rejections) {
  for (const char* bad : {"n_vehicles = 0", "bogus = 1", "n_rsus = x", "link_latency_ms = 101",
                          "attack = Replay,0,0", "attack = Nope,0,1", "attack = FakeData,10,1",
                          "maintenance = 0,1,8", "n_rounds", "force_attacked_ecu = maybe"})
    EXPECT_THROW(parse_config(bad), ConfigError) << bad;
  EXPECT_THROW(load_config("/nonexistent/cfg"), ConfigError);
}

TEST(Queue, OrdersByTimeThenKindThenSubject) {
  EventQueue q;
  q.schedule({10, EventKind::Report, 0, 0});
  q.schedule({10, EventKind::Arrival, 2, 0});
  q.schedule({5, EventKind::Arrival, 9, 0});
  q.schedule({10, EventKind::Arrival, 1, 0});
  q.schedule({10, EventKind::Arrival, 1, 0});
  std::vector<std::pair<Millis, std::size_t>> order;
  while (auto ev = q.pop()) order.emplace_back(ev->fire_ts, ev->subject);
  std::vector<std::pair<Millis, std::size_t>> want{{5, 9}, {10, 1}, {10, 1}, {10, 2}, {10, 0}};
  EXPECT_EQ(order, want);
  EXPECT_EQ(q.now(), 10u);
}

TEST(Queue, RefusesThePast) {
  EventQueue q;
  q.schedule({5, EventKind::Arrival, 0, 0});
  q.pop();
  EXPECT_THROW(q.schedule({3, EventKind::Arrival, 0, 0}), std::logic_error);
  EXPECT_NO_THROW(q.schedule({5, EventKind::Arrival, 0, 0}));
}

TEST(World, RegistersEveryVehicle) {
  SimConfig c;
  World w = build_world(c);
  EXPECT_EQ(w.registered, 10u);
  EXPECT_EQ(w.vehicles.size(), 10u);
  EXPECT_EQ(w.rsus.size(), 5u);
  EXPECT_EQ(w.lower.block_count(), 10u);
  EXPECT_TRUE(w.lower.validate());
  for (const auto& v : w.vehicles) {
    EXPECT_EQ(v.route.size(), c.n_rounds);
    EXPECT_EQ(v.ecu_state.size(), c.ecus_per_vehicle);
  }
  std::set<std::int64_t> slots;
  for (const auto& r : w.rsus) slots.insert(r.slot);
  EXPECT_EQ(slots.size(), w.rsus.size());
}

TEST(Run, HonestRunIsAllValid) {
  SimConfig c;
  World w = build_world(c);
  RunResult r = run(w);
  EXPECT_EQ(r.summary.encounters, 30u);
  EXPECT_EQ(r.summary.count(Verdict::Valid), 30u);
  EXPECT_EQ(r.summary.reports, 0u);
  EXPECT_TRUE(r.summary.ledgers_valid);
  for (const auto& p : w.lower.creation_order()) EXPECT_LE(w.lower.lookup(p)->entries.size(), 2u);
  // Genesis + 3 records per vehicle, two retained.
  EXPECT_EQ(r.summary.archived_entries, 20u);
}

TEST(Run, LogIsTimeOrdered) {
  SimConfig c;
  c.attacks = {{AttackKind::FakeData, 2, 1}};
  c.maintenance = {{4, 1, 3}};
  c.link_latency_ms = 40;
  World w = build_world(c);
  RunResult r = run(w);
  EXPECT_TRUE(std::is_sorted(r.log.begin(), r.log.end(),
                             [](const LogEvent& a, const LogEvent& b) { return a.ts < b.ts; }));
}

TEST(Run, SameConfigSameLogAndLedger) {
  SimConfig c;
  c.n_vehicles = 12;
  c.seed = 5;
  c.attacks = {{AttackKind::Sybil, 1, 1}, {AttackKind::Replay, 3, 2}};
  c.maintenance = {{0, 1, 2}};
  World a = build_world(c), b = build_world(c);
  RunResult ra = run(a), rb = run(b);
  EXPECT_EQ(format_event_log(ra.log), format_event_log(rb.log));
  EXPECT_EQ(a.lower.serialize(), b.lower.serialize());

  c.seed = 6;
  World d = build_world(c);
  run(d);
  EXPECT_NE(a.lower.serialize(), d.lower.serialize());
}

// Every scheduled encounter shows up exactly once, as an arrival or a refusal.
TEST(Run, EncounterConservation) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SimConfig c;
    c.seed = seed;
    c.n_rounds = 4;
    c.attacks = {{AttackKind::FakeData, seed % 10, 1}, {AttackKind::Masquerade, (seed + 3) % 10, 2}};
    World w = build_world(c);
    RunResult r = run(w);
    const std::size_t expected = c.n_vehicles * c.n_rounds + (c.n_rounds - 2);  // fake joins at round 2
    ASSERT_EQ(r.summary.encounters + r.summary.refused, expected) << seed;
    std::size_t sum = 0;
    for (auto n : r.summary.verdicts) sum += n;
    ASSERT_EQ(sum, r.summary.encounters);
    auto arrivals = std::count_if(r.log.begin(), r.log.end(), [](const LogEvent& e) {
      return e.kind == LogKind::Arrival || e.kind == LogKind::Refused;
    });
    ASSERT_EQ(static_cast<std::size_t>(arrivals), expected);
  }
}

TEST(Run, RevokedVehiclesAreRefusedAfterReport) {
  SimConfig c;
  c.n_rounds = 4;
  c.link_latency_ms = 100;
  c.attacks = {{AttackKind::CodeInjection, 0, 1}};
  World w = build_world(c);
  RunResult r = run(w);
  std::vector<std::string> v0;
  for (const auto& e : r.log)
    if (e.subject == 0 && (e.kind == LogKind::Arrival || e.kind == LogKind::Refused))
      v0.push_back(e.kind == LogKind::Refused ? "refused" : e.detail);
  EXPECT_EQ(v0, (std::vector<std::string>{"Valid", "StateMismatch", "refused", "refused"}));
  EXPECT_EQ(r.summary.revoked, 1u);
  EXPECT_EQ(r.summary.reports, 1u);
}

TEST(EventLog, TabSeparated) {
  EventLog log{{1000, LogKind::Arrival, 3, "Valid"}, {1750, LogKind::Attack, 2, "Sybil"}};
  EXPECT_EQ(format_event_log(log), "1000\tarrival\t3\tValid\n1750\tattack\t2\tSybil\n");
}

}  // namespace
