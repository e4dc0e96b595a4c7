#include "bferl/adversary.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace bferl {

namespace {

EcuId pick_ecu(const World& world, std::size_t target, std::size_t round) {
  Rng rng = Rng::derive(world.config.seed, "attack-ecu/" + std::to_string(target), round);
  return rng.below(world.vehicles.at(target).ecu_state.size());
}

std::vector<EcuId> pick_ecus(const World& world, std::size_t target, std::size_t round, std::size_t want) {
  const std::size_t n = world.vehicles.at(target).ecu_state.size();
  Rng rng = Rng::derive(world.config.seed, "reversal-ecus/" + std::to_string(target), round);
  std::vector<EcuId> pool(n);
  std::iota(pool.begin(), pool.end(), EcuId{0});
  const std::size_t k = std::min(want, n);
  for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(n - i)]);
  pool.resize(k);
  return pool;
}

Bytes malicious_image(const World& world, std::string_view label, std::size_t target, std::size_t round) {
  Rng rng = Rng::derive(world.config.seed, label, target * 1'000'003 + round);
  return rng.bytes(64);
}

}  // namespace

Injection inject(World& world, AttackKind kind, std::size_t target, Millis ts, std::size_t round) {
  VehicleNode& vehicle = world.vehicles.at(target);
  switch (kind) {
    case AttackKind::FakeData:
    case AttackKind::CodeInjection: {
      EcuId ecu = pick_ecu(world, target, round);
      tamper(vehicle, ecu, malicious_image(world, attack_name(kind), target, round), ts);
      world.attacked_ecu[target] = ecu;
      return {target, std::nullopt};
    }
    case AttackKind::EcuReversal: {
      std::vector<EcuId> ecus = pick_ecus(world, target, round, kReversedEcus);
      for (EcuId ecu : ecus) {
        Bytes original = vehicle.firmware.at(ecu);
        tamper(vehicle, ecu, malicious_image(world, "reversal/" + std::to_string(ecu), target, round), ts);
        tamper(vehicle, ecu, std::move(original), ts + 1);
      }
      world.attacked_ecu[target] = ecus.front();
      return {target, std::nullopt};
    }
    case AttackKind::Sybil: {
      vehicle.alias = generate_keypair(derive_seed(world.config.seed, "sybil", target * 1'000'003 + round));
      vehicle.honest = false;
      return {target, std::nullopt};
    }
    case AttackKind::Replay: {
      vehicle.replays_captured = true;
      vehicle.honest = false;
      return {target, std::nullopt};
    }
    case AttackKind::Masquerade: {
      const std::size_t id = world.vehicles.size();
      VehicleNode fake{.id = id,
                       .keys = generate_keypair(derive_seed(world.config.seed, "masquerade", id)),
                       .ecu_state = vehicle.ecu_state,
                       .firmware = vehicle.firmware,
                       .route = vehicle.route,
                       .honest = false};
      world.vehicles.push_back(std::move(fake));
      return {id, id};
    }
  }
  throw std::invalid_argument("unknown attack kind");
}

std::set<Verdict> expected_verdict(AttackKind kind) {
  switch (kind) {
    case AttackKind::FakeData:
    case AttackKind::CodeInjection: return {Verdict::StateMismatch};
    case AttackKind::Sybil:
    case AttackKind::Masquerade: return {Verdict::UnknownVehicle};
    case AttackKind::EcuReversal: return {Verdict::SubsetMismatch};
    case AttackKind::Replay: return {Verdict::StaleTimestamp};
  }
  return {};
}

DetectionOracle oracle_for(std::optional<AttackKind> kind, std::size_t bound) {
  DetectionOracle o;
  o.kind = kind;
  o.bound = bound;
  if (kind) o.expected = expected_verdict(*kind);
  return o;
}

DetectionResult assert_detected(const EventLog& log, const DetectionOracle& oracle) {
  if (!oracle.kind) {
    bool clean = std::none_of(log.begin(), log.end(), [](const LogEvent& e) {
      return e.kind == LogKind::Arrival && e.detail != verdict_name(Verdict::Valid);
    });
    return {clean, std::nullopt};
  }

  auto attack = std::find_if(log.begin(), log.end(), [&](const LogEvent& e) {
    return e.kind == LogKind::Attack && e.detail == attack_name(*oracle.kind);
  });
  if (attack == log.end()) return {false, std::nullopt};

  std::size_t seen = 0;
  for (auto it = attack + 1; it != log.end() && seen < oracle.bound; ++it) {
    if (it->kind != LogKind::Arrival || it->subject != attack->subject) continue;
    for (Verdict v : oracle.expected)
      if (it->detail == verdict_name(v)) return {true, seen};
    ++seen;
  }
  return {false, std::nullopt};
}

}  // namespace bferl
