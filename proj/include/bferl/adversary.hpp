#pragma once

#include <optional>
#include <set>

#include "bferl/attack.hpp"
#include "bferl/netsim.hpp"

namespace bferl {

struct Injection {
  std::size_t subject = 0;                     // vehicle whose encounters reveal the attack
  std::optional<std::size_t> spawned_vehicle;  // set for Masquerade
};

/// Applies an attack to the world at time `ts`, ahead of encounter `round`.
///   FakeData, CodeInjection  rewrite one ECU of the target without an Update
///   Sybil                    target answers under a fresh, unregistered key
///   Masquerade               an unregistered vehicle joins the target's route
///   EcuReversal              flash malicious images into min(3, N) ECUs, then restore the originals
///   Replay                   target re-sends its previous response
/// Throws std::out_of_range for an unknown target.
inline constexpr std::size_t kReversedEcus = 3;

Injection inject(World& world, AttackKind kind, std::size_t target, Millis ts, std::size_t round);

/// Verdicts that count as detecting the attack.
std::set<Verdict> expected_verdict(AttackKind kind);

struct DetectionOracle {
  std::optional<AttackKind> kind;  // empty: attack-free run
  std::set<Verdict> expected;
  std::size_t bound = 1;           // encounters after the trigger
};

DetectionOracle oracle_for(std::optional<AttackKind> kind, std::size_t bound = 1);

struct DetectionResult {
  bool pass = false;
  std::optional<std::size_t> first_detection;  // 0 = first encounter after the trigger
};

/// For an attack oracle: passes iff one of the subject's first `bound` encounters
/// after the attack event has an expected verdict. For an attack-free oracle:
/// passes iff no arrival has a non-Valid verdict.
DetectionResult assert_detected(const EventLog& log, const DetectionOracle& oracle);

}  // namespace bferl
