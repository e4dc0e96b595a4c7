#include "bferl/attack.hpp"

#include <stdexcept>
#include <string>

namespace bferl {

const char* attack_name(AttackKind kind) {
  switch (kind) {
    case AttackKind::FakeData: return "FakeData";
    case AttackKind::CodeInjection: return "CodeInjection";
    case AttackKind::Sybil: return "Sybil";
    case AttackKind::Masquerade: return "Masquerade";
    case AttackKind::EcuReversal: return "EcuReversal";
    case AttackKind::Replay: return "Replay";
  }
  return "?";
}

AttackKind parse_attack(std::string_view name) {
  for (AttackKind k : kAllAttacks)
    if (name == attack_name(k)) return k;
  throw std::invalid_argument("unknown attack kind '" + std::string(name) + "'");
}

}  // namespace bferl
