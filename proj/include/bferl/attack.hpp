#pragma once

#include <array>
#include <string_view>

namespace bferl {

enum class AttackKind { FakeData, CodeInjection, Sybil, Masquerade, EcuReversal, Replay };

inline constexpr std::array kAllAttacks = {AttackKind::FakeData,   AttackKind::CodeInjection,
                                           AttackKind::Sybil,      AttackKind::Masquerade,
                                           AttackKind::EcuReversal, AttackKind::Replay};

const char* attack_name(AttackKind kind);
/// Accepts the names returned by attack_name. Throws std::invalid_argument otherwise.
AttackKind parse_attack(std::string_view name);

}  // namespace bferl
