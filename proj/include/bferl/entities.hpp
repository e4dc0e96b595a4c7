#pragma once

#include <optional>
#include <set>
#include <vector>

#include "bferl/protocol.hpp"

namespace bferl {

struct VehicleNode {
  std::size_t id = 0;
  KeyPair keys;
  EcuState ecu_state;
  std::vector<Bytes> firmware;       // current image per ECU
  std::vector<std::size_t> route;    // RSU id for each encounter
  bool honest = true;

  // Attached attacker behaviour.
  std::optional<KeyPair> alias = std::nullopt;  // identity presented instead of `keys`
  bool replays_captured = false;     // re-send the last response verbatim
  std::optional<ChallengeResponse> last_response = std::nullopt;

  const PublicKey& presented_pk() const { return alias ? alias->public_key : keys.public_key; }

  /// Answers a challenge and remembers the response, unless replaying.
  ChallengeResponse respond(const Challenge& challenge, Millis ts);
};

struct RsuNode {
  std::size_t id = 0;
  KeyPair keys;
  std::int64_t slot = 0;  // position on the road
};

enum class AuthorityRole { Transport, Legal };

struct AuthorityNode {
  KeyPair keys;
  AuthorityRole role = AuthorityRole::Transport;
  RevocationList revoked;
  std::set<PublicKey> known_rsus;

  /// Revokes the reported vehicle if the report is signed by a known RSU.
  bool receive_report(const ReportEvent& report);
};

enum class MaintainerRole { Manufacturer, Technician };

struct MaintainerNode {
  KeyPair keys;
  MaintainerRole role = MaintainerRole::Technician;
  bool authorized = false;
};

struct InsurerNode {
  KeyPair keys;
  bool authorized = false;
};

/// Flashes `firmware` into the ECU and builds the signed Update describing it.
/// Throws ProtocolError("unauthorized maintainer").
Update perform_maintenance(const MaintainerNode& maintainer, VehicleNode& vehicle, EcuId ecu_id,
                           Bytes firmware, Millis ts);

/// Attacker write: changes the ECU without any Update and clears `honest`.
void tamper(VehicleNode& vehicle, EcuId ecu_id, Bytes firmware, Millis ts);

}  // namespace bferl
