#include "bferl/entities.hpp"

#include <string>

namespace bferl {

ChallengeResponse VehicleNode::respond(const Challenge& challenge, Millis ts) {
  if (replays_captured && last_response) return *last_response;
  ChallengeResponse r = build_response(alias ? *alias : keys, ecu_state, challenge, ts);
  last_response = r;
  return r;
}

bool AuthorityNode::receive_report(const ReportEvent& report) {
  if (!known_rsus.contains(report.rsu_pk) || !report.verify()) return false;
  revoked.revoke(report.vehicle_pk);
  return true;
}

Update perform_maintenance(const MaintainerNode& maintainer, VehicleNode& vehicle, EcuId ecu_id,
                           Bytes firmware, Millis ts) {
  if (!maintainer.authorized) throw ProtocolError("unauthorized maintainer");
  EcuState next = update_ecu(vehicle.ecu_state, ecu_id, hash(firmware), ts);
  vehicle.ecu_state = next;
  vehicle.firmware.at(ecu_id) = std::move(firmware);

  const char* action = maintainer.role == MaintainerRole::Manufacturer ? "diagnostic" : "firmware-update";
  std::string metadata = "ecu=" + std::to_string(ecu_id) + " action=" + action;
  return make_update(maintainer.keys, vehicle.keys.public_key, next, {next.at(ecu_id)}, std::move(metadata), ts);
}

void tamper(VehicleNode& vehicle, EcuId ecu_id, Bytes firmware, Millis ts) {
  vehicle.ecu_state = update_ecu(vehicle.ecu_state, ecu_id, hash(firmware), ts);
  vehicle.firmware.at(ecu_id) = std::move(firmware);
  vehicle.honest = false;
}

}  // namespace bferl
