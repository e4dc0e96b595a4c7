#include "bferl/protocol.hpp"

#include <algorithm>
#include <numeric>

#include "bferl/wire.hpp"

namespace bferl {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Valid: return "Valid";
    case Verdict::UnknownVehicle: return "UnknownVehicle";
    case Verdict::BadSignature: return "BadSignature";
    case Verdict::StateMismatch: return "StateMismatch";
    case Verdict::SubsetMismatch: return "SubsetMismatch";
    case Verdict::StaleTimestamp: return "StaleTimestamp";
  }
  return "?";
}

Verdict parse_verdict(std::string_view name) {
  for (Verdict v : {Verdict::Valid, Verdict::UnknownVehicle, Verdict::BadSignature, Verdict::StateMismatch,
                    Verdict::SubsetMismatch, Verdict::StaleTimestamp})
    if (name == verdict_name(v)) return v;
  throw std::invalid_argument("unknown verdict '" + std::string(name) + "'");
}

std::string default_archive_address(const PublicKey& vehicle_pk) {
  return "archive://vehicle/" + vehicle_pk.hex();
}

Genesis make_genesis(const KeyPair& maker, const PublicKey& vehicle_pk, const EcuState& state, Millis ts) {
  Genesis g;
  g.ssid = compute_ssid(state);
  g.ts = ts;
  g.ecu_list = state.records();
  g.vehicle_pk = vehicle_pk;
  g.maker_pk = maker.public_key;
  seal(g, maker.secret);
  return g;
}

Update make_update(const KeyPair& maintainer, const PublicKey& vehicle_pk, const EcuState& new_state,
                   std::vector<EcuRecord> changes, std::string metadata, Millis ts) {
  Update u;
  u.new_ssid = compute_ssid(new_state);
  u.ts = ts;
  u.vehicle_pk = vehicle_pk;
  u.maintainer_pk = maintainer.public_key;
  u.metadata = std::move(metadata);
  u.ecu_changes = std::move(changes);
  seal(u, maintainer.secret);
  return u;
}

Request make_request(const KeyPair& insurer, std::string query, Millis ts) {
  Request r;
  r.insurer_pk = insurer.public_key;
  r.query = std::move(query);
  r.ts = ts;
  seal(r, insurer.secret);
  return r;
}

UpperTier::UpperTier(std::vector<KeyPair> validators, Millis ts) : validators_(std::move(validators)) {
  if (validators_.empty()) throw std::invalid_argument("upper tier needs at least one validator");
  ledger_.open_block(audit_owner(), ts, "archive://upper/audit");
}

void UpperTier::countersign(std::string event, const PublicKey& subject, const Digest& tx_hash, Millis ts) {
  AuditRecord rec{std::move(event), subject, tx_hash, ts, {}};
  wire::Writer w;
  w.field(rec.event).field(subject).field(tx_hash).u64(ts);
  for (const auto& v : validators_) rec.countersignatures.emplace_back(v.public_key, sign(v.secret, w.bytes()));
  audit_log_.push_back(std::move(rec));
}

void UpperTier::append_request(const Request& request) { ledger_.append(audit_owner(), request); }

void initialize_vehicle(UpperTier& upper, Ledger& lower, const Genesis& genesis, Millis ts) {
  if (!upper.is_maker(genesis.maker_pk)) throw ProtocolError("unauthorized maker");
  if (!verify_transaction(genesis)) throw ProtocolError("bad signature");
  if (lower.lookup(genesis.vehicle_pk)) throw ProtocolError("duplicate vehicle");

  lower.create_block(genesis.vehicle_pk, genesis, ts, default_archive_address(genesis.vehicle_pk));
  upper.countersign("initialize", genesis.vehicle_pk, hash(encode(genesis)), ts);
}

void apply_upper_update(UpperTier& upper, Ledger& lower, const Update& update, Archive& archive) {
  if (!verify_transaction(update)) throw ProtocolError("bad signature");
  if (!upper.is_maintainer(update.maintainer_pk)) throw ProtocolError("unauthorized maintainer");
  const AttestationView* view = lower.view(update.vehicle_pk);
  if (!view) throw ProtocolError("unknown vehicle");

  std::vector<EcuRecord> registry = view->registry;
  for (const auto& change : update.ecu_changes) {
    if (change.ecu_id >= registry.size()) throw ProtocolError("bad ECU change");
    if (change.last_write_ts < registry[change.ecu_id].last_write_ts) throw ProtocolError("bad ECU change");
    registry[change.ecu_id] = change;
  }
  if (compute_ssid(registry) != update.new_ssid) throw ProtocolError("inconsistent SS_ID");

  lower.append_and_prune(update.vehicle_pk, update, archive);
  upper.countersign("update", update.vehicle_pk, hash(encode(update)), update.ts);
}

Challenge issue_challenge(const PublicKey& rsu_pk, const PublicKey& vehicle_pk, std::size_t ecu_count,
                          Rng& rng, Millis ts, std::size_t subset_size) {
  if (ecu_count == 0) throw std::invalid_argument("cannot challenge a vehicle with no ECUs");
  const std::size_t k = std::min(subset_size, ecu_count);

  // Partial Fisher-Yates: the first k slots end up a uniform k-subset.
  std::vector<EcuId> pool(ecu_count);
  std::iota(pool.begin(), pool.end(), EcuId{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + rng.below(ecu_count - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return Challenge{rsu_pk, vehicle_pk, std::move(pool), ts};
}

ChallengeResponse build_response(const KeyPair& vehicle, const EcuState& state, const Challenge& challenge,
                                 Millis ts) {
  if (challenge.vehicle_pk != vehicle.public_key) throw ProtocolError("challenge addressed to another vehicle");
  ChallengeResponse r;
  r.ssid = compute_ssid(state);
  r.subset = subset_report(state, challenge.subset_indices);
  r.ts = ts;
  r.vehicle_pk = vehicle.public_key;
  seal(r, vehicle.secret);
  return r;
}

Verdict verify_response(const Ledger& lower, const Challenge& challenge, const ChallengeResponse& response,
                        const RevocationList* revoked) {
  const AttestationView* view = lower.view(response.vehicle_pk);
  if (!lower.lookup(response.vehicle_pk) || !view) return Verdict::UnknownVehicle;
  if (revoked && revoked->contains(response.vehicle_pk)) return Verdict::UnknownVehicle;

  if (response.vehicle_pk != challenge.vehicle_pk || !verify_response_signature(response))
    return Verdict::BadSignature;

  if (view->last_challenge_ts && response.ts <= *view->last_challenge_ts) return Verdict::StaleTimestamp;

  if (response.ssid != view->expected_ssid) return Verdict::StateMismatch;

  if (response.subset.size() != challenge.subset_indices.size()) return Verdict::SubsetMismatch;
  for (std::size_t i = 0; i < response.subset.size(); ++i) {
    const EcuRecord& got = response.subset[i];
    if (got.ecu_id != challenge.subset_indices[i] || got.ecu_id >= view->registry.size())
      return Verdict::SubsetMismatch;
    const EcuRecord& want = view->registry[got.ecu_id];
    if (got.firmware_digest != want.firmware_digest || got.last_write_ts != want.last_write_ts)
      return Verdict::SubsetMismatch;
  }
  return Verdict::Valid;
}

ChallengeRecord record_response(const KeyPair& rsu, Ledger& lower, const ChallengeResponse& response,
                                Archive& archive) {
  ChallengeRecord rec;
  rec.response = response;
  rec.rsu_pk = rsu.public_key;
  seal(rec, rsu.secret);
  lower.append_and_prune(response.vehicle_pk, rec, archive);
  return rec;
}

Bytes ReportEvent::signing_bytes() const {
  wire::Writer w;
  w.field(std::string_view("bferl-report")).field(rsu_pk).field(vehicle_pk);
  w.u64(static_cast<std::uint64_t>(verdict)).u64(ts);
  return std::move(w).take();
}

ReportEvent report_malicious(const KeyPair& rsu, const PublicKey& vehicle_pk, Verdict verdict, Millis ts) {
  if (verdict == Verdict::Valid) throw ProtocolError("nothing to report");
  ReportEvent ev{rsu.public_key, vehicle_pk, verdict, ts, {}};
  ev.sig = sign(rsu.secret, ev.signing_bytes());
  return ev;
}

void submit_request(UpperTier& upper, const Request& request) {
  if (!upper.is_insurer(request.insurer_pk)) throw ProtocolError("unauthorized insurer");
  if (!verify_transaction(request)) throw ProtocolError("bad signature");
  upper.append_request(request);
}

}  // namespace bferl
