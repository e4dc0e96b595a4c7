#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bferl/archive.hpp"
#include "bferl/ecu_merkle.hpp"
#include "bferl/ledger.hpp"
#include "bferl/rng.hpp"
#include "bferl/transaction.hpp"

namespace bferl {

/// Raised when a tier refuses a transaction. `what()` names the reason.
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Verdict { Valid, UnknownVehicle, BadSignature, StateMismatch, SubsetMismatch, StaleTimestamp };

const char* verdict_name(Verdict v);
/// Throws std::invalid_argument for unknown names.
Verdict parse_verdict(std::string_view name);

struct Challenge {
  PublicKey rsu_pk;
  PublicKey vehicle_pk;
  std::vector<EcuId> subset_indices;
  Millis issued_ts = 0;
};

inline constexpr std::size_t kDefaultSubsetSize = 3;

std::string default_archive_address(const PublicKey& vehicle_pk);

Genesis make_genesis(const KeyPair& maker, const PublicKey& vehicle_pk, const EcuState& state, Millis ts);

Update make_update(const KeyPair& maintainer, const PublicKey& vehicle_pk, const EcuState& new_state,
                   std::vector<EcuRecord> changes, std::string metadata, Millis ts);

Request make_request(const KeyPair& insurer, std::string query, Millis ts);

/// One countersigned decision of the upper-tier validators.
struct AuditRecord {
  std::string event;  // "initialize" or "update"
  PublicKey subject;
  Digest tx_hash;
  Millis ts = 0;
  std::vector<std::pair<PublicKey, Signature>> countersignatures;
};

/// Upper tier: the authority validators, the allow-lists they enforce, their
/// countersignature audit log, and a ledger holding an authority-owned audit
/// block for insurer requests.
class UpperTier {
 public:
  /// validators[0] owns the audit block. Throws std::invalid_argument when
  /// there are no validators.
  UpperTier(std::vector<KeyPair> validators, Millis ts);

  void authorize_maker(const PublicKey& pk) { makers_.insert(pk); }
  void authorize_maintainer(const PublicKey& pk) { maintainers_.insert(pk); }
  void authorize_insurer(const PublicKey& pk) { insurers_.insert(pk); }

  bool is_maker(const PublicKey& pk) const { return makers_.contains(pk); }
  bool is_maintainer(const PublicKey& pk) const { return maintainers_.contains(pk) || makers_.contains(pk); }
  bool is_insurer(const PublicKey& pk) const { return insurers_.contains(pk); }

  const std::vector<KeyPair>& validators() const { return validators_; }
  const PublicKey& audit_owner() const { return validators_.front().public_key; }
  const Ledger& ledger() const { return ledger_; }
  const std::vector<AuditRecord>& audit_log() const { return audit_log_; }

  /// Every validator signs (event, subject, tx_hash, ts) into the audit log.
  void countersign(std::string event, const PublicKey& subject, const Digest& tx_hash, Millis ts);
  void append_request(const Request& request);

 private:
  std::vector<KeyPair> validators_;
  std::set<PublicKey> makers_, maintainers_, insurers_;
  std::vector<AuditRecord> audit_log_;
  Ledger ledger_;
};

/// Registers a vehicle: the validators verify the manufacturer's genesis and
/// create the vehicle's block in the lower tier. Throws ProtocolError with
/// "unauthorized maker", "bad signature" or "duplicate vehicle"; the ledger
/// is untouched on rejection.
void initialize_vehicle(UpperTier& upper, Ledger& lower, const Genesis& genesis, Millis ts);

/// Applies a maintenance update to the vehicle's lower-tier block and prunes it
/// back to two entries. Throws ProtocolError with "bad signature",
/// "unauthorized maintainer", "unknown vehicle" or "bad ECU change".
void apply_upper_update(UpperTier& upper, Ledger& lower, const Update& update, Archive& archive);

/// Draws min(subset_size, ecu_count) distinct indices uniformly. Throws
/// std::invalid_argument when ecu_count is zero.
Challenge issue_challenge(const PublicKey& rsu_pk, const PublicKey& vehicle_pk, std::size_t ecu_count,
                          Rng& rng, Millis ts, std::size_t subset_size = kDefaultSubsetSize);

/// Throws ProtocolError when the challenge is for another vehicle, EcuStateError
/// on a bad subset index.
ChallengeResponse build_response(const KeyPair& vehicle, const EcuState& state, const Challenge& challenge,
                                 Millis ts);

class RevocationList {
 public:
  /// Returns false if the key was already revoked.
  bool revoke(const PublicKey& pk) { return revoked_.insert(pk).second; }
  bool contains(const PublicKey& pk) const { return revoked_.contains(pk); }
  std::size_t size() const { return revoked_.size(); }
  const std::set<PublicKey>& keys() const { return revoked_; }

 private:
  std::set<PublicKey> revoked_;
};

/// Checks in order, first failure wins:
///   no block (or revoked)                        -> UnknownVehicle
///   bad signature, or response for another key  -> BadSignature
///   ts not after the last recorded response     -> StaleTimestamp
///   SS_ID differs from the latest update/genesis -> StateMismatch
///   subset records differ from the registry      -> SubsetMismatch
Verdict verify_response(const Ledger& lower, const Challenge& challenge, const ChallengeResponse& response,
                        const RevocationList* revoked = nullptr);

/// Appends the RSU-signed record of a verified response and prunes the block.
/// On archive failure the ledger is left unchanged and ArchiveError propagates.
ChallengeRecord record_response(const KeyPair& rsu, Ledger& lower, const ChallengeResponse& response,
                                Archive& archive);

struct ReportEvent {
  PublicKey rsu_pk;
  PublicKey vehicle_pk;
  Verdict verdict = Verdict::Valid;
  Millis ts = 0;
  Signature sig;

  Bytes signing_bytes() const;
  bool verify() const { return bferl::verify(rsu_pk, signing_bytes(), sig); }
};

/// Throws ProtocolError("nothing to report") for a Valid verdict.
ReportEvent report_malicious(const KeyPair& rsu, const PublicKey& vehicle_pk, Verdict verdict, Millis ts);

/// Stores an authorised insurer's request in the upper-tier audit block.
/// Throws ProtocolError("unauthorized insurer") or ProtocolError("bad signature").
void submit_request(UpperTier& upper, const Request& request);

}  // namespace bferl
