#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bferl/crypto.hpp"
#include "bferl/ecu_merkle.hpp"

namespace bferl {

/// Registration record produced by the manufacturer at assembly time.
struct Genesis {
  SsId ssid;
  Millis ts = 0;
  std::vector<EcuRecord> ecu_list;
  PublicKey vehicle_pk;
  PublicKey maker_pk;
  Signature sig;
  friend bool operator==(const Genesis&, const Genesis&) = default;
};

/// Maintenance record. `ecu_changes` carries the rewritten ECU records so the
/// lower tier can keep its per-ECU registry current for subset checks.
struct Update {
  SsId new_ssid;
  Millis ts = 0;
  PublicKey vehicle_pk;
  PublicKey maintainer_pk;
  std::string metadata;
  std::vector<EcuRecord> ecu_changes;
  Signature sig;
  friend bool operator==(const Update&, const Update&) = default;
};

struct Request {
  PublicKey insurer_pk;
  std::string query;
  Millis ts = 0;
  Signature sig;
  friend bool operator==(const Request&, const Request&) = default;
};

struct ChallengeResponse {
  SsId ssid;
  std::vector<EcuRecord> subset;
  Millis ts = 0;
  PublicKey vehicle_pk;
  Signature sig;
  friend bool operator==(const ChallengeResponse&, const ChallengeResponse&) = default;
};

/// A verified response countersigned by the RSU that recorded it.
struct ChallengeRecord {
  ChallengeResponse response;
  PublicKey rsu_pk;
  Signature rsu_sig;
  friend bool operator==(const ChallengeRecord&, const ChallengeRecord&) = default;
};

using Transaction = std::variant<Genesis, Update, Request, ChallengeRecord>;

enum class TxKind : std::uint64_t { Genesis = 1, Update = 2, Request = 3, ChallengeRecord = 4 };

TxKind kind_of(const Transaction& tx);
const char* kind_name(TxKind kind);

// Canonical bytes. `signing_bytes` omits the signature field being produced.
Bytes encode(const Transaction& tx);
Bytes encode(const ChallengeResponse& response);
Bytes signing_bytes(const Genesis& tx);
Bytes signing_bytes(const Update& tx);
Bytes signing_bytes(const Request& tx);
Bytes signing_bytes(const ChallengeRecord& tx);
Bytes signing_bytes(const ChallengeResponse& response);

/// Throws wire::DecodeError on malformed input, including trailing bytes.
Transaction decode_transaction(ByteView bytes);
ChallengeResponse decode_response(ByteView bytes);

void seal(Genesis& tx, const SecretKey& maker);
void seal(Update& tx, const SecretKey& maintainer);
void seal(Request& tx, const SecretKey& insurer);
void seal(ChallengeResponse& response, const SecretKey& vehicle);
void seal(ChallengeRecord& tx, const SecretKey& rsu);

bool verify_response_signature(const ChallengeResponse& response);

/// Checks every signature the transaction carries against its declared
/// signer. A Genesis must also have an ssid matching its ECU list.
bool verify_transaction(const Transaction& tx);

/// The key whose signature authorises the transaction.
const PublicKey& signer_of(const Transaction& tx);

/// The vehicle a transaction concerns; empty for requests, which are not
/// bound to a vehicle.
std::optional<PublicKey> subject_of(const Transaction& tx);

}  // namespace bferl
