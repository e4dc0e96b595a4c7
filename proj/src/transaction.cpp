#include "bferl/transaction.hpp"

#include "bferl/wire.hpp"

namespace bferl {
namespace {

constexpr std::size_t kMinRecordSize = 8 + 4 + 8;

void put_records(wire::Writer& w, const std::vector<EcuRecord>& records) {
  w.u64(records.size());
  for (const auto& r : records) w.u64(r.ecu_id).field(r.firmware_digest).u64(r.last_write_ts);
}

std::vector<EcuRecord> get_records(wire::Reader& r) {
  std::vector<EcuRecord> out(r.count(kMinRecordSize));
  for (auto& rec : out) {
    rec.ecu_id = r.u64();
    rec.firmware_digest = r.fixed<Digest>();
    rec.last_write_ts = r.u64();
  }
  return out;
}

void put(wire::Writer& w, const ChallengeResponse& x, bool with_sig) {
  w.field(x.ssid.root);
  put_records(w, x.subset);
  w.u64(x.ts).field(x.vehicle_pk);
  if (with_sig) w.field(x.sig);
}

ChallengeResponse get_response(wire::Reader& r) {
  ChallengeResponse x;
  x.ssid.root = r.fixed<Digest>();
  x.subset = get_records(r);
  x.ts = r.u64();
  x.vehicle_pk = r.fixed<PublicKey>();
  x.sig = r.signature();
  return x;
}

void put(wire::Writer& w, const Genesis& x, bool with_sig) {
  w.u64(static_cast<std::uint64_t>(TxKind::Genesis)).field(x.ssid.root).u64(x.ts);
  put_records(w, x.ecu_list);
  w.field(x.vehicle_pk).field(x.maker_pk);
  if (with_sig) w.field(x.sig);
}

void put(wire::Writer& w, const Update& x, bool with_sig) {
  w.u64(static_cast<std::uint64_t>(TxKind::Update)).field(x.new_ssid.root).u64(x.ts);
  w.field(x.vehicle_pk).field(x.maintainer_pk).field(x.metadata);
  put_records(w, x.ecu_changes);
  if (with_sig) w.field(x.sig);
}

void put(wire::Writer& w, const Request& x, bool with_sig) {
  w.u64(static_cast<std::uint64_t>(TxKind::Request)).field(x.insurer_pk).field(x.query).u64(x.ts);
  if (with_sig) w.field(x.sig);
}

void put(wire::Writer& w, const ChallengeRecord& x, bool with_sig) {
  w.u64(static_cast<std::uint64_t>(TxKind::ChallengeRecord)).field(encode(x.response)).field(x.rsu_pk);
  if (with_sig) w.field(x.rsu_sig);
}

template <typename T>
Bytes unsigned_bytes(const T& x) {
  wire::Writer w;
  put(w, x, false);
  return std::move(w).take();
}

}  // namespace

TxKind kind_of(const Transaction& tx) { return static_cast<TxKind>(tx.index() + 1); }

const char* kind_name(TxKind kind) {
  switch (kind) {
    case TxKind::Genesis: return "Genesis";
    case TxKind::Update: return "Update";
    case TxKind::Request: return "Request";
    case TxKind::ChallengeRecord: return "ChallengeRecord";
  }
  return "?";
}

Bytes encode(const Transaction& tx) {
  wire::Writer w;
  std::visit([&](const auto& x) { put(w, x, true); }, tx);
  return std::move(w).take();
}

Bytes encode(const ChallengeResponse& response) {
  wire::Writer w;
  put(w, response, true);
  return std::move(w).take();
}

Bytes signing_bytes(const Genesis& tx) { return unsigned_bytes(tx); }
Bytes signing_bytes(const Update& tx) { return unsigned_bytes(tx); }
Bytes signing_bytes(const Request& tx) { return unsigned_bytes(tx); }
Bytes signing_bytes(const ChallengeRecord& tx) { return unsigned_bytes(tx); }
Bytes signing_bytes(const ChallengeResponse& response) { return unsigned_bytes(response); }

Transaction decode_transaction(ByteView bytes) {
  wire::Reader r(bytes);
  Transaction out;
  switch (static_cast<TxKind>(r.u64())) {
    case TxKind::Genesis: {
      Genesis x;
      x.ssid.root = r.fixed<Digest>();
      x.ts = r.u64();
      x.ecu_list = get_records(r);
      x.vehicle_pk = r.fixed<PublicKey>();
      x.maker_pk = r.fixed<PublicKey>();
      x.sig = r.signature();
      out = std::move(x);
      break;
    }
    case TxKind::Update: {
      Update x;
      x.new_ssid.root = r.fixed<Digest>();
      x.ts = r.u64();
      x.vehicle_pk = r.fixed<PublicKey>();
      x.maintainer_pk = r.fixed<PublicKey>();
      x.metadata = r.text();
      x.ecu_changes = get_records(r);
      x.sig = r.signature();
      out = std::move(x);
      break;
    }
    case TxKind::Request: {
      Request x;
      x.insurer_pk = r.fixed<PublicKey>();
      x.query = r.text();
      x.ts = r.u64();
      x.sig = r.signature();
      out = std::move(x);
      break;
    }
    case TxKind::ChallengeRecord: {
      ChallengeRecord x;
      x.response = decode_response(r.field());
      x.rsu_pk = r.fixed<PublicKey>();
      x.rsu_sig = r.signature();
      out = std::move(x);
      break;
    }
    default:
      throw wire::DecodeError("unknown transaction tag");
  }
  r.expect_done();
  return out;
}

ChallengeResponse decode_response(ByteView bytes) {
  wire::Reader r(bytes);
  ChallengeResponse x = get_response(r);
  r.expect_done();
  return x;
}

void seal(Genesis& tx, const SecretKey& maker) { tx.sig = sign(maker, signing_bytes(tx)); }
void seal(Update& tx, const SecretKey& maintainer) { tx.sig = sign(maintainer, signing_bytes(tx)); }
void seal(Request& tx, const SecretKey& insurer) { tx.sig = sign(insurer, signing_bytes(tx)); }
void seal(ChallengeResponse& response, const SecretKey& vehicle) {
  response.sig = sign(vehicle, signing_bytes(response));
}
void seal(ChallengeRecord& tx, const SecretKey& rsu) { tx.rsu_sig = sign(rsu, signing_bytes(tx)); }

bool verify_response_signature(const ChallengeResponse& response) {
  return verify(response.vehicle_pk, signing_bytes(response), response.sig);
}

bool verify_transaction(const Transaction& tx) {
  struct {
    bool operator()(const Genesis& x) const {
      if (!verify(x.maker_pk, signing_bytes(x), x.sig)) return false;
      try {
        return compute_ssid(EcuState(x.ecu_list)) == x.ssid;
      } catch (const EcuStateError&) {
        return false;
      }
    }
    bool operator()(const Update& x) const { return verify(x.maintainer_pk, signing_bytes(x), x.sig); }
    bool operator()(const Request& x) const { return verify(x.insurer_pk, signing_bytes(x), x.sig); }
    bool operator()(const ChallengeRecord& x) const {
      return verify(x.rsu_pk, signing_bytes(x), x.rsu_sig) && verify_response_signature(x.response);
    }
  } visitor;
  return std::visit(visitor, tx);
}

const PublicKey& signer_of(const Transaction& tx) {
  struct {
    const PublicKey& operator()(const Genesis& x) const { return x.maker_pk; }
    const PublicKey& operator()(const Update& x) const { return x.maintainer_pk; }
    const PublicKey& operator()(const Request& x) const { return x.insurer_pk; }
    const PublicKey& operator()(const ChallengeRecord& x) const { return x.rsu_pk; }
  } visitor;
  return std::visit(visitor, tx);
}

std::optional<PublicKey> subject_of(const Transaction& tx) {
  struct {
    std::optional<PublicKey> operator()(const Genesis& x) const { return x.vehicle_pk; }
    std::optional<PublicKey> operator()(const Update& x) const { return x.vehicle_pk; }
    std::optional<PublicKey> operator()(const Request&) const { return std::nullopt; }
    std::optional<PublicKey> operator()(const ChallengeRecord& x) const { return x.response.vehicle_pk; }
  } visitor;
  return std::visit(visitor, tx);
}

}  // namespace bferl
