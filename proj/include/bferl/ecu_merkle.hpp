#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "bferl/crypto.hpp"

namespace bferl {

using EcuId = std::uint64_t;
using Millis = std::uint64_t;

struct EcuRecord {
  EcuId ecu_id = 0;
  Digest firmware_digest;
  Millis last_write_ts = 0;

  friend bool operator==(const EcuRecord&, const EcuRecord&) = default;
};

struct EcuStateError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Merkle root over a vehicle's ECU firmware digests. Called SS_ID in the
/// protocol: the attestable fingerprint of the whole vehicle.
struct SsId {
  Digest root;
  friend auto operator<=>(const SsId&, const SsId&) = default;
};

/// Ordered ECU records of one vehicle. Always non-empty, ids are 0..N-1 in order.
/// Immutable: updates return a new state.
class EcuState {
 public:
  /// Throws EcuStateError("empty ECU state") on an empty list, or when ids are
  /// not exactly 0..N-1 in order.
  explicit EcuState(std::vector<EcuRecord> records);

  /// Builds a state from digests, assigning ids in order and a common timestamp.
  static EcuState from_digests(std::span<const Digest> digests, Millis ts);

  std::size_t size() const { return records_.size(); }
  const EcuRecord& at(EcuId id) const;
  const std::vector<EcuRecord>& records() const { return records_; }

  friend bool operator==(const EcuState&, const EcuState&) = default;

 private:
  std::vector<EcuRecord> records_;
};

/// Leaf = H(0x00 || ecu_id as u64 big-endian || digest), node = H(0x01 || left || right).
/// Odd levels duplicate their last node.
SsId compute_ssid(const EcuState& state);

/// Same tree over raw records; throws on an empty list. Used for genesis lists
/// that have not been wrapped in an EcuState.
SsId compute_ssid(std::span<const EcuRecord> records);

Digest merkle_leaf(EcuId id, const Digest& firmware_digest);
Digest merkle_node(const Digest& left, const Digest& right);

/// Throws EcuStateError on an unknown id or when ts is older than the
/// record's current last_write_ts ("timestamp regression").
EcuState update_ecu(const EcuState& state, EcuId ecu_id, const Digest& new_digest, Millis ts);

/// Returns the named records verbatim, in request order. Throws on
/// out-of-range or duplicate indices.
std::vector<EcuRecord> subset_report(const EcuState& state, std::span<const EcuId> indices);

}  // namespace bferl
