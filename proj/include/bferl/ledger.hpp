#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bferl/crypto.hpp"
#include "bferl/transaction.hpp"

namespace bferl {

namespace wire {
class Reader;
}

class Archive;

struct LedgerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BlockHeader {
  PublicKey owner_pk;
  Digest prev_header_hash;  // all zero for the first block of a ledger
  Millis created_ts = 0;
  std::string external_address;

  Bytes encode() const;
  Digest hash() const;
  friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

/// One transaction in a block's payload list. The first entry links to the
/// header hash, every later one to the hash of its predecessor.
struct LedgerEntry {
  Transaction payload;
  Digest prev_link;
  Millis entry_ts = 0;  // always the payload's own timestamp

  Bytes encode() const;
  Digest hash() const;
  friend bool operator==(const LedgerEntry&, const LedgerEntry&) = default;
};

struct AppendableBlock {
  BlockHeader header;
  std::vector<LedgerEntry> entries;

  Bytes encode() const;
  friend bool operator==(const AppendableBlock&, const AppendableBlock&) = default;
};

Millis timestamp_of(const Transaction& tx);

LedgerEntry read_entry(wire::Reader& r);
/// Throws wire::DecodeError on malformed or trailing input.
AppendableBlock decode_block(ByteView bytes);

/// Appends `tx` to a copy of `block`. Throws LedgerError("signature") when a
/// signature fails, LedgerError("ownership") when the transaction concerns a
/// different vehicle.
AppendableBlock append_entry(const AppendableBlock& block, Transaction tx);

/// True iff the first entry links to the header hash, each later entry links
/// to its predecessor, every payload verifies, and every vehicle-bound payload
/// names the block owner.
bool validate_block(const AppendableBlock& block);

/// Checks the prev_link chain of `entries` starting from `anchor`.
bool verify_chain(const Digest& anchor, std::span<const LedgerEntry> entries);

struct PruneResult {
  AppendableBlock block;
  std::size_t archived = 0;
};

/// Keeps the last two entries and moves older ones to the archive under the
/// header's external address. Retained entries are relinked into a chain that
/// starts at the header hash; archived entries carry their original links.
/// If the archive throws, nothing is changed.
PruneResult prune_to_two(const AppendableBlock& block, Archive& archive);

/// Archived entries followed by the retained ones, with the retained
/// entries' original links restored.
std::vector<LedgerEntry> reconstruct_history(const Archive& archive, const AppendableBlock& block);

/// What an RSU checks a response against. Derived from the vehicle's full
/// transaction history as entries are appended, so it survives pruning.
struct AttestationView {
  SsId expected_ssid;
  std::vector<EcuRecord> registry;           // indexed by ecu_id
  std::optional<Millis> last_challenge_ts;   // latest recorded response
  std::size_t challenge_records = 0;
};

class Ledger {
 public:
  /// Creates the block for `owner_pk` with `genesis` as its first entry.
  /// Throws LedgerError("block exists"), LedgerError("signature") or
  /// LedgerError("ownership").
  void create_block(const PublicKey& owner_pk, const Genesis& genesis, Millis ts,
                    std::string external_address);

  /// Creates an empty block, e.g. an authority's audit block.
  void open_block(const PublicKey& owner_pk, Millis ts, std::string external_address);

  const AppendableBlock* lookup(const PublicKey& pk) const;
  const AttestationView* view(const PublicKey& pk) const;

  /// Appends to the owner's block. Genesis transactions are only accepted
  /// through create_block.
  void append(const PublicKey& owner_pk, Transaction tx);

  /// Applies prune_to_two to the owner's block.
  std::size_t prune(const PublicKey& owner_pk, Archive& archive);

  /// append() followed by prune(), all or nothing. Returns the number of
  /// entries archived.
  std::size_t append_and_prune(const PublicKey& owner_pk, Transaction tx, Archive& archive);

  std::size_t block_count() const { return creation_order_.size(); }
  const std::vector<PublicKey>& creation_order() const { return creation_order_; }

  /// Header chain plus validate_block on every block.
  bool validate() const;

  Bytes serialize() const;
  std::size_t serialized_size() const;

 private:
  AppendableBlock& block_for(const PublicKey& pk);
  void apply_to_view(const PublicKey& owner_pk, const Transaction& tx);

  std::map<PublicKey, AppendableBlock> blocks_;
  std::map<PublicKey, AttestationView> views_;
  std::vector<PublicKey> creation_order_;
  Digest last_header_hash_{};
};

}  // namespace bferl
