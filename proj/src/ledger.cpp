#include "bferl/ledger.hpp"

#include "bferl/archive.hpp"
#include "bferl/wire.hpp"

namespace bferl {

namespace {
constexpr std::uint64_t kLedgerFormatVersion = 1;
}

Bytes BlockHeader::encode() const {
  wire::Writer w;
  w.field(owner_pk).field(prev_header_hash).u64(created_ts).field(external_address);
  return std::move(w).take();
}

Digest BlockHeader::hash() const { return bferl::hash(encode()); }

Bytes LedgerEntry::encode() const {
  wire::Writer w;
  w.field(bferl::encode(payload)).field(prev_link).u64(entry_ts);
  return std::move(w).take();
}

Digest LedgerEntry::hash() const { return bferl::hash(encode()); }

Bytes AppendableBlock::encode() const {
  wire::Writer w;
  w.field(header.encode()).u64(entries.size());
  for (const auto& e : entries) w.field(e.encode());
  return std::move(w).take();
}

Millis timestamp_of(const Transaction& tx) {
  struct {
    Millis operator()(const Genesis& x) const { return x.ts; }
    Millis operator()(const Update& x) const { return x.ts; }
    Millis operator()(const Request& x) const { return x.ts; }
    Millis operator()(const ChallengeRecord& x) const { return x.response.ts; }
  } visitor;
  return std::visit(visitor, tx);
}

LedgerEntry read_entry(wire::Reader& r) {
  LedgerEntry e;
  e.payload = decode_transaction(r.field());
  e.prev_link = r.fixed<Digest>();
  e.entry_ts = r.u64();
  return e;
}

AppendableBlock decode_block(ByteView bytes) {
  wire::Reader r(bytes);
  AppendableBlock block;
  {
    wire::Reader h(r.field());
    block.header.owner_pk = h.fixed<PublicKey>();
    block.header.prev_header_hash = h.fixed<Digest>();
    block.header.created_ts = h.u64();
    block.header.external_address = h.text();
    h.expect_done();
  }
  const std::uint64_t n = r.count(4);
  block.entries.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    wire::Reader e(r.field());
    block.entries.push_back(read_entry(e));
    e.expect_done();
  }
  r.expect_done();
  return block;
}

AppendableBlock append_entry(const AppendableBlock& block, Transaction tx) {
  if (!verify_transaction(tx)) throw LedgerError("signature");
  if (auto subject = subject_of(tx); subject && *subject != block.header.owner_pk)
    throw LedgerError("ownership");

  AppendableBlock out = block;
  LedgerEntry entry;
  entry.prev_link = block.entries.empty() ? block.header.hash() : block.entries.back().hash();
  entry.entry_ts = timestamp_of(tx);
  entry.payload = std::move(tx);
  out.entries.push_back(std::move(entry));
  return out;
}

bool verify_chain(const Digest& anchor, std::span<const LedgerEntry> entries) {
  Digest expected = anchor;
  for (const auto& e : entries) {
    if (e.prev_link != expected) return false;
    expected = e.hash();
  }
  return true;
}

bool validate_block(const AppendableBlock& block) {
  if (!verify_chain(block.header.hash(), block.entries)) return false;
  for (const auto& e : block.entries) {
    if (e.entry_ts != timestamp_of(e.payload)) return false;
    if (auto subject = subject_of(e.payload); subject && *subject != block.header.owner_pk) return false;
    if (!verify_transaction(e.payload)) return false;
  }
  return true;
}

namespace {

// Rewrites prev_links so `entries` form a chain starting at `anchor`.
void rechain(Digest anchor, std::span<LedgerEntry> entries) {
  for (auto& e : entries) {
    e.prev_link = anchor;
    anchor = e.hash();
  }
}

}  // namespace

PruneResult prune_to_two(const AppendableBlock& block, Archive& archive) {
  if (block.entries.size() <= 2) return {block, 0};

  const std::string& address = block.header.external_address;
  const Digest header_hash = block.header.hash();
  const std::size_t moved = block.entries.size() - 2;

  // Entries retained by an earlier prune were relinked to the header; the
  // original chain continues from the last archived entry.
  std::vector<LedgerEntry> outgoing(block.entries.begin(), block.entries.begin() + moved);
  rechain(archive.last_hash(address).value_or(outgoing.front().prev_link), outgoing);

  PruneResult result;
  result.block.header = block.header;
  result.block.entries.assign(block.entries.begin() + moved, block.entries.end());
  result.archived = moved;

  RelinkEvent relink;
  relink.next_seq = archive.count(address) + moved;
  relink.original_link = outgoing.back().hash();
  relink.new_link = header_hash;

  archive.store(address, outgoing, relink);
  rechain(header_hash, result.block.entries);
  return result;
}

std::vector<LedgerEntry> reconstruct_history(const Archive& archive, const AppendableBlock& block) {
  std::vector<LedgerEntry> out;
  for (auto& a : archive.read(block.header.external_address)) out.push_back(std::move(a.entry));
  const std::size_t archived = out.size();
  out.insert(out.end(), block.entries.begin(), block.entries.end());
  if (archived > 0) rechain(out[archived - 1].hash(), std::span(out).subspan(archived));
  return out;
}

void Ledger::open_block(const PublicKey& owner_pk, Millis ts, std::string external_address) {
  if (blocks_.contains(owner_pk)) throw LedgerError("block exists");
  AppendableBlock block;
  block.header.owner_pk = owner_pk;
  block.header.prev_header_hash = last_header_hash_;
  block.header.created_ts = ts;
  block.header.external_address = std::move(external_address);

  last_header_hash_ = block.header.hash();
  blocks_.emplace(owner_pk, std::move(block));
  creation_order_.push_back(owner_pk);
}

void Ledger::create_block(const PublicKey& owner_pk, const Genesis& genesis, Millis ts,
                          std::string external_address) {
  if (blocks_.contains(owner_pk)) throw LedgerError("block exists");
  if (genesis.vehicle_pk != owner_pk) throw LedgerError("ownership");

  // Validate before touching the ledger so a rejected genesis leaves no trace.
  AppendableBlock probe;
  probe.header.owner_pk = owner_pk;
  probe.header.prev_header_hash = last_header_hash_;
  probe.header.created_ts = ts;
  probe.header.external_address = external_address;
  AppendableBlock block = append_entry(probe, genesis);

  last_header_hash_ = block.header.hash();
  blocks_.emplace(owner_pk, std::move(block));
  creation_order_.push_back(owner_pk);
  apply_to_view(owner_pk, genesis);
}

const AppendableBlock* Ledger::lookup(const PublicKey& pk) const {
  auto it = blocks_.find(pk);
  return it == blocks_.end() ? nullptr : &it->second;
}

const AttestationView* Ledger::view(const PublicKey& pk) const {
  auto it = views_.find(pk);
  return it == views_.end() ? nullptr : &it->second;
}

AppendableBlock& Ledger::block_for(const PublicKey& pk) {
  auto it = blocks_.find(pk);
  if (it == blocks_.end()) throw LedgerError("no block for key " + pk.hex());
  return it->second;
}

void Ledger::append(const PublicKey& owner_pk, Transaction tx) {
  if (std::holds_alternative<Genesis>(tx)) throw LedgerError("genesis only at block creation");
  AppendableBlock& block = block_for(owner_pk);
  AppendableBlock next = append_entry(block, tx);
  block = std::move(next);
  apply_to_view(owner_pk, tx);
}

std::size_t Ledger::prune(const PublicKey& owner_pk, Archive& archive) {
  AppendableBlock& block = block_for(owner_pk);
  PruneResult r = prune_to_two(block, archive);
  block = std::move(r.block);
  return r.archived;
}

std::size_t Ledger::append_and_prune(const PublicKey& owner_pk, Transaction tx, Archive& archive) {
  if (std::holds_alternative<Genesis>(tx)) throw LedgerError("genesis only at block creation");
  AppendableBlock& block = block_for(owner_pk);
  PruneResult r = prune_to_two(append_entry(block, tx), archive);
  block = std::move(r.block);
  apply_to_view(owner_pk, tx);
  return r.archived;
}

void Ledger::apply_to_view(const PublicKey& owner_pk, const Transaction& tx) {
  if (const auto* g = std::get_if<Genesis>(&tx)) {
    views_[owner_pk] = AttestationView{g->ssid, g->ecu_list, std::nullopt, 0};
    return;
  }
  auto it = views_.find(owner_pk);
  if (it == views_.end()) return;  // audit blocks carry no attestation state
  AttestationView& v = it->second;
  if (const auto* u = std::get_if<Update>(&tx)) {
    v.expected_ssid = u->new_ssid;
    for (const auto& change : u->ecu_changes)
      if (change.ecu_id < v.registry.size()) v.registry[change.ecu_id] = change;
  } else if (const auto* c = std::get_if<ChallengeRecord>(&tx)) {
    v.last_challenge_ts = c->response.ts;
    ++v.challenge_records;
  }
}

bool Ledger::validate() const {
  Digest prev{};
  for (const auto& pk : creation_order_) {
    const AppendableBlock& block = blocks_.at(pk);
    if (block.header.owner_pk != pk || block.header.prev_header_hash != prev) return false;
    if (!validate_block(block)) return false;
    prev = block.header.hash();
  }
  return true;
}

Bytes Ledger::serialize() const {
  wire::Writer w;
  w.u64(kLedgerFormatVersion).u64(creation_order_.size());
  for (const auto& pk : creation_order_) w.field(blocks_.at(pk).encode());
  return std::move(w).take();
}

std::size_t Ledger::serialized_size() const {
  std::size_t total = 16;
  for (const auto& pk : creation_order_) total += 4 + blocks_.at(pk).encode().size();
  return total;
}

}  // namespace bferl
