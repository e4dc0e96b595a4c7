#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>

#include "bferl/archive.hpp"
#include "bferl/ledger.hpp"
#include "bferl/wire.hpp"
#include "support/fixtures.hpp"

using namespace bferl;

namespace {

struct Chain {
  KeyPair maker = fixtures::keys("maker");
  KeyPair vehicle = fixtures::keys("vehicle");
  KeyPair rsu = fixtures::keys("rsu");
  EcuState state;
  Genesis genesis;

  explicit Chain(std::uint64_t seed = 1) : state(initial(seed)) {
    genesis = make_genesis(maker, vehicle.public_key, state, 1);
  }

  static EcuState initial(std::uint64_t seed) {
    Rng rng(seed);
    return fixtures::random_state(rng, 8);
  }

  ChallengeRecord record(Millis ts) const {
    ChallengeResponse resp;
    resp.ssid = compute_ssid(state);
    resp.subset = {state.at(0)};
    resp.ts = ts;
    resp.vehicle_pk = vehicle.public_key;
    seal(resp, vehicle.secret);
    ChallengeRecord rec{resp, rsu.public_key, {}};
    seal(rec, rsu.secret);
    return rec;
  }

  AppendableBlock block_with(std::size_t records) const {
    AppendableBlock b;
    b.header = {vehicle.public_key, {}, 1, "archive://test"};
    b = append_entry(b, genesis);
    for (std::size_t i = 0; i < records; ++i) b = append_entry(b, record(1000 * (i + 1)));
    return b;
  }
};

class FailingArchive final : public Archive {
 public:
  void store(const std::string&, std::span<const LedgerEntry>, const RelinkEvent&) override {
    throw ArchiveError("disk full");
  }
  std::vector<ArchivedEntry> read(const std::string&) const override { return {}; }
  std::vector<RelinkEvent> relinks(const std::string&) const override { return {}; }
  std::uint64_t count(const std::string&) const override { return 0; }
  std::optional<Digest> last_hash(const std::string&) const override { return std::nullopt; }
};

TEST(Block, AppendChainsToHeaderThenPredecessor) {
  Chain c;
  AppendableBlock b = c.block_with(2);
  ASSERT_EQ(b.entries.size(), 3u);
  EXPECT_EQ(b.entries[0].prev_link, b.header.hash());
  EXPECT_EQ(b.entries[1].prev_link, b.entries[0].hash());
  EXPECT_EQ(b.entries[2].prev_link, b.entries[1].hash());
  EXPECT_EQ(b.entries[2].entry_ts, 2000u);
  EXPECT_TRUE(validate_block(b));
}

TEST(Block, EncodeDecodeRoundTrip) {
  Chain c;
  AppendableBlock b = c.block_with(3);
  EXPECT_EQ(decode_block(b.encode()), b);
  Bytes trailing = b.encode();
  trailing.push_back(0);
  EXPECT_THROW(decode_block(trailing), wire::DecodeError);
}

TEST(Block, AppendRejectsBadSignatureAndWrongOwner) {
  Chain c;
  AppendableBlock b = c.block_with(0);
  ChallengeRecord forged = c.record(1000);
  forged.rsu_sig.bytes[0] ^= 1;
  EXPECT_THROW(append_entry(b, forged), LedgerError);

  Chain other(2);
  other.vehicle = fixtures::keys("vehicle", 7);
  try {
    append_entry(b, other.record(1000));
    FAIL();
  } catch (const LedgerError& e) {
    EXPECT_STREQ(e.what(), "ownership");
  }
}

TEST(Block, TamperingIsDetected) {
  Chain c;
  AppendableBlock b = c.block_with(3);

  AppendableBlock swapped = b;
  std::swap(swapped.entries[1], swapped.entries[2]);
  EXPECT_FALSE(validate_block(swapped));

  AppendableBlock dropped = b;
  dropped.entries.erase(dropped.entries.begin() + 1);
  EXPECT_FALSE(validate_block(dropped));

  AppendableBlock relinked = b;
  relinked.entries[2].prev_link.bytes[5] ^= 0x10;
  EXPECT_FALSE(validate_block(relinked));

  AppendableBlock retimed = b;
  retimed.entries[3].entry_ts += 1;
  EXPECT_FALSE(validate_block(retimed));

  AppendableBlock rehomed = b;
  rehomed.header.external_address = "archive://elsewhere";
  EXPECT_FALSE(validate_block(rehomed));
}

// Every single-byte mutation of the serialized block is caught either by the
// decoder or by validation.
TEST(Block, ByteMutationProperty) {
  Chain c;
  Rng rng(31);
  for (std::size_t n = 0; n <= 4; ++n) {
    Bytes raw = c.block_with(n).encode();
    for (std::size_t i = 0; i < raw.size(); i += 7) {
      Bytes m = raw;
      m[i] ^= static_cast<std::uint8_t>(1 + rng.below(255));
      bool detected = false;
      try {
        detected = !validate_block(decode_block(m));
      } catch (const wire::DecodeError&) {
        detected = true;
      }
      ASSERT_TRUE(detected) << "n=" << n << " byte=" << i;
    }
  }
}

TEST(Prune, TwoEntriesUnchanged) {
  Chain c;
  MemoryArchive archive;
  AppendableBlock b = c.block_with(1);
  PruneResult r = prune_to_two(b, archive);
  EXPECT_EQ(r.archived, 0u);
  EXPECT_EQ(r.block, b);
  EXPECT_EQ(archive.total_entries(), 0u);
}

TEST(Prune, FiveEntriesArchivesThree) {
  Chain c;
  MemoryArchive archive;
  AppendableBlock full = c.block_with(4);
  PruneResult r = prune_to_two(full, archive);
  EXPECT_EQ(r.archived, 3u);
  ASSERT_EQ(r.block.entries.size(), 2u);
  EXPECT_TRUE(validate_block(r.block));
  EXPECT_EQ(r.block.entries[0].prev_link, r.block.header.hash());
  EXPECT_EQ(archive.count("archive://test"), 3u);
  ASSERT_EQ(archive.relinks("archive://test").size(), 1u);
  EXPECT_EQ(archive.relinks("archive://test")[0].next_seq, 3u);
  EXPECT_EQ(archive.relinks("archive://test")[0].original_link, full.entries[2].hash());

  auto history = reconstruct_history(archive, r.block);
  EXPECT_EQ(history, full.entries);
  EXPECT_TRUE(verify_chain(full.header.hash(), history));
}

TEST(Prune, RepeatedPruningMatchesShadowCopy) {
  Chain c;
  MemoryArchive archive;
  AppendableBlock shadow = c.block_with(0);
  AppendableBlock live = shadow;
  for (Millis k = 1; k <= 12; ++k) {
    ChallengeRecord rec = c.record(1000 * k);
    shadow = append_entry(shadow, rec);
    live = prune_to_two(append_entry(live, rec), archive).block;
    ASSERT_EQ(live.entries.size(), 2u);
    ASSERT_TRUE(validate_block(live));
    auto history = reconstruct_history(archive, live);
    ASSERT_EQ(history, shadow.entries) << k;
    ASSERT_TRUE(verify_chain(shadow.header.hash(), history));
  }
}

TEST(Prune, ArchiveFailureLeavesLedgerUnchanged) {
  Chain c;
  Ledger ledger;
  ledger.create_block(c.vehicle.public_key, c.genesis, 1, "archive://test");
  ledger.append(c.vehicle.public_key, c.record(1000));
  Bytes before = ledger.serialize();
  AttestationView view_before = *ledger.view(c.vehicle.public_key);
  FailingArchive failing;
  EXPECT_THROW(ledger.append_and_prune(c.vehicle.public_key, c.record(2000), failing), ArchiveError);
  EXPECT_EQ(ledger.serialize(), before);
  EXPECT_EQ(ledger.view(c.vehicle.public_key)->challenge_records, view_before.challenge_records);
  EXPECT_EQ(ledger.view(c.vehicle.public_key)->last_challenge_ts, view_before.last_challenge_ts);
}

TEST(Ledger, CreateLookupAndErrors) {
  Chain c;
  Ledger ledger;
  EXPECT_EQ(ledger.lookup(c.vehicle.public_key), nullptr);
  ledger.create_block(c.vehicle.public_key, c.genesis, 1, "archive://a");
  ASSERT_NE(ledger.lookup(c.vehicle.public_key), nullptr);
  EXPECT_EQ(ledger.lookup(c.vehicle.public_key)->entries.size(), 1u);
  EXPECT_EQ(ledger.view(c.vehicle.public_key)->expected_ssid, c.genesis.ssid);

  try {
    ledger.create_block(c.vehicle.public_key, c.genesis, 1, "archive://a");
    FAIL();
  } catch (const LedgerError& e) {
    EXPECT_STREQ(e.what(), "block exists");
  }
  EXPECT_THROW(ledger.create_block(c.rsu.public_key, c.genesis, 1, "archive://b"), LedgerError);
  Chain d(3);
  d.vehicle = fixtures::keys("vehicle", 3);
  Genesis forged = make_genesis(d.maker, d.vehicle.public_key, d.state, 1);
  forged.sig.bytes[0] ^= 1;
  EXPECT_THROW(ledger.create_block(d.vehicle.public_key, forged, 1, "archive://c"), LedgerError);
  EXPECT_EQ(ledger.block_count(), 1u);
  EXPECT_THROW(ledger.append(c.vehicle.public_key, c.genesis), LedgerError);
  EXPECT_TRUE(ledger.validate());
}

TEST(Ledger, HeaderChainLinksBlocks) {
  Ledger ledger;
  for (std::uint64_t i = 0; i < 3; ++i) {
    Chain c(i);
    c.vehicle = fixtures::keys("vehicle", i);
    c.genesis = make_genesis(c.maker, c.vehicle.public_key, c.state, 1);
    ledger.create_block(c.vehicle.public_key, c.genesis, i + 1, "archive://" + std::to_string(i));
  }
  const auto& order = ledger.creation_order();
  ASSERT_EQ(order.size(), 3u);
  EXPECT_TRUE(ledger.lookup(order[0])->header.prev_header_hash.is_zero());
  EXPECT_EQ(ledger.lookup(order[1])->header.prev_header_hash, ledger.lookup(order[0])->header.hash());
  EXPECT_EQ(ledger.lookup(order[2])->header.prev_header_hash, ledger.lookup(order[1])->header.hash());
  EXPECT_TRUE(ledger.validate());
}

TEST(Ledger, SerializedSize) {
  Ledger ledger;
  EXPECT_EQ(ledger.serialized_size(), 16u);
  EXPECT_EQ(ledger.serialize().size(), 16u);
  std::vector<std::size_t> sizes;
  for (std::uint64_t i = 0; i < 6; ++i) {
    Chain c(i);
    c.vehicle = fixtures::keys("vehicle", i);
    c.genesis = make_genesis(c.maker, c.vehicle.public_key, c.state, 1);
    ledger.create_block(c.vehicle.public_key, c.genesis, 1, "archive://fixed");
    sizes.push_back(ledger.serialized_size());
    ASSERT_EQ(ledger.serialize().size(), sizes.back());
  }
  // Identical-shape blocks add identical byte counts.
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    EXPECT_GT(sizes[i], sizes[i - 1]);
    EXPECT_EQ(sizes[i] - sizes[i - 1], sizes[1] - sizes[0]);
  }
}

TEST(FileArchive, RecordsAreBitExact) {
  auto dir = std::filesystem::temp_directory_path() / "bferl_archive_test";
  std::filesystem::remove_all(dir);
  Chain c;
  FileArchive archive(dir);
  AppendableBlock full = c.block_with(4);
  PruneResult r = prune_to_two(full, archive);
  ASSERT_EQ(r.archived, 3u);

  std::ifstream in(archive.log_path("archive://test"), std::ios::binary);
  Bytes raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Bytes expected;
  for (std::uint64_t i = 0; i < 3; ++i) {
    Bytes rec = encode_archive_record(i, full.entries[i]);
    expected.insert(expected.end(), rec.begin(), rec.end());
  }
  EXPECT_EQ(raw, expected);
  EXPECT_EQ(archive.log_path("archive://test").filename(), "archive___test.log");

  auto decoded = decode_archive(raw);
  ASSERT_EQ(decoded.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(decoded[i].seq, i);
    EXPECT_EQ(decoded[i].entry, full.entries[i]);
  }
  std::vector<RelinkEvent> relinks{{3, full.entries[2].hash(), full.header.hash()}};
  EXPECT_EQ(archive.relinks("archive://test"), relinks);
  EXPECT_EQ(archive.last_hash("archive://test"), full.entries[2].hash());
  EXPECT_EQ(reconstruct_history(archive, r.block), full.entries);
  std::filesystem::remove_all(dir);
}

TEST(FileArchive, CorruptSequenceRejected) {
  Chain c;
  AppendableBlock b = c.block_with(1);
  Bytes raw = encode_archive_record(1, b.entries[0]);
  EXPECT_THROW(decode_archive(raw), wire::DecodeError);
}

}  // namespace
