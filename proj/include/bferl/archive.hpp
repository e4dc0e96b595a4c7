#pragma once

// Off-chain storage for entries pruned out of a block.
//
// File layout, one append-only file per external address: a sequence of
// records, each an 8-byte big-endian sequence number followed by the
// canonical entry bytes. Sequence numbers start at 0 per address.

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bferl/ledger.hpp"

namespace bferl {

struct ArchiveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ArchivedEntry {
  std::uint64_t seq = 0;
  LedgerEntry entry;
};

/// The first retained entry of a pruned block was relinked to the header.
struct RelinkEvent {
  std::uint64_t next_seq = 0;  // sequence number the relinked entry will get when archived
  Digest original_link;
  Digest new_link;
  friend bool operator==(const RelinkEvent&, const RelinkEvent&) = default;
};

class Archive {
 public:
  virtual ~Archive() = default;

  /// Stores `entries` in order and records the relink. All or nothing;
  /// throws ArchiveError on failure.
  virtual void store(const std::string& address, std::span<const LedgerEntry> entries,
                     const RelinkEvent& relink) = 0;

  virtual std::vector<ArchivedEntry> read(const std::string& address) const = 0;
  virtual std::vector<RelinkEvent> relinks(const std::string& address) const = 0;

  /// Number of records stored under the address.
  virtual std::uint64_t count(const std::string& address) const = 0;
  /// Hash of the most recently stored entry, if any.
  virtual std::optional<Digest> last_hash(const std::string& address) const = 0;
};

class MemoryArchive final : public Archive {
 public:
  void store(const std::string& address, std::span<const LedgerEntry> entries,
             const RelinkEvent& relink) override;
  std::vector<ArchivedEntry> read(const std::string& address) const override;
  std::vector<RelinkEvent> relinks(const std::string& address) const override;
  std::uint64_t count(const std::string& address) const override;
  std::optional<Digest> last_hash(const std::string& address) const override;

  std::size_t total_entries() const;

 private:
  struct Stream {
    std::vector<ArchivedEntry> entries;
    std::vector<RelinkEvent> relinks;
  };
  std::map<std::string, Stream> streams_;
};

/// Writes `<dir>/<address>.log` in the record format above, plus a
/// `<dir>/<address>.relink` text file with one `next_seq original new` line per relink.
/// Characters outside [A-Za-z0-9._-] in the address become '_'.
class FileArchive final : public Archive {
 public:
  explicit FileArchive(std::filesystem::path dir);

  void store(const std::string& address, std::span<const LedgerEntry> entries,
             const RelinkEvent& relink) override;
  std::vector<ArchivedEntry> read(const std::string& address) const override;
  std::vector<RelinkEvent> relinks(const std::string& address) const override;
  std::uint64_t count(const std::string& address) const override;
  std::optional<Digest> last_hash(const std::string& address) const override;

  std::filesystem::path log_path(const std::string& address) const;

 private:
  std::filesystem::path dir_;
};

/// Encodes one archive record: u64 big-endian sequence number + entry bytes.
Bytes encode_archive_record(std::uint64_t seq, const LedgerEntry& entry);
/// Parses a whole archive file. Throws wire::DecodeError on corrupt input.
std::vector<ArchivedEntry> decode_archive(ByteView bytes);

}  // namespace bferl
