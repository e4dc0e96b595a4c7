#include "bferl/archive.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include "bferl/wire.hpp"

namespace bferl {

Bytes encode_archive_record(std::uint64_t seq, const LedgerEntry& entry) {
  wire::Writer w;
  w.u64(seq);
  Bytes out = std::move(w).take();
  Bytes body = entry.encode();
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

std::vector<ArchivedEntry> decode_archive(ByteView bytes) {
  wire::Reader r(bytes);
  std::vector<ArchivedEntry> out;
  while (!r.done()) {
    ArchivedEntry a;
    a.seq = r.u64();
    a.entry = read_entry(r);
    if (a.seq != out.size()) throw wire::DecodeError("archive sequence numbers out of order");
    out.push_back(std::move(a));
  }
  return out;
}

void MemoryArchive::store(const std::string& address, std::span<const LedgerEntry> entries,
                          const RelinkEvent& relink) {
  Stream& s = streams_[address];
  for (const auto& e : entries) s.entries.push_back({s.entries.size(), e});
  s.relinks.push_back(relink);
}

std::vector<ArchivedEntry> MemoryArchive::read(const std::string& address) const {
  auto it = streams_.find(address);
  return it == streams_.end() ? std::vector<ArchivedEntry>{} : it->second.entries;
}

std::vector<RelinkEvent> MemoryArchive::relinks(const std::string& address) const {
  auto it = streams_.find(address);
  return it == streams_.end() ? std::vector<RelinkEvent>{} : it->second.relinks;
}

std::uint64_t MemoryArchive::count(const std::string& address) const {
  auto it = streams_.find(address);
  return it == streams_.end() ? 0 : it->second.entries.size();
}

std::optional<Digest> MemoryArchive::last_hash(const std::string& address) const {
  auto it = streams_.find(address);
  if (it == streams_.end() || it->second.entries.empty()) return std::nullopt;
  return it->second.entries.back().entry.hash();
}

std::size_t MemoryArchive::total_entries() const {
  std::size_t n = 0;
  for (const auto& [_, s] : streams_) n += s.entries.size();
  return n;
}

namespace {

std::string sanitize(const std::string& address) {
  std::string out = address;
  for (char& c : out) {
    bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
              c == '.' || c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return out;
}

Bytes slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

FileArchive::FileArchive(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ArchiveError("cannot create archive directory " + dir_.string() + ": " + ec.message());
}

std::filesystem::path FileArchive::log_path(const std::string& address) const {
  return dir_ / (sanitize(address) + ".log");
}

void FileArchive::store(const std::string& address, std::span<const LedgerEntry> entries,
                        const RelinkEvent& relink) {
  std::uint64_t seq = count(address);
  Bytes buffer;
  for (const auto& e : entries) {
    Bytes rec = encode_archive_record(seq++, e);
    buffer.insert(buffer.end(), rec.begin(), rec.end());
  }
  std::ostringstream line;
  line << relink.next_seq << ' ' << relink.original_link.hex() << ' ' << relink.new_link.hex() << '\n';

  std::ofstream log(log_path(address), std::ios::binary | std::ios::app);
  std::ofstream rel(dir_ / (sanitize(address) + ".relink"), std::ios::app);
  if (!log || !rel) throw ArchiveError("cannot open archive files for " + address);
  log.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
  log.flush();
  if (!log) throw ArchiveError("archive write failed for " + address);
  rel << line.str();
  rel.flush();
  if (!rel) throw ArchiveError("relink log write failed for " + address);
}

std::vector<ArchivedEntry> FileArchive::read(const std::string& address) const {
  return decode_archive(slurp(log_path(address)));
}

std::vector<RelinkEvent> FileArchive::relinks(const std::string& address) const {
  std::ifstream in(dir_ / (sanitize(address) + ".relink"));
  std::vector<RelinkEvent> out;
  RelinkEvent ev;
  std::string original, fresh;
  while (in >> ev.next_seq >> original >> fresh) {
    ev.original_link = Digest::from_hex(original);
    ev.new_link = Digest::from_hex(fresh);
    out.push_back(ev);
  }
  return out;
}

std::uint64_t FileArchive::count(const std::string& address) const { return read(address).size(); }

std::optional<Digest> FileArchive::last_hash(const std::string& address) const {
  auto entries = read(address);
  if (entries.empty()) return std::nullopt;
  return entries.back().entry.hash();
}

}  // namespace bferl
