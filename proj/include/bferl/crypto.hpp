#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bferl {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// Fixed-width byte value. The tag keeps digests and keys from being mixed up.
template <std::size_t N, typename Tag>
struct FixedBytes {
  static constexpr std::size_t size = N;
  std::array<std::uint8_t, N> bytes{};

  ByteView view() const { return bytes; }
  bool is_zero() const {
    for (auto b : bytes)
      if (b != 0) return false;
    return true;
  }

  // Parses exactly 2*N hex characters; throws std::invalid_argument otherwise.
  static FixedBytes from_hex(std::string_view hex);
  std::string hex() const;

  friend auto operator<=>(const FixedBytes&, const FixedBytes&) = default;
};

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

template <std::size_t N, typename Tag>
FixedBytes<N, Tag> FixedBytes<N, Tag>::from_hex(std::string_view hex) {
  Bytes raw = bferl::from_hex(hex);
  if (raw.size() != N) throw std::invalid_argument("hex value has wrong length");
  FixedBytes out;
  std::copy(raw.begin(), raw.end(), out.bytes.begin());
  return out;
}

template <std::size_t N, typename Tag>
std::string FixedBytes<N, Tag>::hex() const {
  return to_hex(bytes);
}

struct DigestTag {};
struct PublicKeyTag {};
struct SeedTag {};

/// SHA-256 output.
using Digest = FixedBytes<32, DigestTag>;
/// Ed25519 public key; doubles as the identity of every node.
using PublicKey = FixedBytes<32, PublicKeyTag>;
/// Key-generation seed. Same seed, same key pair.
using Seed = FixedBytes<32, SeedTag>;

inline constexpr std::size_t kSignatureSize = 64;

/// Signature bytes as received off the wire. Length is not enforced here so
/// that truncated or padded values can be carried and rejected by verify().
struct Signature {
  Bytes bytes;
  friend bool operator==(const Signature&, const Signature&) = default;
};

class SecretKey {
 public:
  SecretKey() = default;
  explicit SecretKey(const std::array<std::uint8_t, 64>& raw) : raw_(raw) {}
  const std::array<std::uint8_t, 64>& raw() const { return raw_; }

 private:
  std::array<std::uint8_t, 64> raw_{};
};

struct KeyPair {
  PublicKey public_key;
  SecretKey secret;
};

Digest hash(ByteView data);
inline Digest hash(std::string_view s) { return hash(as_bytes(s)); }

/// Incremental SHA-256 for hashing concatenations without building a buffer.
class Hasher {
 public:
  Hasher();
  Hasher& update(ByteView data);
  Hasher& update(std::uint8_t byte) { return update(ByteView(&byte, 1)); }
  Digest finish();

 private:
  alignas(64) std::array<std::uint8_t, 128> state_{};
};

KeyPair generate_keypair(const Seed& seed);

/// Derives a seed from a label and an index, e.g. ("vehicle", 7) under a run seed.
Seed derive_seed(std::uint64_t run_seed, std::string_view label, std::uint64_t index);

Signature sign(const SecretKey& secret, ByteView message);
bool verify(const PublicKey& public_key, ByteView message, const Signature& sig);

}  // namespace bferl
