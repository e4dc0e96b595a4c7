#include "bferl/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace bferl {
namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  });
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

std::string to_hex(ByteView data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (auto b : data) {
    out.push_back(kDigits[b >> 4]);
    out.push_back(kDigits[b & 0x0f]);
  }
  return out;
}

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_value(hex[i]);
    int lo = hex_value(hex[i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return out;
}

Digest hash(ByteView data) {
  ensure_sodium();
  Digest d;
  crypto_hash_sha256(d.bytes.data(), data.data(), data.size());
  return d;
}

static_assert(sizeof(crypto_hash_sha256_state) <= 128);

Hasher::Hasher() {
  ensure_sodium();
  crypto_hash_sha256_init(reinterpret_cast<crypto_hash_sha256_state*>(state_.data()));
}

Hasher& Hasher::update(ByteView data) {
  crypto_hash_sha256_update(reinterpret_cast<crypto_hash_sha256_state*>(state_.data()),
                            data.data(), data.size());
  return *this;
}

Digest Hasher::finish() {
  Digest d;
  crypto_hash_sha256_final(reinterpret_cast<crypto_hash_sha256_state*>(state_.data()),
                           d.bytes.data());
  return d;
}

KeyPair generate_keypair(const Seed& seed) {
  ensure_sodium();
  static_assert(crypto_sign_PUBLICKEYBYTES == PublicKey::size);
  static_assert(crypto_sign_SECRETKEYBYTES == 64);
  static_assert(crypto_sign_SEEDBYTES == Seed::size);
  static_assert(crypto_sign_BYTES == kSignatureSize);

  KeyPair kp;
  std::array<std::uint8_t, 64> sk{};
  crypto_sign_seed_keypair(kp.public_key.bytes.data(), sk.data(), seed.bytes.data());
  kp.secret = SecretKey(sk);
  sodium_memzero(sk.data(), sk.size());
  return kp;
}

Seed derive_seed(std::uint64_t run_seed, std::string_view label, std::uint64_t index) {
  std::array<std::uint8_t, 16> ints{};
  for (int i = 0; i < 8; ++i) {
    ints[i] = static_cast<std::uint8_t>(run_seed >> (56 - 8 * i));
    ints[8 + i] = static_cast<std::uint8_t>(index >> (56 - 8 * i));
  }
  Digest d = Hasher().update(as_bytes("bferl-seed")).update(as_bytes(label)).update(ints).finish();
  Seed s;
  s.bytes = d.bytes;
  return s;
}

Signature sign(const SecretKey& secret, ByteView message) {
  ensure_sodium();
  Signature sig;
  sig.bytes.resize(kSignatureSize);
  crypto_sign_detached(sig.bytes.data(), nullptr, message.data(), message.size(),
                       secret.raw().data());
  return sig;
}

bool verify(const PublicKey& public_key, ByteView message, const Signature& sig) {
  ensure_sodium();
  if (sig.bytes.size() != kSignatureSize) return false;
  return crypto_sign_verify_detached(sig.bytes.data(), message.data(), message.size(),
                                     public_key.bytes.data()) == 0;
}

}  // namespace bferl
