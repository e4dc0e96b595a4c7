#pragma once

// Canonical byte encoding used for hashing, signing and storage.
//
//   integer      8 bytes, big-endian
//   byte field   4-byte big-endian length, then the raw bytes
//   list         element count as an integer, then each element
//   nested value encoded as a byte field holding its own encoding
//
// Fields are always written in declaration order.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "bferl/crypto.hpp"

namespace bferl::wire {

struct DecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Writer {
 public:
  Writer& u64(std::uint64_t v) {
    for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
    return *this;
  }

  Writer& field(ByteView data) {
    if (data.size() > 0xffffffffu) throw std::length_error("wire field exceeds 4 GiB");
    auto n = static_cast<std::uint32_t>(data.size());
    for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(n >> shift));
    out_.insert(out_.end(), data.begin(), data.end());
    return *this;
  }

  Writer& field(std::string_view s) { return field(as_bytes(s)); }

  template <std::size_t N, typename Tag>
  Writer& field(const FixedBytes<N, Tag>& v) {
    return field(v.view());
  }

  Writer& field(const Signature& s) { return field(ByteView(s.bytes)); }

  const Bytes& bytes() const& { return out_; }
  Bytes&& take() && { return std::move(out_); }

 private:
  Bytes out_;
};

class Reader {
 public:
  explicit Reader(ByteView in) : in_(in) {}

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = v << 8 | in_[pos_ + i];
    pos_ += 8;
    return v;
  }

  ByteView field() {
    need(4);
    std::uint32_t n = 0;
    for (int i = 0; i < 4; ++i) n = n << 8 | in_[pos_ + i];
    pos_ += 4;
    need(n);
    ByteView out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }

  std::string text() {
    ByteView f = field();
    return {reinterpret_cast<const char*>(f.data()), f.size()};
  }

  template <typename Fixed>
  Fixed fixed() {
    ByteView f = field();
    if (f.size() != Fixed::size) throw DecodeError("fixed-width field has wrong length");
    Fixed out;
    std::copy(f.begin(), f.end(), out.bytes.begin());
    return out;
  }

  Signature signature() {
    ByteView f = field();
    return Signature{Bytes(f.begin(), f.end())};
  }

  // List counts are bounded by the remaining input so corrupt counts cannot
  // trigger huge allocations.
  std::uint64_t count(std::size_t min_element_size) {
    std::uint64_t n = u64();
    if (min_element_size > 0 && n > remaining() / min_element_size)
      throw DecodeError("list count exceeds remaining input");
    return n;
  }

  std::size_t remaining() const { return in_.size() - pos_; }
  std::size_t position() const { return pos_; }
  bool done() const { return pos_ == in_.size(); }

  void expect_done() const {
    if (!done()) throw DecodeError("trailing bytes after value");
  }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw DecodeError("unexpected end of input");
  }

  ByteView in_;
  std::size_t pos_ = 0;
};

}  // namespace bferl::wire
