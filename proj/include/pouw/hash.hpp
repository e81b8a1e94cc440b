#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pouw {

using Bytes = std::vector<std::uint8_t>;

/// Fixed-size byte digest. Ordering is lexicographic, which equals the
/// big-endian integer order used by the lottery.
template <std::size_t N, class Tag>
struct FixedBytes {
  std::array<std::uint8_t, N> bytes{};

  static constexpr std::size_t size() noexcept { return N; }
  std::span<const std::uint8_t> span() const noexcept { return bytes; }
  bool is_zero() const noexcept {
    for (auto b : bytes)
      if (b) return false;
    return true;
  }

  friend auto operator<=>(const FixedBytes&, const FixedBytes&) = default;
};

struct Hash256Tag {};
struct AddressTag {};
using Hash256 = FixedBytes<32, Hash256Tag>;
/// Opaque 20-byte miner identifier.
using Address = FixedBytes<20, AddressTag>;

std::string to_hex(std::span<const std::uint8_t> bytes);
/// Throws Error(Malformed) on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

template <std::size_t N, class Tag>
std::string to_hex(const FixedBytes<N, Tag>& v) {
  return to_hex(v.span());
}

/// Parses exactly N bytes of hex; throws Error(Malformed) otherwise.
template <class T>
T fixed_from_hex(std::string_view hex);

/// Incremental SHA-256 (OpenSSL EVP backend).
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  Sha256& update(std::span<const std::uint8_t> data);
  Sha256& update(std::string_view text);
  template <std::size_t N, class Tag>
  Sha256& update(const FixedBytes<N, Tag>& v) {
    return update(v.span());
  }
  Hash256 finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

Hash256 sha256(std::span<const std::uint8_t> data);
Hash256 sha256(std::string_view text);

/// Canonical encoder: every field is written as a 4-byte big-endian length
/// followed by its bytes; integers are big-endian fixed width.
class CanonicalWriter {
 public:
  CanonicalWriter& bytes(std::span<const std::uint8_t> data);
  CanonicalWriter& text(std::string_view s);
  CanonicalWriter& u32(std::uint32_t v);
  CanonicalWriter& u64(std::uint64_t v);
  template <std::size_t N, class Tag>
  CanonicalWriter& fixed(const FixedBytes<N, Tag>& v) {
    return bytes(v.span());
  }

  const Bytes& data() const noexcept { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  void put_len(std::size_t n);
  Bytes out_;
};

void append_u32_be(Bytes& out, std::uint32_t v);
void append_u64_be(Bytes& out, std::uint64_t v);

}  // namespace pouw
