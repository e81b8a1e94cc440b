#include "pouw/hash.hpp"

#include <openssl/evp.h>

#include <stdexcept>

#include "pouw/error.hpp"

namespace pouw {

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xf]);
  }
  return s;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw Error(Errc::Malformed, "odd-length hex string");
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(hex[2 * i]);
    int lo = hex_value(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw Error(Errc::Malformed, "non-hex character");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

template <class T>
T fixed_from_hex(std::string_view hex) {
  Bytes raw = from_hex(hex);
  T v;
  if (raw.size() != v.bytes.size()) {
    throw Error(Errc::Malformed, "expected " + std::to_string(v.bytes.size()) + " hex bytes, got " +
                                     std::to_string(raw.size()));
  }
  std::copy(raw.begin(), raw.end(), v.bytes.begin());
  return v;
}

template Hash256 fixed_from_hex<Hash256>(std::string_view);
template Address fixed_from_hex<Address>(std::string_view);

struct Sha256::Impl {
  EVP_MD_CTX* ctx = nullptr;
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {
  impl_->ctx = EVP_MD_CTX_new();
  if (!impl_->ctx || EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("EVP sha256 init failed");
  }
}

Sha256::~Sha256() {
  if (impl_ && impl_->ctx) EVP_MD_CTX_free(impl_->ctx);
}

Sha256& Sha256::update(std::span<const std::uint8_t> data) {
  if (!data.empty()) EVP_DigestUpdate(impl_->ctx, data.data(), data.size());
  return *this;
}

Sha256& Sha256::update(std::string_view text) {
  if (!text.empty()) EVP_DigestUpdate(impl_->ctx, text.data(), text.size());
  return *this;
}

Hash256 Sha256::finish() {
  Hash256 h;
  unsigned int len = 0;
  EVP_DigestFinal_ex(impl_->ctx, h.bytes.data(), &len);
  EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr);
  return h;
}

Hash256 sha256(std::span<const std::uint8_t> data) { return Sha256().update(data).finish(); }
Hash256 sha256(std::string_view text) { return Sha256().update(text).finish(); }

void append_u32_be(Bytes& out, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void append_u64_be(Bytes& out, std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

void CanonicalWriter::put_len(std::size_t n) {
  if (n > 0xffffffffu) throw Error(Errc::DomainError, "canonical field exceeds 4 GiB");
  append_u32_be(out_, static_cast<std::uint32_t>(n));
}

CanonicalWriter& CanonicalWriter::bytes(std::span<const std::uint8_t> data) {
  put_len(data.size());
  out_.insert(out_.end(), data.begin(), data.end());
  return *this;
}

CanonicalWriter& CanonicalWriter::text(std::string_view s) {
  put_len(s.size());
  out_.insert(out_.end(), s.begin(), s.end());
  return *this;
}

CanonicalWriter& CanonicalWriter::u32(std::uint32_t v) {
  put_len(4);
  append_u32_be(out_, v);
  return *this;
}

CanonicalWriter& CanonicalWriter::u64(std::uint64_t v) {
  put_len(8);
  append_u64_be(out_, v);
  return *this;
}

}  // namespace pouw
