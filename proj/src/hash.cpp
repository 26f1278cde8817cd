#include "hydra/hash.hpp"

#include <openssl/evp.h>

#include <cassert>
#include <stdexcept>

namespace hydra {

Digest sha256(std::span<const std::uint8_t> data) {
    static const std::uint8_t empty = 0;
    Digest out;
    unsigned int len = 0;
    const std::uint8_t* p = data.empty() ? &empty : data.data();
    EVP_Digest(p, data.size(), out.bytes.data(), &len, EVP_sha256(), nullptr);
    assert(len == out.bytes.size());
    return out;
}

std::string Digest::hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(64);
    for (std::uint8_t b : bytes) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

namespace {

int nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

Digest Digest::from_hex(std::string_view s) {
    if (s.size() != 64) throw std::invalid_argument("digest hex must be 64 chars");
    Digest d;
    for (std::size_t i = 0; i < 32; ++i) {
        const int hi = nibble(s[2 * i]);
        const int lo = nibble(s[2 * i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("bad hex digit in digest");
        d.bytes[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return d;
}

std::uint32_t digest_mod(const Digest& d, std::uint32_t n) {
    assert(n >= 1);
    std::uint64_t rem = 0;
    for (std::uint8_t b : d.bytes) rem = ((rem << 8) | b) % n;
    return static_cast<std::uint32_t>(rem);
}

std::size_t DigestHasher::operator()(const Digest& d) const noexcept {
    std::size_t h = 0;
    for (std::size_t i = 0; i < sizeof(std::size_t); ++i) h = (h << 8) | d.bytes[i];
    return h;
}

}  // namespace hydra
