#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace hydra {

// 256-bit digest. Byte 0 is the most significant, so the default
// lexicographic ordering doubles as the big-endian integer ordering used
// for proof-of-work target comparisons.
struct Digest {
    std::array<std::uint8_t, 32> bytes{};

    auto operator<=>(const Digest&) const = default;

    std::string hex() const;
    static Digest from_hex(std::string_view s);  // throws std::invalid_argument
};

Digest sha256(std::span<const std::uint8_t> data);

// The digest read as a 256-bit big-endian integer, modulo n. Requires n >= 1.
std::uint32_t digest_mod(const Digest& d, std::uint32_t n);

struct DigestHasher {
    std::size_t operator()(const Digest& d) const noexcept;
};

}  // namespace hydra
