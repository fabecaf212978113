#pragma once

#include <cstdint>

namespace gridsim::resilience::gf256 {

// GF(2^8) with the primitive polynomial x^8 + x^4 + x^3 + x^2 + 1 (0x11d).

std::uint8_t mul(std::uint8_t a, std::uint8_t b);
std::uint8_t inv(std::uint8_t a);  // a != 0
std::uint8_t div(std::uint8_t a, std::uint8_t b);
std::uint8_t pow(std::uint8_t a, unsigned n);
inline std::uint8_t add(std::uint8_t a, std::uint8_t b) { return a ^ b; }

}  // namespace gridsim::resilience::gf256
