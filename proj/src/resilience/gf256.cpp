#include "gridsim/resilience/gf256.hpp"

#include <array>
#include <stdexcept>

namespace gridsim::resilience::gf256 {

namespace {

struct Tables {
    std::array<std::uint8_t, 512> exp{};
    std::array<int, 256> log{};

    Tables() {
        unsigned x = 1;
        for (int i = 0; i < 255; ++i) {
            exp[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(x);
            log[x] = i;
            x <<= 1;
            if (x & 0x100) x ^= 0x11d;
        }
        for (std::size_t i = 255; i < exp.size(); ++i) exp[i] = exp[i - 255];
        log[0] = -1;
    }
};

const Tables& tables() {
    static const Tables t;
    return t;
}

}  // namespace

std::uint8_t mul(std::uint8_t a, std::uint8_t b) {
    if (a == 0 || b == 0) return 0;
    const auto& t = tables();
    return t.exp[static_cast<std::size_t>(t.log[a] + t.log[b])];
}

std::uint8_t inv(std::uint8_t a) {
    if (a == 0) throw std::domain_error("zero has no inverse in GF(256)");
    const auto& t = tables();
    return t.exp[static_cast<std::size_t>(255 - t.log[a])];
}

std::uint8_t div(std::uint8_t a, std::uint8_t b) { return mul(a, inv(b)); }

std::uint8_t pow(std::uint8_t a, unsigned n) {
    std::uint8_t r = 1;
    for (unsigned i = 0; i < n; ++i) r = mul(r, a);
    return r;
}

}  // namespace gridsim::resilience::gf256
