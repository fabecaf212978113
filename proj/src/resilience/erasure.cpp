#include "gridsim/resilience/erasure.hpp"

#include <algorithm>
#include <array>
#include <boost/crc.hpp>
#include <map>
#include <string>

#include "gridsim/error.hpp"
#include "gridsim/resilience/gf256.hpp"

namespace gridsim::resilience {

namespace {

using Matrix = std::vector<std::vector<std::uint8_t>>;

/// Gauss-Jordan inverse of a square matrix over GF(256).
Matrix invert(Matrix a) {
    const std::size_t n = a.size();
    Matrix inv(n, std::vector<std::uint8_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a[pivot][col] == 0) ++pivot;
        if (pivot == n) throw GridError("singular matrix in erasure decode");
        std::swap(a[pivot], a[col]);
        std::swap(inv[pivot], inv[col]);
        const std::uint8_t scale = gf256::inv(a[col][col]);
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] = gf256::mul(a[col][j], scale);
            inv[col][j] = gf256::mul(inv[col][j], scale);
        }
        for (std::size_t row = 0; row < n; ++row) {
            if (row == col || a[row][col] == 0) continue;
            const std::uint8_t f = a[row][col];
            for (std::size_t j = 0; j < n; ++j) {
                a[row][j] ^= gf256::mul(f, a[col][j]);
                inv[row][j] ^= gf256::mul(f, inv[col][j]);
            }
        }
    }
    return inv;
}

/// out ^= coef * in, byte-wise.
void mul_add(std::vector<std::uint8_t>& out, std::span<const std::uint8_t> in, std::uint8_t coef) {
    if (coef == 0) return;
    std::array<std::uint8_t, 256> row{};
    for (unsigned x = 0; x < 256; ++x) row[x] = gf256::mul(coef, static_cast<std::uint8_t>(x));
    for (std::size_t b = 0; b < in.size(); ++b) out[b] ^= row[in[b]];
}

}  // namespace

std::vector<std::string> ErasureParams::violations() const {
    std::vector<std::string> out;
    if (k < 1) out.push_back("ErasureParams.k must be >= 1");
    if (n < k) out.push_back("ErasureParams requires k <= n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
    if (n > 255) out.push_back("ErasureParams.n must be <= 255");
    return out;
}

void ErasureParams::validate() const {
    auto v = violations();
    if (!v.empty()) throw InvalidSpec(v.front());
}

ErasureParams ErasureParams::scaled_for(int holders, ErasureParams defaults) {
    if (holders <= 0) return {0, 0};
    if (holders >= defaults.n) return defaults;
    return {(holders + 1) / 2, holders};
}

std::uint32_t crc32(std::span<const std::uint8_t> bytes) {
    boost::crc_32_type crc;
    crc.process_bytes(bytes.data(), bytes.size());
    return crc.checksum();
}

bool Share::checksum_ok() const { return crc32(payload) == checksum; }

ErasureCode::ErasureCode(ErasureParams params) : params_(params) {
    params_.validate();
    const auto n = static_cast<std::size_t>(params_.n);
    const auto k = static_cast<std::size_t>(params_.k);
    Matrix vandermonde(n, std::vector<std::uint8_t>(k));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j)
            vandermonde[i][j] = gf256::pow(static_cast<std::uint8_t>(i), static_cast<unsigned>(j));
    const Matrix top_inv = invert(Matrix(vandermonde.begin(), vandermonde.begin() + static_cast<std::ptrdiff_t>(k)));
    generator_.assign(n, std::vector<std::uint8_t>(k, 0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) {
            std::uint8_t acc = 0;
            for (std::size_t m = 0; m < k; ++m) acc ^= gf256::mul(vandermonde[i][m], top_inv[m][j]);
            generator_[i][j] = acc;
        }
}

std::vector<std::uint8_t> ErasureCode::generator_row(int index) const {
    return generator_.at(static_cast<std::size_t>(index - 1));
}

std::vector<Share> ErasureCode::encode(std::span<const std::uint8_t> data, std::uint64_t version) const {
    const auto k = static_cast<std::size_t>(params_.k);
    const std::size_t stripe = (data.size() + k - 1) / k;
    std::vector<std::vector<std::uint8_t>> stripes(k, std::vector<std::uint8_t>(stripe, 0));
    for (std::size_t b = 0; b < data.size(); ++b) stripes[b / stripe][b % stripe] = data[b];

    std::vector<Share> shares;
    shares.reserve(static_cast<std::size_t>(params_.n));
    for (int i = 1; i <= params_.n; ++i) {
        Share s;
        s.index = i;
        s.registry_version = version;
        if (static_cast<std::size_t>(i) <= k) {
            s.payload = stripes[static_cast<std::size_t>(i - 1)];
        } else {
            s.payload.assign(stripe, 0);
            const auto& row = generator_[static_cast<std::size_t>(i - 1)];
            for (std::size_t j = 0; j < k; ++j) mul_add(s.payload, stripes[j], row[j]);
        }
        s.checksum = crc32(s.payload);
        shares.push_back(std::move(s));
    }
    return shares;
}

std::vector<std::uint8_t> ErasureCode::decode(std::span<const Share> shares) const {
    const auto k = static_cast<std::size_t>(params_.k);
    std::map<int, const Share*> usable;
    for (const auto& s : shares) {
        if (s.index < 1 || s.index > params_.n || !s.checksum_ok()) continue;
        usable.emplace(s.index, &s);
    }
    if (usable.size() < k)
        throw InsufficientShares("need " + std::to_string(k) + " valid shares, have " + std::to_string(usable.size()));
    const Share& first = *usable.begin()->second;
    for (const auto& [idx, s] : usable) {
        if (s->registry_version != first.registry_version)
            throw VersionConflict("shares carry different registry versions");
        if (s->payload.size() != first.payload.size())
            throw VersionConflict("shares carry different payload lengths");
    }

    std::vector<const Share*> chosen;
    for (const auto& [idx, s] : usable) {
        if (chosen.size() == k) break;
        chosen.push_back(s);
    }
    const std::size_t stripe = first.payload.size();
    Matrix sub(k);
    for (std::size_t r = 0; r < k; ++r) sub[r] = generator_[static_cast<std::size_t>(chosen[r]->index - 1)];
    const Matrix inv = invert(sub);

    std::vector<std::uint8_t> out(k * stripe, 0);
    std::vector<std::uint8_t> buf(stripe);
    for (std::size_t j = 0; j < k; ++j) {
        std::fill(buf.begin(), buf.end(), 0);
        for (std::size_t r = 0; r < k; ++r) mul_add(buf, chosen[r]->payload, inv[j][r]);
        std::copy(buf.begin(), buf.end(), out.begin() + static_cast<std::ptrdiff_t>(j * stripe));
    }
    return out;
}

std::vector<Share> encode_registry(const discovery::Registry& registry, ErasureParams params) {
    return ErasureCode(params).encode(registry.serialize(), registry.version());
}

discovery::Registry decode_registry(std::span<const Share> shares, ErasureParams params) {
    return discovery::Registry::deserialize(ErasureCode(params).decode(shares));
}

std::vector<std::uint8_t> frame(const Share& share) {
    std::vector<std::uint8_t> out;
    out.reserve(17 + share.payload.size());
    auto put = [&](std::uint64_t v, int bytes) {
        for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    };
    put(share.registry_version, 8);
    put(static_cast<std::uint64_t>(share.index), 1);
    put(share.payload.size(), 4);
    put(share.checksum, 4);
    out.insert(out.end(), share.payload.begin(), share.payload.end());
    return out;
}

Share unframe(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 17) throw GridError("truncated share frame");
    auto get = [&](std::size_t off, int n) {
        std::uint64_t v = 0;
        for (int i = 0; i < n; ++i) v |= std::uint64_t{bytes[off + static_cast<std::size_t>(i)]} << (8 * i);
        return v;
    };
    Share s;
    s.registry_version = get(0, 8);
    s.index = static_cast<int>(get(8, 1));
    const auto len = static_cast<std::size_t>(get(9, 4));
    s.checksum = static_cast<std::uint32_t>(get(13, 4));
    if (bytes.size() != 17 + len) throw GridError("share frame length mismatch");
    s.payload.assign(bytes.begin() + 17, bytes.end());
    return s;
}

}  // namespace gridsim::resilience
