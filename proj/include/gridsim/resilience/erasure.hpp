#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gridsim/discovery/registry.hpp"

namespace gridsim::resilience {

struct ErasureParams {
    int k = 2;  // shares needed to reconstruct
    int n = 4;  // shares produced

    std::vector<std::string> violations() const;
    void validate() const;  // throws InvalidSpec

    /// Parameters for a sub-grid with `holders` members able to keep a
    /// share: the defaults when there are enough holders, otherwise
    /// n = holders and k = ceil(n / 2). Zero holders gives {0, 0}.
    static ErasureParams scaled_for(int holders, ErasureParams defaults);

    friend bool operator==(const ErasureParams&, const ErasureParams&) = default;
};

struct Share {
    int index = 0;  // 1..n; 1..k carry the data stripes
    std::vector<std::uint8_t> payload;
    std::uint64_t registry_version = 0;
    std::uint32_t checksum = 0;  // CRC-32 of payload

    bool checksum_ok() const;
};

std::uint32_t crc32(std::span<const std::uint8_t> bytes);

/// Systematic MDS code over GF(256): a Vandermonde matrix reduced so its
/// top k rows are the identity. Any k of the n shares recover the data.
class ErasureCode {
public:
    explicit ErasureCode(ErasureParams params);  // throws InvalidSpec

    const ErasureParams& params() const { return params_; }

    /// Splits `data` into k zero-padded stripes of ceil(size / k) bytes.
    std::vector<Share> encode(std::span<const std::uint8_t> data, std::uint64_t version) const;

    /// Returns the k concatenated stripes (original data plus padding).
    /// Shares with bad checksums are skipped. Throws InsufficientShares or
    /// VersionConflict.
    std::vector<std::uint8_t> decode(std::span<const Share> shares) const;

    /// Row `index - 1` of the generator matrix.
    std::vector<std::uint8_t> generator_row(int index) const;

private:
    ErasureParams params_;
    std::vector<std::vector<std::uint8_t>> generator_;  // n x k
};

std::vector<Share> encode_registry(const discovery::Registry& registry, ErasureParams params);
discovery::Registry decode_registry(std::span<const Share> shares, ErasureParams params);

/// Wire framing, little-endian:
///   u64 registry_version | u8 index | u32 payload length | u32 crc32 | payload
std::vector<std::uint8_t> frame(const Share& share);
Share unframe(std::span<const std::uint8_t> bytes);  // throws GridError on truncation

}  // namespace gridsim::resilience
