#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

#include "rplsim/types.hpp"

namespace rplsim {

enum class StreamPurpose : std::uint8_t
{
    Topology,
    Traffic,
    Medium,
    ProtocolJitter,
};

std::string_view to_string(StreamPurpose purpose);

/// Reproducible pseudo-random stream keyed by (master seed, purpose, node).
///
/// Streams are seeded independently from the key, so drawing from one stream
/// never moves another. The conversions to real and bounded-integer values
/// are done here rather than through <random> distributions, whose output is
/// implementation-defined, so draw sequences match across standard libraries.
class RandomStream
{
public:
    RandomStream(std::uint64_t master_seed, StreamPurpose purpose, std::optional<NodeId> node_scope = std::nullopt);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform();

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi], unbiased.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi);

    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

inline RandomStream derive_stream(std::uint64_t master_seed, StreamPurpose purpose,
                                  std::optional<NodeId> node_scope = std::nullopt)
{
    return RandomStream{master_seed, purpose, node_scope};
}

} // namespace rplsim
