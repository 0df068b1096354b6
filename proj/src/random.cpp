#include "rplsim/random.hpp"

namespace rplsim {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t master_seed, StreamPurpose purpose, std::optional<NodeId> node_scope)
{
    std::uint64_t h = splitmix64(master_seed);
    h = splitmix64(h ^ (static_cast<std::uint64_t>(purpose) + 1) * 0x100000001b3ULL);
    // scope 0 and "no scope" must differ
    const std::uint64_t scope = node_scope ? static_cast<std::uint64_t>(*node_scope) + 1 : 0;
    return splitmix64(h ^ (scope << 8));
}

} // namespace

std::string_view to_string(StreamPurpose purpose)
{
    switch (purpose) {
    case StreamPurpose::Topology: return "topology";
    case StreamPurpose::Traffic: return "traffic";
    case StreamPurpose::Medium: return "medium";
    case StreamPurpose::ProtocolJitter: return "protocol-jitter";
    }
    return "unknown";
}

RandomStream::RandomStream(std::uint64_t master_seed, StreamPurpose purpose, std::optional<NodeId> node_scope)
    : engine_(stream_key(master_seed, purpose, node_scope))
{
}

double RandomStream::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomStream::uniform_int(std::uint64_t lo, std::uint64_t hi)
{
    if (hi < lo)
        throw ContractViolation("uniform_int: empty range");
    const std::uint64_t span = hi - lo;
    if (span == std::numeric_limits<std::uint64_t>::max())
        return engine_();
    const std::uint64_t n = span + 1;
    constexpr std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    // 2^64 mod n; draws above max - rem would bias the low residues
    const std::uint64_t rem = (max % n + 1) % n;
    std::uint64_t draw;
    do {
        draw = engine_();
    } while (draw > max - rem);
    return lo + draw % n;
}

} // namespace rplsim
