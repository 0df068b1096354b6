#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <optional>
#include <string>
#include <string_view>

namespace rplsim {

/// Virtual time: fixed-point microseconds since simulation start.
using SimTime = std::chrono::duration<std::int64_t, std::micro>;

inline SimTime from_seconds(double seconds)
{
    return SimTime{std::llround(seconds * 1e6)};
}

constexpr double to_seconds(SimTime t)
{
    return static_cast<double>(t.count()) / 1e6;
}

using NodeId = std::uint32_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct Position
{
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Position &, const Position &) = default;
};

inline double distance(Position a, Position b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

/// A scenario or sweep description that cannot be run. `field()` names the
/// offending configuration key when there is one.
class ConfigError : public std::runtime_error
{
public:
    explicit ConfigError(const std::string &message, std::string field = {})
        : std::runtime_error(field.empty() ? message : field + ": " + message), message_(message),
          field_(std::move(field))
    {
    }

    const std::string &field() const noexcept { return field_; }
    /// The message without the field prefix.
    const std::string &message() const noexcept { return message_; }

private:
    std::string message_;
    std::string field_;
};

/// Broken precondition inside the simulator (e.g. scheduling into the past).
class ContractViolation : public std::logic_error
{
public:
    using std::logic_error::logic_error;
};

} // namespace rplsim

namespace rplsim {

enum class TrafficClass : std::uint8_t
{
    HighCritical,
    Critical,
    LowCritical,
    Temperature,
};

inline constexpr std::size_t kTrafficClassCount = 4;

inline constexpr std::size_t index_of(TrafficClass c)
{
    return static_cast<std::size_t>(c);
}

std::string_view to_string(TrafficClass c);
std::optional<TrafficClass> traffic_class_from_string(std::string_view name);

} // namespace rplsim
