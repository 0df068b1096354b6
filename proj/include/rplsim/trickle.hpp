#pragma once

#include "rplsim/random.hpp"
#include "rplsim/types.hpp"

namespace rplsim {

struct TrickleConfig
{
    SimTime i_min{4'096'000};
    unsigned doublings = 8;
    unsigned redundancy_k = 10;

    SimTime i_max() const { return i_min * (std::int64_t{1} << doublings); }
};

/// RFC 6206 timer state. `fire_at` is the absolute transmission point t
/// inside the interval that began at `interval_start`.
struct TrickleState
{
    SimTime current_interval{0};
    SimTime interval_start{0};
    SimTime fire_at{0};
    unsigned counter = 0;
    bool running = false;
};

/// Uniform point in [interval/2, interval).
SimTime trickle_draw_point(SimTime interval, RandomStream &stream);

/// Back to i_min with a fresh counter and transmission point.
void trickle_reset(TrickleState &state, const TrickleConfig &cfg, SimTime now, RandomStream &stream);

/// End of an interval: double (capped at i_max), clear the counter, draw t.
void trickle_next_interval(TrickleState &state, const TrickleConfig &cfg, SimTime now, RandomStream &stream);

inline bool trickle_should_transmit(const TrickleState &state, const TrickleConfig &cfg)
{
    return state.counter < cfg.redundancy_k;
}

inline void trickle_hear_consistent(TrickleState &state)
{
    ++state.counter;
}

} // namespace rplsim
