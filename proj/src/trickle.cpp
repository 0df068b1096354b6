#include "rplsim/trickle.hpp"

#include <algorithm>

namespace rplsim {

SimTime trickle_draw_point(SimTime interval, RandomStream &stream)
{
    const std::int64_t half = interval.count() / 2;
    const std::int64_t span = interval.count() - half;
    if (span <= 0)
        return SimTime{half};
    return SimTime{half + static_cast<std::int64_t>(stream.uniform_int(0, static_cast<std::uint64_t>(span - 1)))};
}

namespace {

void begin_interval(TrickleState &state, SimTime now, RandomStream &stream)
{
    state.interval_start = now;
    state.counter = 0;
    state.fire_at = now + trickle_draw_point(state.current_interval, stream);
    state.running = true;
}

} // namespace

void trickle_reset(TrickleState &state, const TrickleConfig &cfg, SimTime now, RandomStream &stream)
{
    state.current_interval = cfg.i_min;
    begin_interval(state, now, stream);
}

void trickle_next_interval(TrickleState &state, const TrickleConfig &cfg, SimTime now, RandomStream &stream)
{
    state.current_interval = std::clamp(state.current_interval * 2, cfg.i_min, cfg.i_max());
    begin_interval(state, now, stream);
}

} // namespace rplsim
