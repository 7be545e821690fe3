#include "slicing/baselines.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

namespace slicing {

std::string to_string(Policy policy) {
    switch (policy) {
        case Policy::drl: return "drl";
        case Policy::channel_aware: return "channel_aware";
        case Policy::queue_aware: return "queue_aware";
        case Policy::random: return "random";
    }
    return "unknown";
}

Policy parse_policy(const std::string& name) {
    if (name == "drl") return Policy::drl;
    if (name == "channel_aware") return Policy::channel_aware;
    if (name == "queue_aware") return Policy::queue_aware;
    if (name == "random") return Policy::random;
    throw std::invalid_argument(fmt::format("unknown policy '{}'", name));
}

BaselineBid baseline_bid(Policy kind, std::span<const MuLocalState> states, std::span<const LinkGains> gains,
                         std::span<const BsId> areas, int bs_count, const BaselineParams& params, Rng& rng) {
    BaselineBid out;
    out.bid.demand.assign(static_cast<std::size_t>(bs_count), 0);
    out.wants.assign(states.size(), 0);
    double nu = 0.0;
    for (std::size_t n = 0; n < states.size(); ++n) {
        switch (kind) {
            case Policy::channel_aware: {
                const double advantage = gains[n].uplink - gains[n].eavesdropper;
                out.wants[n] = advantage > 0.0;
                nu += std::max(advantage, 0.0) / params.h0;
                break;
            }
            case Policy::queue_aware:
                out.wants[n] = states[n].queue >= params.queue_threshold;
                nu += out.wants[n] * states[n].queue;
                break;
            case Policy::random:
                out.wants[n] = bernoulli(rng, 0.5);
                break;
            case Policy::drl:
                throw std::invalid_argument("drl is not a baseline policy");
        }
        if (out.wants[n]) ++out.bid.demand.at(static_cast<std::size_t>(areas[n]));
    }
    if (kind == Policy::random) nu = uniform01(rng) * params.valuation_cap;
    out.bid.valuation = nu;
    return out;
}

Action baseline_act(const MuLocalState& state, int phi, LinkGains gains, const EnergyModel& energy, Rng& rng) {
    if (!phi) return {};
    Action a{1, uniform_int(rng, 0, state.tasks), 0};
    while (a.offload > 0 && !energy.transmit(a, gains)) --a.offload;
    for (int rp = state.queue; rp >= 0; --rp) {
        a.schedule = rp;
        if (energy.transmit(a, gains)) return a;
    }
    a.schedule = 0;
    return a;
}

}  // namespace slicing
