#pragma once

#include <span>
#include <string>
#include <vector>

#include "slicing/auction.hpp"
#include "slicing/env.hpp"
#include "slicing/rng.hpp"

namespace slicing {

enum class Policy { drl, channel_aware, queue_aware, random };

std::string to_string(Policy policy);
// Accepts drl | channel_aware | queue_aware | random.
Policy parse_policy(const std::string& name);

struct BaselineParams {
    int queue_threshold = 5;
    double valuation_cap = 10.0;
    double h0 = 1e-4;  // normalises the channel-aware score
};

struct BaselineBid {
    Bid bid;
    std::vector<int> wants;  // z_n per MU
};

// Bid for one SP's MUs. `areas` gives each MU's serving BS.
BaselineBid baseline_bid(Policy kind, std::span<const MuLocalState> states, std::span<const LinkGains> gains,
                         std::span<const BsId> areas, int bs_count, const BaselineParams& params, Rng& rng);

// Random R_t in {0..A_t}, lowered until transmittable, then the largest
// feasible R_p <= W. No channel means the no-op.
Action baseline_act(const MuLocalState& state, int phi, LinkGains gains, const EnergyModel& energy, Rng& rng);

}  // namespace slicing
