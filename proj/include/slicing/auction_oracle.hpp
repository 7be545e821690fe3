#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slicing/auction.hpp"
#include "slicing/parallel.hpp"
#include "slicing/rng.hpp"

namespace slicing::oracle {

// Enumerates every multiset of at most `channels` non-empty independent BS
// sets. Only usable at toy sizes; kept free of the production search.
bool brute_force_feasible(std::span<const int> demand, int channels, const InterferenceGraph& graph);

// Max over winner subsets of summed valuation, using brute_force_feasible.
double brute_force_welfare(std::span<const Bid> bids, int channels, const InterferenceGraph& graph);

// Four-cycle 0-1-2-3-0: feasible iff no adjacent pair demands more than J.
bool four_cycle_feasible(std::span<const int> demand, int channels);

struct InstanceLimits {
    int max_bidders = 3;
    int max_channels = 5;
    int max_demand = 3;
    int max_valuation = 10;
};

// Random instance on the four-cycle with integer valuations.
AuctionInstance random_instance(Rng& rng, const InstanceLimits& limits);

struct OracleReport {
    std::int64_t instances = 0;
    std::int64_t welfare_mismatches = 0;
    std::int64_t constraint_failures = 0;
    std::int64_t payment_failures = 0;  // tau < 0 or tau > nu for a winner
    std::vector<std::string> first_failures;

    bool ok() const { return welfare_mismatches == 0 && constraint_failures == 0 && payment_failures == 0; }
};

// Instance k draws from its own stream, so serial and parallel runs agree.
OracleReport run_oracle_check(std::int64_t instances, std::uint64_t seed, const InstanceLimits& limits,
                              Exec exec = Exec::parallel);

}  // namespace slicing::oracle
