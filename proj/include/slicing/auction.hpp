#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slicing/topology.hpp"

namespace slicing {

// beta_i = (nu_i, C_i): a valuation over a per-BS channel demand vector.
struct Bid {
    double valuation = 0.0;
    std::vector<int> demand;

    int total_demand() const;
};

// One BS mask per used channel: bit b set iff the channel serves a MU in area b.
using ChannelPlan = std::vector<std::uint32_t>;

struct Feasibility {
    bool feasible = false;
    ChannelPlan witness;
};

// Can demand d be packed into `channels` channels so every channel's BS set
// is independent in the graph? Exact search over maximal independent sets
// with memoised residual demands.
Feasibility feasible(std::span<const int> demand, int channels, const InterferenceGraph& graph);

// Minimum number of channels that serves `demand`.
int min_channels(std::span<const int> demand, const InterferenceGraph& graph);

struct WinnerDetermination {
    std::vector<int> winners;  // phi_i
    double welfare = 0.0;
    ChannelPlan plan;          // witness for the winners' summed demand
};

// Exhaustive over all 2^I winner sets. Ties: fewer channels, then the
// lexicographically smallest sorted index set.
WinnerDetermination winner_determination(std::span<const Bid> bids, int channels, const InterferenceGraph& graph);

// tau_i: best welfare of the others without i, minus the others' welfare under `winners`.
double vcg_payment(std::span<const Bid> bids, std::span<const int> winners, int channels,
                   const InterferenceGraph& graph, int sp);

struct MuRequest {
    int sp = 0;
    BsId bs = 0;
    bool wants_channel = false;  // z_n
};

// Concrete MU -> channel map (-1 = none). Throws std::logic_error when the
// plan does not match the winners' demands.
std::vector<int> allocate_channels(std::span<const int> winners, std::span<const Bid> bids,
                                   std::span<const MuRequest> requests, const ChannelPlan& plan, int bs_count);

struct AuctionOutcome {
    std::vector<int> winners;
    std::vector<int> channel;  // rho, per MU
    std::vector<double> payments;
    double welfare = 0.0;
};

// Winner determination, VCG payments and channel allocation in one pass;
// subset feasibility is evaluated once and shared by all payments.
AuctionOutcome run_auction(std::span<const Bid> bids, std::span<const MuRequest> requests, int channels,
                           const InterferenceGraph& graph);

// Checks interference, per-(BS,channel) exclusivity, demand coupling and
// payment sign. Returns a description of the first violation.
std::optional<std::string> check_outcome(const AuctionOutcome& outcome, std::span<const Bid> bids,
                                         std::span<const MuRequest> requests, int channels,
                                         const InterferenceGraph& graph);

// Negative valuations are dominated by abstaining; returns the clamped value.
double clamp_valuation(double nu);

// Text instance format:
//   auction-instance v1
//   bs <B>
//   edge <a> <b>          (one line per edge)
//   channels <J>
//   bid <nu> <C_0> ... <C_{B-1}>   (one line per SP)
struct AuctionInstance {
    InterferenceGraph graph;
    int channels = 0;
    std::vector<Bid> bids;
};

void write_instance(std::ostream& out, const AuctionInstance& instance);
AuctionInstance read_instance(std::istream& in);

}  // namespace slicing
