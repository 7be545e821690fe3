#include "slicing/auction_oracle.hpp"

#include <algorithm>
#include <omp.h>

#include <fmt/format.h>

namespace slicing::oracle {

namespace {

std::vector<std::uint32_t> independent_sets(const InterferenceGraph& graph) {
    std::vector<std::uint32_t> sets;
    const std::uint32_t all = 1U << graph.bs_count();
    for (std::uint32_t s = 1; s < all; ++s) {
        bool ok = true;
        for (int a = 0; a < graph.bs_count() && ok; ++a) {
            for (int b = a + 1; b < graph.bs_count() && ok; ++b) {
                if (((s >> a) & 1U) && ((s >> b) & 1U) && graph.adjacent(a, b)) ok = false;
            }
        }
        if (ok) sets.push_back(s);
    }
    return sets;
}

// Distributes `left` channels over sets[k..]; cover[b] counts channels reaching BS b.
bool search(const std::vector<std::uint32_t>& sets, std::size_t k, int left, std::vector<int>& cover,
            std::span<const int> demand) {
    bool done = true;
    for (std::size_t b = 0; b < demand.size(); ++b) done = done && cover[b] >= demand[b];
    if (done) return true;
    if (k == sets.size() || left == 0) return false;
    for (int use = left; use >= 0; --use) {
        for (std::size_t b = 0; b < demand.size(); ++b) {
            if ((sets[k] >> b) & 1U) cover[b] += use;
        }
        const bool ok = search(sets, k + 1, left - use, cover, demand);
        for (std::size_t b = 0; b < demand.size(); ++b) {
            if ((sets[k] >> b) & 1U) cover[b] -= use;
        }
        if (ok) return true;
    }
    return false;
}

}  // namespace

bool brute_force_feasible(std::span<const int> demand, int channels, const InterferenceGraph& graph) {
    const auto sets = independent_sets(graph);
    std::vector<int> cover(demand.size(), 0);
    return search(sets, 0, channels, cover, demand);
}

double brute_force_welfare(std::span<const Bid> bids, int channels, const InterferenceGraph& graph) {
    double best = 0.0;
    const std::size_t subsets = std::size_t{1} << bids.size();
    for (std::size_t mask = 1; mask < subsets; ++mask) {
        std::vector<int> demand(static_cast<std::size_t>(graph.bs_count()), 0);
        double welfare = 0.0;
        for (std::size_t i = 0; i < bids.size(); ++i) {
            if (!((mask >> i) & 1U)) continue;
            welfare += bids[i].valuation;
            for (std::size_t b = 0; b < demand.size(); ++b) demand[b] += bids[i].demand[b];
        }
        if (welfare > best && brute_force_feasible(demand, channels, graph)) best = welfare;
    }
    return best;
}

bool four_cycle_feasible(std::span<const int> demand, int channels) {
    int worst = 0;
    for (int b = 0; b < 4; ++b) worst = std::max(worst, demand[b] + demand[(b + 1) % 4]);
    return worst <= channels;
}

AuctionInstance random_instance(Rng& rng, const InstanceLimits& limits) {
    AuctionInstance instance;
    instance.graph = four_cycle();
    instance.channels = uniform_int(rng, 1, limits.max_channels);
    const int bidders = uniform_int(rng, 1, limits.max_bidders);
    for (int i = 0; i < bidders; ++i) {
        Bid bid;
        bid.valuation = uniform_int(rng, 0, limits.max_valuation);
        bid.demand.resize(4);
        for (int& c : bid.demand) c = uniform_int(rng, 0, limits.max_demand);
        instance.bids.push_back(std::move(bid));
    }
    return instance;
}

namespace {

struct InstanceResult {
    bool welfare_ok = true;
    bool constraints_ok = true;
    bool payments_ok = true;
    std::string detail;
};

InstanceResult check_one(const AuctionInstance& inst) {
    InstanceResult r;
    // One requesting MU per demanded channel, MU order by SP then BS.
    std::vector<MuRequest> requests;
    for (std::size_t i = 0; i < inst.bids.size(); ++i) {
        for (int b = 0; b < inst.graph.bs_count(); ++b) {
            for (int c = 0; c < inst.bids[i].demand[b]; ++c) requests.push_back({static_cast<int>(i), b, true});
        }
    }
    const AuctionOutcome out = run_auction(inst.bids, requests, inst.channels, inst.graph);
    const double expected = brute_force_welfare(inst.bids, inst.channels, inst.graph);
    if (out.welfare != expected) {
        r.welfare_ok = false;
        r.detail = fmt::format("welfare {} vs brute force {}", out.welfare, expected);
    }
    if (auto err = check_outcome(out, inst.bids, requests, inst.channels, inst.graph)) {
        r.constraints_ok = false;
        r.detail = *err;
    }
    for (std::size_t i = 0; i < inst.bids.size(); ++i) {
        const double tau = out.payments[i];
        if (tau < 0.0 || (out.winners[i] && tau > inst.bids[i].valuation)) {
            r.payments_ok = false;
            r.detail = fmt::format("SP {} pays {} for valuation {}", i, tau, inst.bids[i].valuation);
        }
    }
    return r;
}

}  // namespace

OracleReport run_oracle_check(std::int64_t instances, std::uint64_t seed, const InstanceLimits& limits, Exec exec) {
    std::vector<InstanceResult> results(static_cast<std::size_t>(instances));
    auto body = [&](std::int64_t k) {
        Rng rng = make_stream(seed, "auction-oracle", static_cast<std::uint64_t>(k));
        results[k] = check_one(random_instance(rng, limits));
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 64)
        for (std::int64_t k = 0; k < instances; ++k) body(k);
    } else {
        for (std::int64_t k = 0; k < instances; ++k) body(k);
    }

    OracleReport report;
    report.instances = instances;
    for (std::int64_t k = 0; k < instances; ++k) {
        const auto& r = results[k];
        report.welfare_mismatches += !r.welfare_ok;
        report.constraint_failures += !r.constraints_ok;
        report.payment_failures += !r.payments_ok;
        if (!r.detail.empty() && report.first_failures.size() < 5) {
            report.first_failures.push_back(fmt::format("instance {}: {}", k, r.detail));
        }
    }
    return report;
}

}  // namespace slicing::oracle
