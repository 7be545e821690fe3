#include <doctest.h>

#include <array>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "slicing/auction.hpp"
#include "slicing/auction_oracle.hpp"

using namespace slicing;

namespace {

InterferenceGraph single_bs() { return InterferenceGraph(1, {}); }

ref::Adjacency adjacency_of(const InterferenceGraph& g) {
    ref::Adjacency a(g.bs_count(), std::vector<bool>(g.bs_count(), false));
    for (int x = 0; x < g.bs_count(); ++x) {
        for (int y = 0; y < g.bs_count(); ++y) a[x][y] = g.adjacent(x, y);
    }
    return a;
}

std::vector<ref::RefBid> to_ref(const std::vector<Bid>& bids) {
    std::vector<ref::RefBid> out;
    for (const Bid& b : bids) out.push_back({b.valuation, b.demand});
    return out;
}

// Witness check: every channel is an independent set and the plan covers the demand exactly.
void check_witness(const ChannelPlan& plan, const std::vector<int>& demand, int channels,
                   const InterferenceGraph& g) {
    CHECK(static_cast<int>(plan.size()) <= channels);
    std::vector<int> served(demand.size(), 0);
    for (std::uint32_t mask : plan) {
        CHECK(g.independent(mask));
        for (std::size_t b = 0; b < demand.size(); ++b) served[b] += (mask >> b) & 1U;
    }
    CHECK(served == demand);
}

}  // namespace

TEST_CASE("feasibility examples on the 4-cycle") {
    const InterferenceGraph g = four_cycle();
    const std::vector<int> zero{0, 0, 0, 0};
    const Feasibility z = feasible(zero, 1, g);
    CHECK(z.feasible);
    CHECK(z.witness.empty());

    const std::vector<int> d{3, 2, 3, 2};
    const Feasibility f = feasible(d, 5, g);
    REQUIRE(f.feasible);
    check_witness(f.witness, d, 5, g);
    CHECK_FALSE(feasible(d, 4, g).feasible);
    CHECK_FALSE(feasible(std::vector<int>{3, 3, 0, 0}, 5, g).feasible);
    CHECK(min_channels(d, g) == 5);
    CHECK(min_channels(zero, g) == 0);
}

TEST_CASE("feasibility agrees with the closed form and the reachability reference") {
    const InterferenceGraph g = four_cycle();
    const ref::Adjacency adj = ref::cycle4();
    int checked = 0;
    for (int a = 0; a <= 4; ++a) {
        for (int b = 0; b <= 4; ++b) {
            for (int c = 0; c <= 4; ++c) {
                for (int e = 0; e <= 4; ++e) {
                    const std::vector<int> d{a, b, c, e};
                    for (int j = 1; j <= 6; ++j) {
                        const Feasibility f = feasible(d, j, g);
                        REQUIRE(f.feasible == ref::cycle4_closed_form(d, j));
                        if ((a + b + c + e) % 3 == 0 && j <= 4) REQUIRE(f.feasible == ref::feasible(d, j, adj));
                        if (f.feasible) check_witness(f.witness, d, j, g);
                        ++checked;
                    }
                }
            }
        }
    }
    CHECK(checked == 625 * 6);
}

TEST_CASE("feasibility on a triangle and a path matches the reference") {
    const InterferenceGraph tri(3, {{0, 1}, {1, 2}, {0, 2}});
    const InterferenceGraph path(3, {{0, 1}, {1, 2}});
    for (const InterferenceGraph* g : {&tri, &path}) {
        const ref::Adjacency adj = adjacency_of(*g);
        for (int a = 0; a <= 3; ++a) {
            for (int b = 0; b <= 3; ++b) {
                for (int c = 0; c <= 3; ++c) {
                    const std::vector<int> d{a, b, c};
                    for (int j = 1; j <= 5; ++j) CHECK(feasible(d, j, *g).feasible == ref::feasible(d, j, adj));
                }
            }
        }
    }
}

TEST_CASE("sole bidder wins and pays nothing") {
    const InterferenceGraph g = four_cycle();
    const std::vector<Bid> bids{{4.0, {1, 0, 2, 0}}};
    const WinnerDetermination wd = winner_determination(bids, 3, g);
    CHECK(wd.winners == std::vector<int>{1});
    CHECK(wd.welfare == 4.0);
    CHECK(vcg_payment(bids, wd.winners, 3, g, 0) == 0.0);
}

TEST_CASE("one BS, one channel, valuations 5, 3, 2") {
    const InterferenceGraph g = single_bs();
    const std::vector<Bid> bids{{5.0, {1}}, {3.0, {1}}, {2.0, {1}}};
    const WinnerDetermination wd = winner_determination(bids, 1, g);
    CHECK(wd.winners == std::vector<int>{1, 0, 0});
    CHECK(wd.welfare == 5.0);
    CHECK(vcg_payment(bids, wd.winners, 1, g, 0) == 3.0);
    CHECK(vcg_payment(bids, wd.winners, 1, g, 1) == 0.0);
    CHECK(vcg_payment(bids, wd.winners, 1, g, 2) == 0.0);
    const double without_first = ref::best_welfare(to_ref(bids), 0b110, 1, adjacency_of(g));
    CHECK(without_first == 3.0);
}

TEST_CASE("welfare ties: equal channel use falls back to the smallest index set") {
    const InterferenceGraph g = single_bs();
    const std::vector<Bid> bids{{5.0, {2}}, {3.0, {1}}, {2.0, {1}}};
    const WinnerDetermination wd = winner_determination(bids, 2, g);
    CHECK(wd.winners == std::vector<int>{1, 0, 0});
}

TEST_CASE("welfare ties: fewer channels wins") {
    const InterferenceGraph g = four_cycle();
    // SP 0 needs three channels and excludes both others; SPs 1 and 2 coexist on two.
    const std::vector<Bid> bids{{5.0, {2, 0, 1, 0}}, {3.0, {0, 1, 0, 0}}, {2.0, {0, 0, 0, 1}}};
    const WinnerDetermination wd = winner_determination(bids, 2, g);
    CHECK(wd.winners == std::vector<int>{0, 1, 1});
    CHECK(wd.welfare == 5.0);
    const ref::Adjacency adj = ref::cycle4();
    CHECK(vcg_payment(bids, wd.winners, 2, g, 1) == ref::best_welfare(to_ref(bids), 0b101, 2, adj) - 2.0);
    CHECK(vcg_payment(bids, wd.winners, 2, g, 2) == ref::best_welfare(to_ref(bids), 0b011, 2, adj) - 3.0);

    // Reversed roles: the single bidder needs fewer channels than the pair.
    const std::vector<Bid> flipped{{5.0, {1, 0, 0, 0}}, {3.0, {0, 1, 0, 0}}, {2.0, {0, 0, 0, 1}}};
    CHECK(winner_determination(flipped, 1, g).winners == std::vector<int>{1, 0, 0});
}

TEST_CASE("compatible bidders all win and pay nothing") {
    const InterferenceGraph g = four_cycle();
    const std::vector<Bid> bids{{2.0, {1, 0, 1, 0}}, {7.0, {0, 1, 0, 1}}, {1.0, {1, 1, 0, 0}}};
    const WinnerDetermination wd = winner_determination(bids, 4, g);
    CHECK(wd.winners == std::vector<int>{1, 1, 1});
    for (int i = 0; i < 3; ++i) CHECK(vcg_payment(bids, wd.winners, 4, g, i) == 0.0);
}

TEST_CASE("random instances agree with the brute-force reference") {
    Rng rng(2024);
    const ref::Adjacency adj = ref::cycle4();
    const InterferenceGraph g = four_cycle();
    for (int k = 0; k < 300; ++k) {
        const AuctionInstance inst = oracle::random_instance(rng, {});
        const auto bids = to_ref(inst.bids);
        const unsigned all = (1U << bids.size()) - 1;
        const WinnerDetermination wd = winner_determination(inst.bids, inst.channels, g);
        REQUIRE(wd.welfare == ref::best_welfare(bids, all, inst.channels, adj));
        for (std::size_t i = 0; i < bids.size(); ++i) {
            const double tau = vcg_payment(inst.bids, wd.winners, inst.channels, g, static_cast<int>(i));
            if (!wd.winners[i]) {
                CHECK(tau == 0.0);
                continue;
            }
            const double others = wd.welfare - bids[i].nu;
            CHECK(tau == ref::best_welfare(bids, all & ~(1U << i), inst.channels, adj) - others);
            CHECK(tau >= 0.0);
            CHECK(tau <= bids[i].nu);
        }
    }
}

TEST_CASE("allocation serves every requesting MU of a winner") {
    const InterferenceGraph g = four_cycle();
    // One SP with requesting MUs matching demand (3,2,3,2) plus an idle MU.
    std::vector<MuRequest> requests;
    const std::array<int, 4> per_bs{3, 2, 3, 2};
    for (int b = 0; b < 4; ++b) {
        for (int k = 0; k < per_bs[b]; ++k) requests.push_back({0, b, true});
    }
    requests.push_back({0, 1, false});
    const std::vector<Bid> bids{{9.0, {3, 2, 3, 2}}};
    const AuctionOutcome out = run_auction(bids, requests, 5, g);
    CHECK(out.winners == std::vector<int>{1});
    CHECK_FALSE(check_outcome(out, bids, requests, 5, g));
    for (std::size_t n = 0; n + 1 < requests.size(); ++n) CHECK(out.channel[n] >= 0);
    CHECK(out.channel.back() == -1);
}

TEST_CASE("two MUs of one SP in one area get distinct channels") {
    const InterferenceGraph g = four_cycle();
    const std::vector<MuRequest> requests{{0, 2, true}, {0, 2, true}};
    const std::vector<Bid> bids{{1.0, {0, 0, 2, 0}}};
    const AuctionOutcome out = run_auction(bids, requests, 3, g);
    REQUIRE(out.channel[0] >= 0);
    REQUIRE(out.channel[1] >= 0);
    CHECK(out.channel[0] != out.channel[1]);
}

TEST_CASE("no winners leaves every MU unserved") {
    const InterferenceGraph g = four_cycle();
    const std::vector<MuRequest> requests{{0, 0, true}, {1, 0, true}};
    const std::vector<Bid> bids{{0.0, {1, 0, 0, 0}}, {0.0, {1, 0, 0, 0}}};
    const auto plan = ChannelPlan{};
    const auto rho = allocate_channels(std::vector<int>{0, 0}, bids, requests, plan, 4);
    CHECK(rho == std::vector<int>{-1, -1});
}

TEST_CASE("allocation rejects a plan that does not match demand") {
    const InterferenceGraph g = four_cycle();
    const std::vector<MuRequest> requests{{0, 0, true}, {0, 0, true}};
    const std::vector<Bid> bids{{1.0, {2, 0, 0, 0}}};
    const ChannelPlan short_plan{0b0001};
    CHECK_THROWS_AS(allocate_channels(std::vector<int>{1}, bids, requests, short_plan, 4), std::logic_error);
}

TEST_CASE("the outcome checker catches constraint violations") {
    const InterferenceGraph g = four_cycle();
    const std::vector<MuRequest> requests{{0, 0, true}, {1, 1, true}};
    const std::vector<Bid> bids{{1.0, {1, 0, 0, 0}}, {1.0, {0, 1, 0, 0}}};
    AuctionOutcome out = run_auction(bids, requests, 2, g);
    REQUIRE_FALSE(check_outcome(out, bids, requests, 2, g));
    AuctionOutcome clash = out;
    clash.channel = {0, 0};  // adjacent BSs on one channel
    CHECK(check_outcome(clash, bids, requests, 2, g));
    AuctionOutcome negative = out;
    negative.payments[0] = -1.0;
    CHECK(check_outcome(negative, bids, requests, 2, g));
    AuctionOutcome missing = out;
    missing.channel[1] = -1;
    CHECK(check_outcome(missing, bids, requests, 2, g));
}

TEST_CASE("negative valuations clamp to zero") {
    CHECK(clamp_valuation(-2.5) == 0.0);
    CHECK(clamp_valuation(1.25) == 1.25);
}

TEST_CASE("instance text round trip") {
    AuctionInstance inst;
    inst.graph = four_cycle();
    inst.channels = 5;
    inst.bids = {{2.5, {1, 0, 3, 0}}, {0.125, {0, 2, 0, 1}}};
    std::stringstream io;
    write_instance(io, inst);
    const AuctionInstance back = read_instance(io);
    CHECK(back.channels == 5);
    CHECK(back.graph.neighbours == inst.graph.neighbours);
    REQUIRE(back.bids.size() == 2);
    CHECK(back.bids[0].valuation == 2.5);
    CHECK(back.bids[1].demand == inst.bids[1].demand);

    std::istringstream bad("auction-instance v1\nbs 2\nbid 1 0\n");
    CHECK_THROWS(read_instance(bad));
}
