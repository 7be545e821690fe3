#include <doctest.h>

#include <cmath>

#include "slicing/topology.hpp"

using namespace slicing;

TEST_CASE("default layout: 1600 locations, four BSs of 400 cells on a 4-cycle") {
    const TopologyGraph topo = build_default_topology(SimConfig{});
    CHECK(topo.grid().size() == 1600);
    REQUIRE(topo.bs_count() == 4);
    int total = 0;
    for (BsId b = 0; b < 4; ++b) {
        CHECK(topo.coverage_size(b) == 400);
        total += topo.coverage_size(b);
    }
    CHECK(total == 1600);
    CHECK(topo.graph().edge_count() == 4);
    for (BsId b = 0; b < 4; ++b) {
        CHECK_FALSE(topo.adjacent(b, b));
        int degree = 0;
        for (BsId o = 0; o < 4; ++o) degree += topo.adjacent(b, o);
        CHECK(degree == 2);
    }
    // BSs 1 km apart: every edge is a side of the square, never a diagonal.
    for (auto [a, b] : topo.graph().edges()) {
        CHECK(distance(topo.bs_positions()[a], topo.bs_positions()[b]) == doctest::Approx(1000.0));
    }
}

TEST_CASE("BS placement matches the quadrant centres") {
    const TopologyGraph topo = build_default_topology(SimConfig{});
    int found = 0;
    for (Point p : topo.bs_positions()) {
        for (Point want : {Point{500, 500}, Point{500, 1500}, Point{1500, 500}, Point{1500, 1500}}) {
            if (p.x == want.x && p.y == want.y) ++found;
        }
    }
    CHECK(found == 4);
}

TEST_CASE("single BS covers everything and has no neighbours") {
    SimConfig c;
    c.topology.grid_width = 7;
    c.topology.grid_height = 3;
    c.topology.bs_positions = {{10, 10}};
    const TopologyGraph topo = build_default_topology(c);
    CHECK(topo.coverage_size(0) == 21);
    CHECK(topo.graph().edge_count() == 0);
}

TEST_CASE("more BSs than locations is rejected") {
    SimConfig c;
    c.topology.grid_width = 1;
    c.topology.grid_height = 1;
    c.topology.bs_positions = {{0, 0}, {10, 10}};
    CHECK_THROWS_AS(build_default_topology(c), ConfigError);
}

TEST_CASE("channel gain follows H0 (xi0 / xi)^4 with a clamp at xi0") {
    const GainModel m{1e-4, 2.0, 4.0};
    CHECK(channel_gain(2.0, m) == doctest::Approx(1e-4));
    CHECK(channel_gain(200.0, m) == doctest::Approx(1e-12).epsilon(1e-12));
    CHECK(channel_gain(1.0, m) == doctest::Approx(1e-4));
    CHECK(channel_gain(0.0, m) == doctest::Approx(1e-4));
    double previous = channel_gain(2.0, m);
    for (double d = 3.0; d < 3000.0; d *= 1.5) {
        const double g = channel_gain(d, m);
        CHECK(g <= previous);
        previous = g;
    }
}

TEST_CASE("grid coordinates and cell centres") {
    const Grid g{40, 40, 50.0};
    const Location loc = g.at(3, 7);
    CHECK(g.column(loc) == 3);
    CHECK(g.row(loc) == 7);
    CHECK(g.center(loc).x == 175.0);
    CHECK(g.center(loc).y == 375.0);
    CHECK(g.contains(1599));
    CHECK_FALSE(g.contains(1600));
}

TEST_CASE("uplink and eavesdropper gains use cell centres") {
    const TopologyGraph topo = build_default_topology(SimConfig{});
    const Grid& g = topo.grid();
    const Location near = g.at(9, 9);  // centre (475, 475), 35.36 m from (500, 500)
    CHECK(topo.uplink_gain(near) == doctest::Approx(1e-4 * std::pow(2.0 / std::hypot(25.0, 25.0), 4)));
    CHECK(topo.eavesdropper_gain(near, near) == doctest::Approx(1e-4));
    CHECK(topo.eavesdropper_gain(g.at(0, 0), g.at(4, 0)) ==
          doctest::Approx(1e-4 * std::pow(2.0 / 200.0, 4)).epsilon(1e-12));
}

TEST_CASE("interference graph validation") {
    CHECK_THROWS(InterferenceGraph(3, {{0, 3}}));
    CHECK_THROWS(InterferenceGraph(3, {{1, 1}}));
    const InterferenceGraph c4 = four_cycle();
    CHECK(c4.independent(0b0101));
    CHECK(c4.independent(0b1010));
    CHECK_FALSE(c4.independent(0b0011));
    CHECK(c4.independent(0));
}
