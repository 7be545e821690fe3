#pragma once

#include <cstdint>
#include <vector>

#include "slicing/config.hpp"

namespace slicing {

using Location = int;
using BsId = int;

struct Grid {
    int width_cells = 0;
    int height_cells = 0;
    double cell_size = 0.0;

    int size() const { return width_cells * height_cells; }
    bool contains(Location loc) const { return loc >= 0 && loc < size(); }
    int column(Location loc) const { return loc % width_cells; }
    int row(Location loc) const { return loc / width_cells; }
    Location at(int column, int row) const { return row * width_cells + column; }
    Point center(Location loc) const {
        return {(column(loc) + 0.5) * cell_size, (row(loc) + 0.5) * cell_size};
    }
};

// Average-gain path-loss model: H0 * (ref / max(d, ref))^exponent.
struct GainModel {
    double h0 = 1e-4;
    double ref_distance = 2.0;
    double exponent = 4.0;
};

// BS adjacency as per-BS neighbour bitmasks (bit b' of mask[b] set iff e_{b,b'} = 1).
struct InterferenceGraph {
    std::vector<std::uint32_t> neighbours;

    InterferenceGraph() = default;
    InterferenceGraph(int bs_count, const std::vector<std::pair<int, int>>& edges);

    int bs_count() const { return static_cast<int>(neighbours.size()); }
    bool adjacent(int a, int b) const { return (neighbours[a] >> b) & 1U; }
    int edge_count() const;
    std::vector<std::pair<int, int>> edges() const;
    // True iff no two BSs in the mask are adjacent.
    bool independent(std::uint32_t mask) const;
};

double distance(Point a, Point b);
double channel_gain(double distance_m, const GainModel& model);

class TopologyGraph {
public:
    TopologyGraph(Grid grid, std::vector<Point> bs_positions, GainModel gains);

    const Grid& grid() const { return grid_; }
    const GainModel& gain_model() const { return gains_; }
    int bs_count() const { return static_cast<int>(bs_positions_.size()); }
    const std::vector<Point>& bs_positions() const { return bs_positions_; }

    BsId coverage(Location loc) const { return coverage_[loc]; }
    int coverage_size(BsId b) const;
    const InterferenceGraph& graph() const { return graph_; }
    bool adjacent(BsId a, BsId b) const { return graph_.adjacent(a, b); }

    // Gain between a MU cell centre and its serving BS.
    double uplink_gain(Location mu) const { return uplink_gain_[mu]; }
    // Gain between a MU cell centre and an eavesdropper cell centre.
    double eavesdropper_gain(Location mu, Location eve) const;
    // Gain from a cell centre to an arbitrary point.
    double gain(Location from, Point to) const;

private:
    Grid grid_;
    std::vector<Point> bs_positions_;
    GainModel gains_;
    std::vector<BsId> coverage_;
    InterferenceGraph graph_;
    std::vector<double> uplink_gain_;
};

// Quadrant-centred BSs by default; nearest-BS coverage; BSs at the minimum
// pairwise distance are neighbours. Throws ConfigError when there are more
// BSs than locations.
TopologyGraph build_default_topology(const SimConfig& config);

// The 4-cycle 0-1-2-3-0 of the quadrant layout, without geometry.
InterferenceGraph four_cycle();

}  // namespace slicing
