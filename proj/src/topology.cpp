#include "slicing/topology.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace slicing {

InterferenceGraph::InterferenceGraph(int bs_count, const std::vector<std::pair<int, int>>& edges)
    : neighbours(static_cast<std::size_t>(bs_count), 0U) {
    if (bs_count > 32) throw ConfigError("at most 32 BSs are supported");
    for (auto [a, b] : edges) {
        if (a == b || a < 0 || b < 0 || a >= bs_count || b >= bs_count) {
            throw ConfigError(fmt::format("invalid BS edge ({}, {})", a, b));
        }
        neighbours[a] |= 1U << b;
        neighbours[b] |= 1U << a;
    }
}

int InterferenceGraph::edge_count() const {
    int twice = 0;
    for (auto mask : neighbours) twice += std::popcount(mask);
    return twice / 2;
}

std::vector<std::pair<int, int>> InterferenceGraph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < bs_count(); ++a) {
        for (int b = a + 1; b < bs_count(); ++b) {
            if (adjacent(a, b)) out.emplace_back(a, b);
        }
    }
    return out;
}

bool InterferenceGraph::independent(std::uint32_t mask) const {
    for (std::uint32_t rest = mask; rest != 0; rest &= rest - 1) {
        const int b = std::countr_zero(rest);
        if (neighbours[b] & mask) return false;
    }
    return true;
}

InterferenceGraph four_cycle() { return InterferenceGraph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}}); }

double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

double channel_gain(double distance_m, const GainModel& model) {
    const double d = std::max(distance_m, model.ref_distance);
    return model.h0 * std::pow(model.ref_distance / d, model.exponent);
}

TopologyGraph::TopologyGraph(Grid grid, std::vector<Point> bs_positions, GainModel gains)
    : grid_(grid), bs_positions_(std::move(bs_positions)), gains_(gains) {
    if (grid_.width_cells <= 0 || grid_.height_cells <= 0 || grid_.cell_size <= 0) {
        throw ConfigError("grid dimensions and cell size must be positive");
    }
    if (bs_positions_.empty()) throw ConfigError("at least one BS is required");
    if (bs_count() > grid_.size()) {
        throw ConfigError(fmt::format("{} BSs exceed {} locations", bs_count(), grid_.size()));
    }
    if (gains_.h0 <= 0 || gains_.ref_distance <= 0) throw ConfigError("H0 and reference distance must be positive");

    coverage_.resize(static_cast<std::size_t>(grid_.size()));
    uplink_gain_.resize(coverage_.size());
    for (Location loc = 0; loc < grid_.size(); ++loc) {
        const Point c = grid_.center(loc);
        BsId best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (BsId b = 0; b < bs_count(); ++b) {
            const double d = distance(c, bs_positions_[b]);
            if (d < best_d) {
                best_d = d;
                best = b;
            }
        }
        coverage_[loc] = best;
        uplink_gain_[loc] = channel_gain(best_d, gains_);
    }

    double min_d = std::numeric_limits<double>::infinity();
    for (BsId a = 0; a < bs_count(); ++a) {
        for (BsId b = a + 1; b < bs_count(); ++b) {
            min_d = std::min(min_d, distance(bs_positions_[a], bs_positions_[b]));
        }
    }
    std::vector<std::pair<int, int>> edges;
    for (BsId a = 0; a < bs_count(); ++a) {
        for (BsId b = a + 1; b < bs_count(); ++b) {
            if (distance(bs_positions_[a], bs_positions_[b]) <= min_d * (1.0 + 1e-9)) edges.emplace_back(a, b);
        }
    }
    graph_ = InterferenceGraph(bs_count(), edges);
}

int TopologyGraph::coverage_size(BsId b) const {
    return static_cast<int>(std::count(coverage_.begin(), coverage_.end(), b));
}

double TopologyGraph::eavesdropper_gain(Location mu, Location eve) const {
    return channel_gain(distance(grid_.center(mu), grid_.center(eve)), gains_);
}

double TopologyGraph::gain(Location from, Point to) const {
    return channel_gain(distance(grid_.center(from), to), gains_);
}

TopologyGraph build_default_topology(const SimConfig& config) {
    const auto& t = config.topology;
    Grid grid{t.grid_width, t.grid_height, t.cell_m};
    std::vector<Point> bs = t.bs_positions;
    if (bs.empty()) {
        // Quadrant centres, listed around the square so the neighbour cycle is 0-1-2-3-0.
        const double w = grid.width_cells * grid.cell_size;
        const double h = grid.height_cells * grid.cell_size;
        bs = {{w / 4, h / 4}, {3 * w / 4, h / 4}, {3 * w / 4, 3 * h / 4}, {w / 4, 3 * h / 4}};
    }
    GainModel gains{db_to_linear(t.h0_db), t.ref_distance_m, t.path_loss_exponent};
    return TopologyGraph(grid, std::move(bs), gains);
}

}  // namespace slicing
