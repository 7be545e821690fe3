#pragma once

// Reference computations for the tests, written independently of the
// library code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

namespace ref {

using Adjacency = std::vector<std::vector<bool>>;

inline Adjacency cycle4() {
    Adjacency a(4, std::vector<bool>(4, false));
    for (int b = 0; b < 4; ++b) {
        a[b][(b + 1) % 4] = true;
        a[(b + 1) % 4][b] = true;
    }
    return a;
}

inline Adjacency complete(int n) {
    Adjacency a(n, std::vector<bool>(n, true));
    for (int b = 0; b < n; ++b) a[b][b] = false;
    return a;
}

// Channel-by-channel reachability: each channel serves any independent
// subset of BSs; a demand is feasible iff some sequence of J subsets covers
// it. States are coverage vectors capped at the demand.
inline bool feasible(const std::vector<int>& demand, int channels, const Adjacency& adj) {
    const int n = static_cast<int>(demand.size());
    std::vector<std::vector<int>> subsets;
    for (int mask = 0; mask < (1 << n); ++mask) {
        bool ok = true;
        for (int a = 0; a < n && ok; ++a) {
            for (int b = a + 1; b < n && ok; ++b) {
                if ((mask >> a & 1) && (mask >> b & 1) && adj[a][b]) ok = false;
            }
        }
        if (!ok) continue;
        std::vector<int> s(n);
        for (int b = 0; b < n; ++b) s[b] = mask >> b & 1;
        subsets.push_back(s);
    }
    std::set<std::vector<int>> reach{std::vector<int>(n, 0)};
    for (int j = 0; j < channels; ++j) {
        std::set<std::vector<int>> next;
        for (const auto& v : reach) {
            for (const auto& s : subsets) {
                std::vector<int> w(n);
                for (int b = 0; b < n; ++b) w[b] = std::min(demand[b], v[b] + s[b]);
                next.insert(w);
            }
        }
        reach.swap(next);
    }
    return reach.count(demand) > 0;
}

inline bool cycle4_closed_form(const std::vector<int>& d, int channels) {
    for (int b = 0; b < 4; ++b) {
        if (d[b] + d[(b + 1) % 4] > channels) return false;
    }
    return true;
}

struct RefBid {
    double nu;
    std::vector<int> demand;
};

// Best welfare over subsets of `pool` (bitmask) whose summed demand is feasible.
inline double best_welfare(const std::vector<RefBid>& bids, unsigned pool, int channels, const Adjacency& adj) {
    const int n = static_cast<int>(bids.size());
    double best = 0.0;
    for (unsigned set = 0; set < (1U << n); ++set) {
        if ((set & ~pool) != 0) continue;
        std::vector<int> total(adj.size(), 0);
        double w = 0.0;
        for (int i = 0; i < n; ++i) {
            if (!(set >> i & 1)) continue;
            w += bids[i].nu;
            for (std::size_t b = 0; b < adj.size(); ++b) total[b] += bids[i].demand[b];
        }
        if (w > best && feasible(total, channels, adj)) best = w;
    }
    return best;
}

// Hidden tanh layers and a linear output, weights input-major as in the
// library; written with std::tanh and long double accumulation.
inline std::vector<double> mlp_forward(const std::vector<int>& widths, const std::vector<double>& params,
                                       const std::vector<double>& input) {
    std::vector<long double> x(input.begin(), input.end());
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const int in = widths[l];
        const int out = widths[l + 1];
        std::vector<long double> y(out);
        for (int r = 0; r < out; ++r) {
            long double acc = params[offset + static_cast<std::size_t>(in) * out + r];
            for (int c = 0; c < in; ++c) acc += params[offset + static_cast<std::size_t>(c) * out + r] * x[c];
            y[r] = (l + 2 < widths.size()) ? std::tanh(acc) : acc;
        }
        offset += static_cast<std::size_t>(in + 1) * out;
        x.swap(y);
    }
    return std::vector<double>(x.begin(), x.end());
}

// Q* of a finite MDP with the (1 - gamma) reward scaling:
// Q(s,a) = (1-gamma) r(s,a) + gamma sum_s' P(s'|s,a) max_a' Q(s',a').
inline std::vector<std::vector<double>> value_iteration(const std::vector<std::vector<double>>& reward,
                                                        const std::vector<std::vector<std::vector<double>>>& kernel,
                                                        double gamma, double tolerance = 1e-14) {
    const std::size_t s_count = reward.size();
    const std::size_t a_count = reward[0].size();
    std::vector<std::vector<double>> q(s_count, std::vector<double>(a_count, 0.0));
    for (int iter = 0; iter < 100000; ++iter) {
        double change = 0.0;
        std::vector<double> v(s_count);
        for (std::size_t s = 0; s < s_count; ++s) v[s] = *std::max_element(q[s].begin(), q[s].end());
        for (std::size_t s = 0; s < s_count; ++s) {
            for (std::size_t a = 0; a < a_count; ++a) {
                double next = (1.0 - gamma) * reward[s][a];
                for (std::size_t t = 0; t < s_count; ++t) next += gamma * kernel[s][a][t] * v[t];
                change = std::max(change, std::abs(next - q[s][a]));
                q[s][a] = next;
            }
        }
        if (change < tolerance) break;
    }
    return q;
}

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    double tv = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) tv += std::abs(p[k] - q[k]);
    return 0.5 * tv;
}

// Default parameter values, restated for hand-derived checks.
struct TableOne {
    long double bandwidth = 500e3L;
    long double slot = 1e-2L;
    long double noise = 3.981071705534973e-21L;  // 10^(-20.4) W/Hz
    long double task_bits = 5000;
    long double packet_bits = 3000;
    long double cycles_per_bit = 737.5L;
    long double cpu_hz = 2e9L;
    long double capacitance = 2.5e-28L;
    long double max_power = 3;
};

// Secrecy-rate transmit energy; negative result means "infeasible".
inline long double tx_energy(long double hu, long double he, int tasks, int packets, const TableOne& t = {}) {
    const long double bits = tasks * t.task_bits + packets * t.packet_bits;
    if (bits == 0) return 0;
    if (hu <= he) return -1;
    const long double x = bits / (t.bandwidth * t.slot);
    const long double denom = hu - he * std::pow(2.0L, x);
    if (denom <= 0) return -1;
    const long double p = t.slot * t.bandwidth * t.noise * (std::pow(2.0L, x) - 1) / denom;
    return p > t.max_power * t.slot ? -1 : p;
}

inline long double cpu_energy(int residual_tasks, const TableOne& t = {}) {
    return t.capacitance * t.task_bits * t.cycles_per_bit * t.cpu_hz * t.cpu_hz * residual_tasks;
}

}  // namespace ref
