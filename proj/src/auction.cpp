#include "slicing/auction.hpp"

#include <algorithm>
#include <bit>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <fmt/format.h>

namespace slicing {

int Bid::total_demand() const {
    int total = 0;
    for (int c : demand) total += c;
    return total;
}

double clamp_valuation(double nu) { return nu < 0.0 ? 0.0 : nu; }

namespace {

// Memoised minimum-channel search. Using a channel for a non-maximal
// independent set never helps (the channel count is monotone in demand),
// so only maximal sets within the current support are branched on.
class Packer {
public:
    explicit Packer(const InterferenceGraph& graph) : graph_(graph) {}

    int solve(const std::vector<int>& demand) {
        std::uint32_t support = 0;
        for (int b = 0; b < static_cast<int>(demand.size()); ++b) {
            if (demand[b] > 0) support |= 1U << b;
        }
        if (support == 0) return 0;
        if (auto it = memo_.find(demand); it != memo_.end()) return it->second.first;

        int best = std::numeric_limits<int>::max();
        std::uint32_t best_set = 0;
        std::vector<int> residual = demand;
        for (std::uint32_t set : maximal_sets(support)) {
            for (std::uint32_t r = set; r; r &= r - 1) --residual[std::countr_zero(r)];
            const int used = 1 + solve(residual);
            for (std::uint32_t r = set; r; r &= r - 1) ++residual[std::countr_zero(r)];
            if (used < best) {
                best = used;
                best_set = set;
            }
        }
        memo_.emplace(demand, std::make_pair(best, best_set));
        return best;
    }

    ChannelPlan plan(std::vector<int> demand) {
        ChannelPlan channels;
        solve(demand);
        while (true) {
            auto it = memo_.find(demand);
            if (it == memo_.end()) break;  // zero demand
            const std::uint32_t set = it->second.second;
            channels.push_back(set);
            for (std::uint32_t r = set; r; r &= r - 1) --demand[std::countr_zero(r)];
        }
        return channels;
    }

private:
    const std::vector<std::uint32_t>& maximal_sets(std::uint32_t support) {
        auto [it, inserted] = maximal_.try_emplace(support);
        if (!inserted) return it->second;
        auto& sets = it->second;
        // Descending submask order keeps the search deterministic.
        for (std::uint32_t sub = support;; sub = (sub - 1) & support) {
            if (sub != 0 && graph_.independent(sub)) {
                bool maximal = true;
                for (std::uint32_t rest = support & ~sub; rest; rest &= rest - 1) {
                    if ((graph_.neighbours[std::countr_zero(rest)] & sub) == 0) {
                        maximal = false;
                        break;
                    }
                }
                if (maximal) sets.push_back(sub);
            }
            if (sub == 0) break;
        }
        return sets;
    }

    const InterferenceGraph& graph_;
    std::map<std::vector<int>, std::pair<int, std::uint32_t>> memo_;
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> maximal_;
};

void check_demand(std::span<const int> demand, const InterferenceGraph& graph) {
    if (static_cast<int>(demand.size()) != graph.bs_count()) {
        throw std::invalid_argument(
            fmt::format("demand has {} entries for {} BSs", demand.size(), graph.bs_count()));
    }
    for (int d : demand) {
        if (d < 0) throw std::invalid_argument("negative channel demand");
    }
}

// Necessary condition: every BS and every adjacent pair needs distinct channels.
bool within_pair_bound(std::span<const int> demand, int channels, const InterferenceGraph& graph) {
    for (int a = 0; a < graph.bs_count(); ++a) {
        if (demand[a] > channels) return false;
        for (std::uint32_t n = graph.neighbours[a]; n; n &= n - 1) {
            const int b = std::countr_zero(n);
            if (b > a && demand[a] + demand[b] > channels) return false;
        }
    }
    return true;
}

bool lexicographically_less(std::uint32_t a, std::uint32_t b) {
    while (a && b) {
        const int ia = std::countr_zero(a);
        const int ib = std::countr_zero(b);
        if (ia != ib) return ia < ib;
        a &= a - 1;
        b &= b - 1;
    }
    return a == 0 && b != 0;
}

// Feasibility, welfare and channel need of every winner subset.
struct SubsetTable {
    std::vector<char> feasible;
    std::vector<double> welfare;
    std::vector<int> channels_used;
    std::uint32_t best = 0;

    SubsetTable(std::span<const Bid> bids, int channels, const InterferenceGraph& graph) {
        const int count = static_cast<int>(bids.size());
        if (count > 20) throw std::invalid_argument("exhaustive winner determination supports at most 20 bidders");
        for (const Bid& b : bids) check_demand(b.demand, graph);
        const std::uint32_t subsets = 1U << count;
        feasible.assign(subsets, 0);
        welfare.assign(subsets, 0.0);
        channels_used.assign(subsets, 0);
        Packer packer(graph);
        std::vector<int> demand(static_cast<std::size_t>(graph.bs_count()));
        for (std::uint32_t mask = 0; mask < subsets; ++mask) {
            std::fill(demand.begin(), demand.end(), 0);
            double w = 0.0;
            for (int i = 0; i < count; ++i) {
                if (!((mask >> i) & 1U)) continue;
                w += bids[i].valuation;
                for (int b = 0; b < graph.bs_count(); ++b) demand[b] += bids[i].demand[b];
            }
            welfare[mask] = w;
            int total = 0;
            for (int d : demand) total += d;
            channels_used[mask] = total;
            feasible[mask] = within_pair_bound(demand, channels, graph) && packer.solve(demand) <= channels;
        }
        for (std::uint32_t mask = 1; mask < subsets; ++mask) {
            if (feasible[mask] && better(mask, best)) best = mask;
        }
    }

    bool better(std::uint32_t a, std::uint32_t b) const {
        if (welfare[a] != welfare[b]) return welfare[a] > welfare[b];
        if (channels_used[a] != channels_used[b]) return channels_used[a] < channels_used[b];
        return lexicographically_less(a, b);
    }

    double payment(std::uint32_t winners, int sp) const {
        const std::uint32_t bit = 1U << sp;
        if (!(winners & bit)) return 0.0;
        double without = 0.0;
        for (std::uint32_t mask = 0; mask < feasible.size(); ++mask) {
            if (!(mask & bit) && feasible[mask]) without = std::max(without, welfare[mask]);
        }
        return without - welfare[winners & ~bit];
    }
};

std::uint32_t to_mask(std::span<const int> flags) {
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < flags.size(); ++i) {
        if (flags[i]) mask |= 1U << i;
    }
    return mask;
}

std::vector<int> to_flags(std::uint32_t mask, std::size_t count) {
    std::vector<int> flags(count);
    for (std::size_t i = 0; i < count; ++i) flags[i] = (mask >> i) & 1U;
    return flags;
}

std::vector<int> summed_demand(std::span<const Bid> bids, std::uint32_t winners, int bs_count) {
    std::vector<int> demand(static_cast<std::size_t>(bs_count), 0);
    for (std::size_t i = 0; i < bids.size(); ++i) {
        if (!((winners >> i) & 1U)) continue;
        for (int b = 0; b < bs_count; ++b) demand[b] += bids[i].demand[b];
    }
    return demand;
}

}  // namespace

Feasibility feasible(std::span<const int> demand, int channels, const InterferenceGraph& graph) {
    check_demand(demand, graph);
    Feasibility out;
    if (!within_pair_bound(demand, channels, graph)) return out;
    Packer packer(graph);
    std::vector<int> d(demand.begin(), demand.end());
    if (packer.solve(d) > channels) return out;
    out.feasible = true;
    out.witness = packer.plan(d);
    return out;
}

int min_channels(std::span<const int> demand, const InterferenceGraph& graph) {
    check_demand(demand, graph);
    Packer packer(graph);
    return packer.solve(std::vector<int>(demand.begin(), demand.end()));
}

WinnerDetermination winner_determination(std::span<const Bid> bids, int channels, const InterferenceGraph& graph) {
    if (bids.empty()) throw std::invalid_argument("winner determination needs at least one bid");
    SubsetTable table(bids, channels, graph);
    WinnerDetermination out;
    out.winners = to_flags(table.best, bids.size());
    out.welfare = table.welfare[table.best];
    Packer packer(graph);
    out.plan = packer.plan(summed_demand(bids, table.best, graph.bs_count()));
    return out;
}

double vcg_payment(std::span<const Bid> bids, std::span<const int> winners, int channels,
                   const InterferenceGraph& graph, int sp) {
    SubsetTable table(bids, channels, graph);
    return table.payment(to_mask(winners), sp);
}

std::vector<int> allocate_channels(std::span<const int> winners, std::span<const Bid> bids,
                                   std::span<const MuRequest> requests, const ChannelPlan& plan, int bs_count) {
    std::vector<int> channel(requests.size(), -1);
    // Requesting MUs of winners, grouped by BS in MU order.
    std::vector<std::vector<std::size_t>> waiting(static_cast<std::size_t>(bs_count));
    std::vector<std::vector<int>> requested(bids.size(), std::vector<int>(static_cast<std::size_t>(bs_count), 0));
    for (std::size_t n = 0; n < requests.size(); ++n) {
        const MuRequest& r = requests[n];
        if (r.sp < 0 || r.sp >= static_cast<int>(bids.size()) || r.bs < 0 || r.bs >= bs_count) {
            throw std::logic_error(fmt::format("MU {} has an invalid SP or BS", n));
        }
        if (r.wants_channel && winners[r.sp]) {
            waiting[r.bs].push_back(n);
            ++requested[r.sp][r.bs];
        }
    }
    for (std::size_t i = 0; i < bids.size(); ++i) {
        if (!winners[i]) continue;
        for (int b = 0; b < bs_count; ++b) {
            if (requested[i][b] != bids[i].demand[b]) {
                throw std::logic_error(fmt::format("SP {} bid {} channels at BS {} but {} MUs request one", i,
                                                   bids[i].demand[b], b, requested[i][b]));
            }
        }
    }
    std::vector<std::size_t> next(static_cast<std::size_t>(bs_count), 0);
    for (std::size_t j = 0; j < plan.size(); ++j) {
        for (std::uint32_t r = plan[j]; r; r &= r - 1) {
            const int b = std::countr_zero(r);
            if (b >= bs_count || next[b] >= waiting[b].size()) {
                throw std::logic_error(fmt::format("channel plan over-serves BS {}", b));
            }
            channel[waiting[b][next[b]++]] = static_cast<int>(j);
        }
    }
    for (int b = 0; b < bs_count; ++b) {
        if (next[b] != waiting[b].size()) {
            throw std::logic_error(fmt::format("channel plan under-serves BS {} ({} of {})", b, next[b],
                                               waiting[b].size()));
        }
    }
    return channel;
}

AuctionOutcome run_auction(std::span<const Bid> bids, std::span<const MuRequest> requests, int channels,
                           const InterferenceGraph& graph) {
    if (bids.empty()) throw std::invalid_argument("an auction needs at least one bid");
    SubsetTable table(bids, channels, graph);
    AuctionOutcome out;
    out.winners = to_flags(table.best, bids.size());
    out.welfare = table.welfare[table.best];
    out.payments.resize(bids.size());
    for (std::size_t i = 0; i < bids.size(); ++i) out.payments[i] = table.payment(table.best, static_cast<int>(i));
    Packer packer(graph);
    const ChannelPlan plan = packer.plan(summed_demand(bids, table.best, graph.bs_count()));
    out.channel = allocate_channels(out.winners, bids, requests, plan, graph.bs_count());
    return out;
}

std::optional<std::string> check_outcome(const AuctionOutcome& outcome, std::span<const Bid> bids,
                                         std::span<const MuRequest> requests, int channels,
                                         const InterferenceGraph& graph) {
    const int bs_count = graph.bs_count();
    if (outcome.winners.size() != bids.size() || outcome.payments.size() != bids.size()) {
        return "outcome sized inconsistently with bids";
    }
    if (outcome.channel.size() != requests.size()) return "channel map sized inconsistently with MUs";
    // users[j][b]: MUs at BS b on channel j
    std::vector<std::vector<int>> users(static_cast<std::size_t>(channels), std::vector<int>(bs_count, 0));
    std::vector<std::vector<int>> served(bids.size(), std::vector<int>(static_cast<std::size_t>(bs_count), 0));
    for (std::size_t n = 0; n < requests.size(); ++n) {
        const int j = outcome.channel[n];
        if (j < 0) continue;
        if (j >= channels) return fmt::format("MU {} assigned channel {} of {}", n, j, channels);
        if (!outcome.winners[requests[n].sp]) return fmt::format("MU {} of losing SP {} holds a channel", n, requests[n].sp);
        ++users[j][requests[n].bs];
        ++served[requests[n].sp][requests[n].bs];
    }
    for (int j = 0; j < channels; ++j) {
        for (int b = 0; b < bs_count; ++b) {
            if (users[j][b] > 1) return fmt::format("channel {} reused inside BS {}", j, b);
            for (int b2 = b + 1; b2 < bs_count; ++b2) {
                if (graph.adjacent(b, b2) && users[j][b] && users[j][b2]) {
                    return fmt::format("channel {} used by adjacent BSs {} and {}", j, b, b2);
                }
            }
        }
    }
    for (std::size_t i = 0; i < bids.size(); ++i) {
        for (int b = 0; b < bs_count; ++b) {
            const int expected = outcome.winners[i] ? bids[i].demand[b] : 0;
            if (served[i][b] != expected) {
                return fmt::format("SP {} served {} MUs at BS {}, expected {}", i, served[i][b], b, expected);
            }
        }
        if (outcome.payments[i] < 0.0) return fmt::format("SP {} has negative payment", i);
        if (!outcome.winners[i] && outcome.payments[i] != 0.0) return fmt::format("losing SP {} pays", i);
    }
    return std::nullopt;
}

void write_instance(std::ostream& out, const AuctionInstance& instance) {
    out << "auction-instance v1\n";
    out << "bs " << instance.graph.bs_count() << '\n';
    for (auto [a, b] : instance.graph.edges()) out << "edge " << a << ' ' << b << '\n';
    out << "channels " << instance.channels << '\n';
    for (const Bid& bid : instance.bids) {
        out << "bid " << fmt::format("{:.17g}", bid.valuation);
        for (int c : bid.demand) out << ' ' << c;
        out << '\n';
    }
}

AuctionInstance read_instance(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "auction-instance v1") {
        throw std::runtime_error("not an auction-instance v1 file");
    }
    int bs_count = -1;
    std::vector<std::pair<int, int>> edges;
    AuctionInstance instance;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream is(line);
        std::string tag;
        if (!(is >> tag) || tag[0] == '#') continue;
        auto fail = [&] { return std::runtime_error(fmt::format("instance line {}: '{}'", line_no, line)); };
        if (tag == "bs") {
            if (!(is >> bs_count) || bs_count < 1) throw fail();
        } else if (tag == "edge") {
            int a = 0, b = 0;
            if (!(is >> a >> b)) throw fail();
            edges.emplace_back(a, b);
        } else if (tag == "channels") {
            if (!(is >> instance.channels)) throw fail();
        } else if (tag == "bid") {
            if (bs_count < 1) throw fail();
            Bid bid;
            if (!(is >> bid.valuation)) throw fail();
            bid.demand.resize(static_cast<std::size_t>(bs_count));
            for (int& c : bid.demand) {
                if (!(is >> c)) throw fail();
            }
            instance.bids.push_back(std::move(bid));
        } else {
            throw fail();
        }
    }
    if (bs_count < 1) throw std::runtime_error("instance has no 'bs' line");
    instance.graph = InterferenceGraph(bs_count, edges);
    return instance;
}

}  // namespace slicing
