#include "slicing/env.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace slicing {

LinkGains link_gains(const TopologyGraph& topology, const MuLocalState& state) {
    return {topology.uplink_gain(state.mu_loc), topology.eavesdropper_gain(state.mu_loc, state.eve_loc)};
}

namespace {

template <typename Probabilities>
void check_stochastic(const Probabilities& row, std::size_t index) {
    double sum = 0.0;
    for (double p : row) {
        if (p < 0.0) throw std::invalid_argument(fmt::format("negative probability in kernel row {}", index));
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument(fmt::format("kernel row {} sums to {}", index, sum));
    }
}

}  // namespace

MobilityKernel::MobilityKernel(std::vector<Row> rows) : rows_(std::move(rows)) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        std::vector<double> probs;
        for (auto [dest, p] : rows_[i]) {
            if (dest < 0 || dest >= size()) throw std::invalid_argument("mobility destination outside the grid");
            probs.push_back(p);
        }
        check_stochastic(probs, i);
    }
}

MobilityKernel MobilityKernel::lazy_random_walk(const Grid& grid, double stay) {
    std::vector<Row> rows(static_cast<std::size_t>(grid.size()));
    constexpr int dx[] = {1, -1, 0, 0};
    constexpr int dy[] = {0, 0, 1, -1};
    for (Location loc = 0; loc < grid.size(); ++loc) {
        const int c = grid.column(loc);
        const int r = grid.row(loc);
        std::vector<Location> nbrs;
        for (int k = 0; k < 4; ++k) {
            const int nc = c + dx[k];
            const int nr = r + dy[k];
            if (nc >= 0 && nc < grid.width_cells && nr >= 0 && nr < grid.height_cells) nbrs.push_back(grid.at(nc, nr));
        }
        Row& row = rows[loc];
        if (nbrs.empty()) {
            row.emplace_back(loc, 1.0);
            continue;
        }
        row.emplace_back(loc, stay);
        const double share = (1.0 - stay) / static_cast<double>(nbrs.size());
        for (Location n : nbrs) row.emplace_back(n, share);
    }
    return MobilityKernel(std::move(rows));
}

MobilityKernel MobilityKernel::identity(const Grid& grid) {
    std::vector<Row> rows(static_cast<std::size_t>(grid.size()));
    for (Location loc = 0; loc < grid.size(); ++loc) rows[loc].emplace_back(loc, 1.0);
    return MobilityKernel(std::move(rows));
}

Location MobilityKernel::step(Location loc, Rng& rng) const {
    const Row& r = rows_[loc];
    const double u = uniform01(rng);
    double cdf = 0.0;
    for (auto [dest, p] : r) {
        cdf += p;
        if (u < cdf) return dest;
    }
    return r.back().first;
}

TaskKernel::TaskKernel(std::vector<std::vector<double>> matrix) : matrix_(std::move(matrix)) {
    for (std::size_t i = 0; i < matrix_.size(); ++i) {
        if (matrix_[i].size() != matrix_.size()) throw std::invalid_argument("task kernel must be square");
        check_stochastic(matrix_[i], i);
    }
}

TaskKernel TaskKernel::uniform(int max_tasks) {
    const auto n = static_cast<std::size_t>(max_tasks + 1);
    return TaskKernel(std::vector<std::vector<double>>(n, std::vector<double>(n, 1.0 / static_cast<double>(n))));
}

int TaskKernel::step(int tasks, Rng& rng) const {
    const auto& row = matrix_[tasks];
    const double u = uniform01(rng);
    double cdf = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        cdf += row[j];
        if (u < cdf) return static_cast<int>(j);
    }
    // Rounding left u above the accumulated mass; take the last state with support.
    for (std::size_t j = row.size(); j-- > 0;) {
        if (row[j] > 0) return static_cast<int>(j);
    }
    return tasks;
}

Location step_mobility(Location loc, const MobilityKernel& kernel, Rng& rng) { return kernel.step(loc, rng); }

Arrivals sample_arrivals(const MuLocalState& state, const TaskKernel& tasks, double rate, int cap, Rng& rng) {
    Arrivals a;
    a.next_tasks = tasks.step(state.tasks, rng);
    a.packets = poisson(rng, rate, cap);
    return a;
}

QueueStep queue_update(int queue, const Action& action, int arrivals, int max_queue) {
    const int served = action.payload_packets();
    if (served > queue) {
        throw std::invalid_argument(fmt::format("scheduled {} packets from a queue of {}", served, queue));
    }
    const int raw = queue - served + arrivals;
    return {std::min(raw, max_queue), std::max(raw - max_queue, 0)};
}

EnergyModel::EnergyModel(const SimConfig& config)
    : task_bits_(config.task_bits),
      packet_bits_(config.packet_bits),
      bits_per_slot_(config.bandwidth_hz * config.slot_s),
      noise_energy_(config.slot_s * config.bandwidth_hz * config.noise_w_per_hz),
      max_slot_energy_(config.max_tx_power_w * config.slot_s),
      cpu_per_task_(config.switched_capacitance * config.task_bits * config.cycles_per_bit * config.cpu_hz *
                    config.cpu_hz) {}

double EnergyModel::spectral_load(const Action& action) const {
    return (task_bits_ * action.payload_tasks() + packet_bits_ * action.payload_packets()) / bits_per_slot_;
}

std::optional<double> EnergyModel::uncapped_transmit(const Action& action, LinkGains gains) const {
    const double x = spectral_load(action);
    if (x == 0.0) return 0.0;
    if (gains.uplink <= gains.eavesdropper) return std::nullopt;
    const double growth = std::exp2(x);
    const double denominator = gains.uplink - gains.eavesdropper * growth;
    if (denominator <= 0.0) return std::nullopt;
    return noise_energy_ * (growth - 1.0) / denominator;
}

std::optional<double> EnergyModel::transmit(const Action& action, LinkGains gains) const {
    auto energy = uncapped_transmit(action, gains);
    if (energy && *energy > max_slot_energy_) return std::nullopt;
    return energy;
}

double EnergyModel::cpu(int tasks, const Action& action) const {
    const int local = tasks - action.payload_tasks();
    if (local < 0) {
        throw std::invalid_argument(fmt::format("offloaded {} tasks out of {}", action.payload_tasks(), tasks));
    }
    return cpu_per_task_ * local;
}

std::optional<double> tx_energy(const Action& action, LinkGains gains, const SimConfig& config) {
    return EnergyModel(config).transmit(action, gains);
}

double cpu_energy(int tasks, const Action& action, const SimConfig& config) {
    return EnergyModel(config).cpu(tasks, action);
}

double utility_value(int next_queue, int drops, double cpu_j, double tx_j, double energy_weight) {
    return std::exp(-static_cast<double>(next_queue)) + std::exp(-static_cast<double>(drops)) +
           energy_weight * (std::exp(-cpu_j) + std::exp(-tx_j));
}

std::optional<SlotOutcome> evaluate_slot(const MuLocalState& state, const Action& action, int packet_arrivals,
                                         LinkGains gains, const EnergyModel& energy, const SimConfig& config) {
    const auto tx = energy.transmit(action, gains);
    if (!tx) return std::nullopt;
    SlotOutcome out;
    const QueueStep q = queue_update(state.queue, action, packet_arrivals, config.max_queue);
    out.next_queue = q.next;
    out.drops = q.drops;
    out.cpu_j = energy.cpu(state.tasks, action);
    out.tx_j = *tx;
    out.utility = utility_value(out.next_queue, out.drops, out.cpu_j, out.tx_j, config.energy_weight);
    return out;
}

std::optional<double> utility(const MuLocalState& state, const Action& action, int packet_arrivals, LinkGains gains,
                              const SimConfig& config) {
    const auto out = evaluate_slot(state, action, packet_arrivals, gains, EnergyModel(config), config);
    if (!out) return std::nullopt;
    return out->utility;
}

double sp_payoff(std::span<const double> utilities, std::span<const double> prices, double payment) {
    if (utilities.size() != prices.size()) throw std::invalid_argument("one price per MU utility is required");
    return std::inner_product(utilities.begin(), utilities.end(), prices.begin(), 0.0) - payment;
}

}  // namespace slicing
