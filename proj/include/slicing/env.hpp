#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "slicing/config.hpp"
#include "slicing/rng.hpp"
#include "slicing/topology.hpp"

namespace slicing {

// chi_n: what a MU observes at the start of a slot.
struct MuLocalState {
    Location mu_loc = 0;
    Location eve_loc = 0;
    int tasks = 0;
    int queue = 0;

    bool operator==(const MuLocalState&) const = default;
};

struct Action {
    int phi = 0;       // channel held this slot
    int offload = 0;   // tasks sent to the MEC server
    int schedule = 0;  // packets transmitted

    // A MU without a channel does nothing.
    Action executed() const { return phi ? *this : Action{}; }
    int payload_tasks() const { return phi * offload; }
    int payload_packets() const { return phi * schedule; }

    bool operator==(const Action&) const = default;
};

struct LinkGains {
    double uplink = 0.0;
    double eavesdropper = 0.0;
};

LinkGains link_gains(const TopologyGraph& topology, const MuLocalState& state);

// Sparse row-stochastic kernel over grid locations.
class MobilityKernel {
public:
    using Row = std::vector<std::pair<Location, double>>;

    explicit MobilityKernel(std::vector<Row> rows);

    // Stay with probability `stay`; otherwise move to a uniformly chosen
    // in-grid 4-neighbour (boundary cells renormalise over fewer neighbours).
    static MobilityKernel lazy_random_walk(const Grid& grid, double stay);
    static MobilityKernel identity(const Grid& grid);

    const Row& row(Location loc) const { return rows_[loc]; }
    int size() const { return static_cast<int>(rows_.size()); }
    Location step(Location loc, Rng& rng) const;

private:
    std::vector<Row> rows_;
};

// Dense row-stochastic kernel over {0..A_max}.
class TaskKernel {
public:
    explicit TaskKernel(std::vector<std::vector<double>> matrix);
    static TaskKernel uniform(int max_tasks);

    int states() const { return static_cast<int>(matrix_.size()); }
    double probability(int from, int to) const { return matrix_[from][to]; }
    int step(int tasks, Rng& rng) const;

private:
    std::vector<std::vector<double>> matrix_;
};

Location step_mobility(Location loc, const MobilityKernel& kernel, Rng& rng);

struct Arrivals {
    int next_tasks = 0;
    int packets = 0;
};

// Next task count from the Markov chain, then a truncated Poisson packet count.
Arrivals sample_arrivals(const MuLocalState& state, const TaskKernel& tasks, double rate, int cap, Rng& rng);

struct QueueStep {
    int next = 0;
    int drops = 0;
};

// Throws std::invalid_argument when more packets are scheduled than queued.
QueueStep queue_update(int queue, const Action& action, int arrivals, int max_queue);

// Precomputed per-config constants of the two energy models.
class EnergyModel {
public:
    explicit EnergyModel(const SimConfig& config);

    // Secrecy-rate transmit energy in J, or nullopt when the action cannot be
    // executed (no secrecy capacity, or above the per-slot power budget).
    std::optional<double> transmit(const Action& action, LinkGains gains) const;
    // Local CPU energy in J for the tasks not offloaded. Throws when more
    // tasks are offloaded than arrived.
    double cpu(int tasks, const Action& action) const;

    // Exponent x = payload bits / (eta * delta).
    double spectral_load(const Action& action) const;
    // The closed-form energy without the power cap; nullopt iff the secrecy
    // denominator is non-positive for a non-empty payload.
    std::optional<double> uncapped_transmit(const Action& action, LinkGains gains) const;

    double max_slot_energy() const { return max_slot_energy_; }
    double cpu_energy_per_task() const { return cpu_per_task_; }

private:
    double task_bits_;
    double packet_bits_;
    double bits_per_slot_;  // eta * delta
    double noise_energy_;   // delta * eta * sigma^2
    double max_slot_energy_;
    double cpu_per_task_;
};

std::optional<double> tx_energy(const Action& action, LinkGains gains, const SimConfig& config);
double cpu_energy(int tasks, const Action& action, const SimConfig& config);

struct SlotOutcome {
    double utility = 0.0;
    int next_queue = 0;
    int drops = 0;
    double cpu_j = 0.0;
    double tx_j = 0.0;
};

// exp(-W') + exp(-D) + l * (exp(-E_cpu) + exp(-E_tx)); nullopt if the
// action is not executable.
std::optional<SlotOutcome> evaluate_slot(const MuLocalState& state, const Action& action, int packet_arrivals,
                                         LinkGains gains, const EnergyModel& energy, const SimConfig& config);

double utility_value(int next_queue, int drops, double cpu_j, double tx_j, double energy_weight);

std::optional<double> utility(const MuLocalState& state, const Action& action, int packet_arrivals, LinkGains gains,
                              const SimConfig& config);

// sum_n alpha_n U_n - tau
double sp_payoff(std::span<const double> utilities, std::span<const double> prices, double payment);

}  // namespace slicing
