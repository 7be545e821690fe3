#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "slicing/auction.hpp"
#include "slicing/baselines.hpp"
#include "slicing/config.hpp"
#include "slicing/env.hpp"
#include "slicing/mu_learner.hpp"
#include "slicing/parallel.hpp"
#include "slicing/sp_agent.hpp"
#include "slicing/topology.hpp"

namespace slicing {

// Raised when a slot violates an auction, mask or queue invariant.
class InvariantError : public std::runtime_error {
public:
    InvariantError(std::int64_t slot, const std::string& what);
    std::int64_t slot() const { return slot_; }

private:
    std::int64_t slot_;
};

struct ExperimentSpec {
    SimConfig config;
    // One entry per SP, or a single entry applied to every SP.
    std::vector<Policy> policies{Policy::drl};
    std::int64_t horizon = 1000;
    std::uint64_t seed = 1;
    int window = 5000;
    bool learning = true;

    Policy policy_of(int sp) const { return policies.size() == 1 ? policies.front() : policies.at(sp); }
    void validate() const;
};

// The INI config plus an optional [harness] section with keys
// policy (one name, or a comma list with one per SP), horizon, window and seed.
ExperimentSpec load_experiment(std::istream& in);
ExperimentSpec load_experiment_file(const std::string& path);

struct MuSlot {
    int sp = 0;
    MuLocalState state;
    int wants = 0;
    Action action;
    int packets = 0;
    SlotOutcome outcome;
};

struct SpSlot {
    double valuation = 0.0;
    int demand = 0;
    int win = 0;
    double payment = 0.0;
    double payoff = 0.0;
};

struct SlotRecord {
    std::int64_t slot = 0;  // 1-based
    std::vector<SpSlot> sps;
    std::vector<MuSlot> mus;
};

struct WindowSummary {
    std::int64_t end_slot = 0;
    std::int64_t slots = 0;
    double avg_utility_per_mu = 0.0;
    double avg_payment = 0.0;  // per SP per slot
    double avg_drops = 0.0;    // per MU per slot
    double avg_queue = 0.0;    // post-update queue, per MU per slot
};

// Running sums behind WindowSummary.
class WindowAccumulator {
public:
    explicit WindowAccumulator(int window) : window_(window) {}

    // Returns a summary when this slot completes a window.
    std::optional<WindowSummary> add(const SlotRecord& record);
    // Partial trailing window, if any slots are pending.
    std::optional<WindowSummary> flush();

    void save(std::ostream& out) const;
    void load(std::istream& in);

private:
    WindowSummary close();

    int window_;
    std::int64_t last_slot_ = 0;
    std::int64_t count_ = 0;
    double utility_ = 0.0;
    double payment_ = 0.0;
    double drops_ = 0.0;
    double queue_ = 0.0;
};

// The slot loop. Environment randomness comes from named per-MU streams so
// different policies see identical mobility and arrivals under one seed.
class Simulation {
public:
    explicit Simulation(ExperimentSpec spec);

    const ExperimentSpec& spec() const { return spec_; }
    const TopologyGraph& topology() const { return *topology_; }
    std::int64_t slot() const { return slot_; }
    const std::vector<MuLocalState>& states() const { return states_; }
    double epsilon() const;

    // Runs one slot and returns its record; throws InvariantError.
    SlotRecord step();

    void set_learning(bool on) { spec_.learning = on; }
    // New initial states and environment streams; agents are kept.
    void reset_environment(std::uint64_t seed);

    const std::vector<MuAgent>& agents() const { return agents_; }
    const std::vector<SpLearner>& sp_learners() const { return learners_; }
    // Bids whose raw valuation was negative and clamped to 0.
    std::int64_t clamped_bids() const { return clamped_bids_; }

    void save(std::ostream& out) const;
    void load(std::istream& in);

    // Cumulative per-MU queue bookkeeping (arrivals, served, drops).
    struct QueueLedger {
        std::int64_t arrivals = 0;
        std::int64_t served = 0;
        std::int64_t drops = 0;
        int initial_queue = 0;
    };
    const std::vector<QueueLedger>& ledger() const { return ledger_; }

private:
    int sp_of(int mu) const { return mu / spec_.config.mus_per_sp; }
    bool drl(int sp) const { return spec_.policy_of(sp) == Policy::drl; }
    void seed_environment(std::uint64_t seed);
    void refresh_observations();
    void train_agents();
    [[noreturn]] void fail(const std::string& what) const;

    ExperimentSpec spec_;
    std::shared_ptr<const TopologyGraph> topology_;
    std::shared_ptr<const MobilityKernel> mobility_;
    std::shared_ptr<const TaskKernel> tasks_;
    EnergyModel energy_;
    ActionSpace space_;
    BaselineParams baseline_params_;

    std::int64_t slot_ = 0;
    std::int64_t clamped_bids_ = 0;
    Location eve_ = 0;
    std::vector<MuLocalState> states_;
    std::vector<QueueLedger> ledger_;

    // Observation of the current slot, derived from states_.
    std::vector<LinkGains> gains_;
    std::vector<ActionMask> masks_;
    std::vector<Features> features_;

    Rng eve_rng_;
    std::vector<Rng> mobility_rng_;
    std::vector<Rng> arrival_rng_;
    std::vector<Rng> baseline_bid_rng_;
    std::vector<Rng> baseline_act_rng_;

    std::vector<MuAgent> agents_;
    std::vector<int> agent_of_;  // MU -> agents_ index or -1
    std::vector<int> owns_net_;  // agent writes its net in checkpoints
    std::vector<SpLearner> learners_;
    std::vector<int> learner_of_;  // SP -> learners_ index or -1
};

struct RunResult {
    std::vector<WindowSummary> windows;
    std::int64_t slots = 0;
};

using SlotSink = std::function<void(const SlotRecord&)>;

// Runs spec.horizon slots from a fresh simulation.
RunResult run(const ExperimentSpec& spec, const SlotSink& sink = {});
// Continues `sim` for `slots` more slots. `window` carries partial windows
// across calls; the trailing partial window is not flushed.
RunResult run(Simulation& sim, std::int64_t slots, WindowAccumulator& window, const SlotSink& sink = {});

// Fixed-width CSV writers.
void write_slots_header(std::ostream& out);
void write_slot_rows(std::ostream& out, const SlotRecord& record);
void write_summary_header(std::ostream& out);
void write_summary_row(std::ostream& out, const WindowSummary& w, const std::string& policy, double lambda,
                       int channels);

// (1 - gamma) sum_k gamma^(k-1) F_k over one payoff sequence.
double discounted_return(std::span<const double> payoffs, double gamma);

struct Estimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

Estimate mean_and_standard_error(std::span<const double> samples);

// Monte-Carlo discounted payoff per SP with learning disabled. Episode e
// restarts the environment from its own seed and runs `horizon` slots.
std::vector<Estimate> evaluate_policy(const Simulation& trained, int episodes, std::int64_t horizon,
                                      std::uint64_t seed);

enum class SweepAxis { lambda, channels };

struct SweepSpec {
    ExperimentSpec base;
    SweepAxis axis = SweepAxis::lambda;
    std::vector<double> values;
    std::vector<Policy> policies;
    int seeds = 1;  // base.seed, base.seed + 1, ...
    Exec exec = Exec::parallel;
};

struct SweepRow {
    Policy policy = Policy::drl;
    double lambda = 0.0;
    int channels = 0;
    // Windows averaged over seeds; the last one is the final window.
    std::vector<WindowSummary> windows;
    // Final-window utility of each seed.
    std::vector<double> final_by_seed;
};

// One run per (point, policy, seed), run concurrently when exec is parallel.
std::vector<SweepRow> sweep(const SweepSpec& spec);

// Every window of every row, in summary.csv layout.
void write_sweep_summary(std::ostream& out, const std::vector<SweepRow>& rows);
// One line per row: final-window utility, mean over seeds and its standard error.
void write_sweep_table(std::ostream& out, const std::vector<SweepRow>& rows);

}  // namespace slicing
