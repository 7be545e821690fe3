#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "slicing/auction_oracle.hpp"
#include "slicing/config.hpp"
#include "slicing/harness.hpp"

namespace fs = std::filesystem;
using namespace slicing;

namespace {

constexpr int kInvariantExit = 3;

struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
    std::vector<std::string> policies;
    bool paper_scale = false;
    std::optional<std::int64_t> horizon;
    std::optional<int> window;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config_path, "INI configuration file (an optional [harness] section sets policy, horizon, window, seed)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", c.seed, "master seed");
    cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--policy", c.policies, "drl | channel_aware | queue_aware | random (per SP, or one for all)")
        ->delimiter(',');
    cmd->add_flag("--paper-scale", c.paper_scale, "six MUs per SP instead of two");
    cmd->add_option("--horizon", c.horizon, "slots to simulate");
    cmd->add_option("--window", c.window, "metric window in slots");
}

ExperimentSpec make_spec(const Common& c) {
    ExperimentSpec spec;
    if (!c.config_path.empty()) spec = load_experiment_file(c.config_path);
    if (c.paper_scale) spec.config.mus_per_sp = SimConfig::paper_scale().mus_per_sp;
    if (c.seed) spec.seed = *c.seed;
    if (!c.policies.empty()) {
        spec.policies.clear();
        for (const auto& p : c.policies) spec.policies.push_back(parse_policy(p));
    }
    if (c.horizon) spec.horizon = *c.horizon;
    if (c.window) spec.window = *c.window;
    spec.validate();
    return spec;
}

std::string policy_label(const ExperimentSpec& spec) {
    std::string label;
    for (Policy p : spec.policies) label += (label.empty() ? "" : "+") + to_string(p);
    return label;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    return out;
}

int cmd_run(const Common& c, bool write_slots, const std::string& resume) {
    const ExperimentSpec spec = make_spec(c);
    fs::create_directories(c.out);
    Simulation sim(spec);
    WindowAccumulator window(spec.window);
    if (!resume.empty()) {
        std::ifstream in(resume);
        if (!in) throw std::runtime_error(fmt::format("cannot read {}", resume));
        sim.load(in);
        window.load(in);
    }

    std::ofstream slots;
    if (write_slots) {
        slots = open_out(fs::path(c.out) / "slots.csv");
        write_slots_header(slots);
    }
    const std::int64_t remaining = std::max<std::int64_t>(0, spec.horizon - sim.slot());
    RunResult result = run(sim, remaining, window, [&](const SlotRecord& r) {
        if (write_slots) write_slot_rows(slots, r);
    });

    auto checkpoint = open_out(fs::path(c.out) / "checkpoint.txt");
    sim.save(checkpoint);
    window.save(checkpoint);
    if (auto w = window.flush()) result.windows.push_back(*w);

    auto summary = open_out(fs::path(c.out) / "summary.csv");
    write_summary_header(summary);
    for (const auto& w : result.windows) {
        write_summary_row(summary, w, policy_label(spec), spec.config.arrival_rate, spec.config.channels);
    }
    if (!result.windows.empty()) {
        fmt::print("slots {}  final-window utility per MU {:.6f}\n", sim.slot(),
                   result.windows.back().avg_utility_per_mu);
    }
    return 0;
}

int cmd_sweep(const Common& c, const std::string& axis, const std::vector<double>& values, int seeds, bool serial) {
    SweepSpec sweep_spec;
    Common base = c;
    base.policies = {"drl"};
    sweep_spec.base = make_spec(base);
    sweep_spec.values = values;
    sweep_spec.seeds = seeds;
    sweep_spec.exec = serial ? Exec::serial : Exec::parallel;
    if (axis == "lambda") {
        sweep_spec.axis = SweepAxis::lambda;
    } else if (axis == "J") {
        sweep_spec.axis = SweepAxis::channels;
    } else {
        throw ConfigError(fmt::format("unknown sweep axis '{}'", axis));
    }
    if (c.policies.empty()) {
        sweep_spec.policies = {Policy::drl, Policy::channel_aware, Policy::queue_aware, Policy::random};
    } else {
        for (const auto& p : c.policies) sweep_spec.policies.push_back(parse_policy(p));
    }

    const auto rows = sweep(sweep_spec);
    fs::create_directories(c.out);
    auto summary = open_out(fs::path(c.out) / "summary.csv");
    write_sweep_summary(summary, rows);
    auto table = open_out(fs::path(c.out) / "sweep.csv");
    write_sweep_table(table, rows);
    write_sweep_table(std::cout, rows);
    return 0;
}

int cmd_eval(const Common& c, const std::string& resume, int episodes, std::int64_t eval_horizon) {
    const ExperimentSpec spec = make_spec(c);
    Simulation sim(spec);
    if (!resume.empty()) {
        std::ifstream in(resume);
        if (!in) throw std::runtime_error(fmt::format("cannot read {}", resume));
        sim.load(in);
    } else {
        WindowAccumulator window(spec.window);
        run(sim, spec.horizon, window);
    }
    const auto estimates = evaluate_policy(sim, episodes, eval_horizon, splitmix64(spec.seed ^ fnv1a("evaluate")));
    fs::create_directories(c.out);
    auto out = open_out(fs::path(c.out) / "eval.csv");
    out << "sp,policy,discounted_payoff,std_error,episodes,horizon\n";
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const std::string line = fmt::format("{},{},{:.9f},{:.9f},{},{}\n", i, to_string(spec.policy_of(static_cast<int>(i))),
                                             estimates[i].mean, estimates[i].standard_error, episodes, eval_horizon);
        out << line;
        std::cout << line;
    }
    return 0;
}

int cmd_oracle(std::int64_t instances, std::uint64_t seed, bool serial) {
    const auto report =
        oracle::run_oracle_check(instances, seed, oracle::InstanceLimits{}, serial ? Exec::serial : Exec::parallel);
    fmt::print("instances {}  welfare mismatches {}  constraint failures {}  payment failures {}\n",
               report.instances, report.welfare_mismatches, report.constraint_failures, report.payment_failures);
    for (const auto& f : report.first_failures) fmt::print("  {}\n", f);
    return report.ok() ? 0 : kInvariantExit;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"RAN slicing simulator: channel auctions with per-MU deep Q-learning"};
    app.require_subcommand(1);

    Common run_opts;
    bool no_slots = false;
    std::string resume;
    auto* run_cmd = app.add_subcommand("run", "simulate one experiment and write slots.csv and summary.csv");
    add_common(run_cmd, run_opts);
    run_cmd->add_flag("--no-slots", no_slots, "skip the per-slot CSV");
    run_cmd->add_option("--resume", resume, "continue from a checkpoint.txt")->check(CLI::ExistingFile);

    Common sweep_opts;
    std::string axis = "lambda";
    std::vector<double> values{6, 8, 10};
    int seeds = 3;
    bool serial = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "final-window utility over an arrival-rate or channel axis");
    add_common(sweep_cmd, sweep_opts);
    sweep_cmd->add_option("--axis", axis, "lambda | J")->check(CLI::IsMember({"lambda", "J"}));
    sweep_cmd->add_option("--values", values, "axis points")->delimiter(',');
    sweep_cmd->add_option("--seeds", seeds, "seeds per point")->check(CLI::PositiveNumber);
    sweep_cmd->add_flag("--serial", serial, "run points one after another");

    Common eval_opts;
    std::string eval_resume;
    int episodes = 20;
    std::int64_t eval_horizon = 200;
    auto* eval_cmd = app.add_subcommand("eval", "train (or load) agents, then estimate discounted SP payoffs");
    add_common(eval_cmd, eval_opts);
    eval_cmd->add_option("--resume", eval_resume, "evaluate the agents in a checkpoint")->check(CLI::ExistingFile);
    eval_cmd->add_option("--episodes", episodes, "Monte-Carlo rollouts")->check(CLI::PositiveNumber);
    eval_cmd->add_option("--eval-horizon", eval_horizon, "slots per rollout")->check(CLI::PositiveNumber);

    std::int64_t instances = 10000;
    std::uint64_t oracle_seed = 1;
    bool oracle_serial = false;
    auto* oracle_cmd = app.add_subcommand("oracle-check", "compare the auction against brute force");
    oracle_cmd->add_option("--instances", instances, "random instances")->check(CLI::PositiveNumber);
    oracle_cmd->add_option("--seed", oracle_seed, "master seed");
    oracle_cmd->add_flag("--serial", oracle_serial, "single-threaded");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return cmd_run(run_opts, !no_slots, resume);
        if (*sweep_cmd) return cmd_sweep(sweep_opts, axis, values, seeds, serial);
        if (*eval_cmd) return cmd_eval(eval_opts, eval_resume, episodes, eval_horizon);
        if (*oracle_cmd) return cmd_oracle(instances, oracle_seed, oracle_serial);
    } catch (const InvariantError& e) {
        fmt::print(std::cerr, "invariant violated at {}\n", e.what());
        return kInvariantExit;
    } catch (const std::exception& e) {
        fmt::print(std::cerr, "error: {}\n", e.what());
        return 1;
    }
    return 0;
}
