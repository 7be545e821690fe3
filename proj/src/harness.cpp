#include "slicing/harness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "slicing/serialize.hpp"

namespace slicing {

InvariantError::InvariantError(std::int64_t slot, const std::string& what)
    : std::runtime_error(fmt::format("slot {}: {}", slot, what)), slot_(slot) {}

void ExperimentSpec::validate() const {
    config.validate();
    if (horizon < 1) throw ConfigError("horizon must be at least one slot");
    if (window < 1) throw ConfigError("metric window must be at least one slot");
    if (policies.size() != 1 && policies.size() != static_cast<std::size_t>(config.sp_count)) {
        throw ConfigError(fmt::format("expected 1 or {} policies, got {}", config.sp_count, policies.size()));
    }
}

ExperimentSpec load_experiment(std::istream& in) {
    const std::string text(std::istreambuf_iterator<char>(in), {});
    std::istringstream config_in(text);
    ExperimentSpec spec;
    spec.config = load_config(config_in);

    boost::property_tree::ptree tree;
    std::istringstream harness_in(text);
    boost::property_tree::read_ini(harness_in, tree);
    if (auto harness = tree.get_child_optional("harness")) {
        for (const auto& [key, node] : *harness) {
            const std::string value = node.get_value<std::string>();
            try {
                if (key == "policy") {
                    spec.policies.clear();
                    std::stringstream names(value);
                    std::string name;
                    while (std::getline(names, name, ',')) {
                        name.erase(0, name.find_first_not_of(" \t"));
                        name.erase(name.find_last_not_of(" \t") + 1);
                        spec.policies.push_back(parse_policy(name));
                    }
                } else if (key == "horizon") {
                    spec.horizon = std::stoll(value);
                } else if (key == "window") {
                    spec.window = std::stoi(value);
                } else if (key == "seed") {
                    spec.seed = std::stoull(value);
                } else {
                    throw ConfigError(fmt::format("unknown config key 'harness.{}'", key));
                }
            } catch (const std::logic_error&) {
                throw ConfigError(fmt::format("bad value for harness.{}: '{}'", key, value));
            }
        }
    }
    spec.validate();
    return spec;
}

ExperimentSpec load_experiment_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path));
    return load_experiment(in);
}

std::optional<WindowSummary> WindowAccumulator::add(const SlotRecord& record) {
    double utility = 0.0, drops = 0.0, queue = 0.0, payment = 0.0;
    for (const MuSlot& m : record.mus) {
        utility += m.outcome.utility;
        drops += m.outcome.drops;
        queue += m.outcome.next_queue;
    }
    for (const SpSlot& s : record.sps) payment += s.payment;
    const double mus = static_cast<double>(record.mus.size());
    utility_ += utility / mus;
    drops_ += drops / mus;
    queue_ += queue / mus;
    payment_ += payment / static_cast<double>(record.sps.size());
    last_slot_ = record.slot;
    if (++count_ == window_) return close();
    return std::nullopt;
}

std::optional<WindowSummary> WindowAccumulator::flush() {
    if (count_ == 0) return std::nullopt;
    return close();
}

WindowSummary WindowAccumulator::close() {
    const double n = static_cast<double>(count_);
    WindowSummary w{last_slot_, count_, utility_ / n, payment_ / n, drops_ / n, queue_ / n};
    count_ = 0;
    utility_ = payment_ = drops_ = queue_ = 0.0;
    return w;
}

void WindowAccumulator::save(std::ostream& out) const {
    write_line(out, "window", window_, last_slot_, count_, utility_, payment_, drops_, queue_);
}

void WindowAccumulator::load(std::istream& in) {
    auto f = read_fields(in, "window", 7);
    window_ = std::stoi(f[0]);
    last_slot_ = std::stoll(f[1]);
    count_ = std::stoll(f[2]);
    utility_ = parse_double(f[3]);
    payment_ = parse_double(f[4]);
    drops_ = parse_double(f[5]);
    queue_ = parse_double(f[6]);
}

Simulation::Simulation(ExperimentSpec spec)
    : spec_((spec.validate(), std::move(spec))),
      topology_(std::make_shared<TopologyGraph>(build_default_topology(spec_.config))),
      mobility_(std::make_shared<MobilityKernel>(
          MobilityKernel::lazy_random_walk(topology_->grid(), spec_.config.mobility_stay))),
      tasks_(std::make_shared<TaskKernel>(TaskKernel::uniform(spec_.config.max_tasks))),
      energy_(spec_.config),
      space_{spec_.config.max_tasks, spec_.config.max_queue},
      baseline_params_{spec_.config.queue_threshold, spec_.config.random_valuation_cap,
                       topology_->gain_model().h0} {
    const SimConfig& c = spec_.config;
    const int mus = c.mu_count();
    const AdamParams adam{c.learning_rate};

    agent_of_.assign(mus, -1);
    std::vector<std::shared_ptr<QNet>> sp_net(c.sp_count);
    for (int n = 0; n < mus; ++n) {
        const int sp = sp_of(n);
        if (!drl(sp)) continue;
        std::shared_ptr<QNet> net;
        bool owner = true;
        if (c.share_weights) {
            if (!sp_net[sp]) {
                Rng init = make_stream(spec_.seed, "init-shared", sp);
                sp_net[sp] = std::make_shared<QNet>(space_, c.hidden_width, adam, init);
            } else {
                owner = false;
            }
            net = sp_net[sp];
        } else {
            Rng init = make_stream(spec_.seed, "init", n);
            net = std::make_shared<QNet>(space_, c.hidden_width, adam, init);
        }
        agent_of_[n] = static_cast<int>(agents_.size());
        owns_net_.push_back(owner);
        agents_.emplace_back(std::move(net), static_cast<std::size_t>(c.replay_size),
                             make_stream(spec_.seed, "explore", n), make_stream(spec_.seed, "replay", n));
    }

    learner_of_.assign(c.sp_count, -1);
    for (int i = 0; i < c.sp_count; ++i) {
        if (!drl(i)) continue;
        SpLearner::Options o;
        o.states = c.abstract_states;
        o.max_payment = c.max_payment;
        o.warmup_slots = c.payment_warmup_slots;
        o.schedule = {c.zeta0, c.zeta_kappa};
        o.gamma = c.discount;
        learner_of_[i] = static_cast<int>(learners_.size());
        learners_.emplace_back(o);
    }

    seed_environment(spec_.seed);
}

void Simulation::seed_environment(std::uint64_t seed) {
    const SimConfig& c = spec_.config;
    const int mus = c.mu_count();
    const Grid& grid = topology_->grid();

    eve_rng_ = make_stream(seed, "eavesdropper");
    mobility_rng_.clear();
    arrival_rng_.clear();
    baseline_act_rng_.clear();
    baseline_bid_rng_.clear();
    for (int n = 0; n < mus; ++n) {
        mobility_rng_.push_back(make_stream(seed, "mobility", n));
        arrival_rng_.push_back(make_stream(seed, "arrivals", n));
        baseline_act_rng_.push_back(make_stream(seed, "baseline-act", n));
    }
    for (int i = 0; i < c.sp_count; ++i) baseline_bid_rng_.push_back(make_stream(seed, "baseline-bid", i));

    Rng start = make_stream(seed, "initial-state");
    const auto cells = static_cast<std::uint64_t>(grid.size());
    eve_ = static_cast<Location>(uniform_below(start, cells));
    states_.assign(mus, {});
    ledger_.assign(mus, {});
    for (int n = 0; n < mus; ++n) {
        states_[n].mu_loc = static_cast<Location>(uniform_below(start, cells));
        states_[n].eve_loc = eve_;
        states_[n].tasks = uniform_int(start, 0, c.max_tasks);
        states_[n].queue = 0;
    }
    refresh_observations();
}

void Simulation::reset_environment(std::uint64_t seed) {
    slot_ = 0;
    seed_environment(seed);
}

void Simulation::refresh_observations() {
    const int mus = spec_.config.mu_count();
    gains_.resize(mus);
    masks_.resize(mus);
    features_.resize(mus);
    for (int n = 0; n < mus; ++n) {
        gains_[n] = link_gains(*topology_, states_[n]);
        if (agent_of_[n] < 0) continue;
        masks_[n] = feasibility_mask(states_[n], gains_[n], space_, energy_);
        features_[n] = encode(states_[n], topology_->grid(), spec_.config.max_tasks, spec_.config.max_queue);
    }
}

double Simulation::epsilon() const {
    const SimConfig& c = spec_.config;
    if (!spec_.learning || c.epsilon_anneal_slots <= 0) return c.epsilon;
    const double frac = std::min(1.0, static_cast<double>(slot_) / c.epsilon_anneal_slots);
    return c.epsilon_start + (c.epsilon - c.epsilon_start) * frac;
}

void Simulation::fail(const std::string& what) const { throw InvariantError(slot_ + 1, what); }

void Simulation::train_agents() {
    const SimConfig& c = spec_.config;
    for (MuAgent& agent : agents_) agent.train(static_cast<std::size_t>(c.batch_size), c.discount);
    if ((slot_ + 1) % c.target_sync_period == 0) {
        for (std::size_t a = 0; a < agents_.size(); ++a) {
            if (owns_net_[a]) agents_[a].net().sync_target();
        }
    }
}

SlotRecord Simulation::step() {
    const SimConfig& c = spec_.config;
    const int mus = c.mu_count();
    const int bs_count = topology_->bs_count();
    const double eps = epsilon();

    SlotRecord record;
    record.slot = slot_ + 1;
    record.mus.resize(mus);
    record.sps.resize(c.sp_count);

    // (1) This slot's packet arrivals and next task counts.
    std::vector<Arrivals> arrivals(mus);
    for (int n = 0; n < mus; ++n) {
        arrivals[n] = sample_arrivals(states_[n], *tasks_, c.arrival_rate, c.effective_arrival_cap(), arrival_rng_[n]);
        record.mus[n].sp = sp_of(n);
        record.mus[n].state = states_[n];
        record.mus[n].packets = arrivals[n].packets;
    }

    // (2) Channel preferences of the learning MUs.
    std::vector<std::vector<double>> q(mus);
    std::vector<ChannelPreference> pref(mus);
    for (int n = 0; n < mus; ++n) {
        if (agent_of_[n] < 0) continue;
        MuAgent& agent = agents_[agent_of_[n]];
        q[n] = agent.q_values(features_[n], masks_[n]);
        pref[n] = channel_preference(q[n], space_);
        if (spec_.learning && bernoulli(agent.explore_rng(), eps)) pref[n].z = bernoulli(agent.explore_rng(), 0.5);
    }

    // (3) Bids.
    std::vector<Bid> bids(c.sp_count);
    std::vector<MuRequest> requests(mus);
    std::vector<BsId> areas(mus);
    for (int n = 0; n < mus; ++n) areas[n] = topology_->coverage(states_[n].mu_loc);
    for (int i = 0; i < c.sp_count; ++i) {
        const int first = i * c.mus_per_sp;
        const std::size_t count = static_cast<std::size_t>(c.mus_per_sp);
        if (drl(i)) {
            std::vector<MuReport> reports(count);
            for (std::size_t k = 0; k < count; ++k) {
                const int n = first + static_cast<int>(k);
                reports[k] = {pref[n].value, pref[n].z, areas[n], c.utility_price};
            }
            const BidResult r = learners_[learner_of_[i]].bid(reports, bs_count);
            if (r.clamped) ++clamped_bids_;
            bids[i] = r.bid;
        } else {
            const BaselineBid b = baseline_bid(spec_.policy_of(i), std::span(states_).subspan(first, count),
                                               std::span(gains_).subspan(first, count),
                                               std::span(areas).subspan(first, count), bs_count, baseline_params_,
                                               baseline_bid_rng_[i]);
            bids[i] = b.bid;
            for (std::size_t k = 0; k < count; ++k) pref[first + k].z = b.wants[k];
        }
        record.sps[i].valuation = bids[i].valuation;
        record.sps[i].demand = bids[i].total_demand();
    }
    for (int n = 0; n < mus; ++n) {
        requests[n] = {sp_of(n), areas[n], pref[n].z != 0};
        record.mus[n].wants = pref[n].z;
    }

    // (4) Auction.
    const AuctionOutcome auction = run_auction(bids, requests, c.channels, topology_->graph());
    if (auto problem = check_outcome(auction, bids, requests, c.channels, topology_->graph())) fail(*problem);
    for (int n = 0; n < mus; ++n) {
        const bool served = auction.winners[sp_of(n)] && requests[n].wants_channel;
        if (served != (auction.channel[n] >= 0)) fail(fmt::format("MU {} channel does not match its SP's win", n));
    }

    // (5)-(6) Actions, utilities, queues.
    std::vector<double> utilities(mus);
    std::vector<int> action_index(mus, 0);
    for (int n = 0; n < mus; ++n) {
        const int phi = auction.channel[n] >= 0 ? 1 : 0;
        Action a;
        if (agent_of_[n] >= 0) {
            a = select_action(q[n], space_, phi, eps, agents_[agent_of_[n]].explore_rng());
            action_index[n] = space_.index(a);
            if (!masks_[n][action_index[n]]) fail(fmt::format("MU {} chose masked action {}", n, action_index[n]));
        } else {
            a = baseline_act(states_[n], phi, gains_[n], energy_, baseline_act_rng_[n]);
        }
        const auto outcome = evaluate_slot(states_[n], a, arrivals[n].packets, gains_[n], energy_, c);
        if (!outcome) fail(fmt::format("MU {} action ({}, {}, {}) is not executable", n, a.phi, a.offload, a.schedule));
        if (outcome->next_queue < 0 || outcome->next_queue > c.max_queue) {
            fail(fmt::format("MU {} queue {} outside [0, {}]", n, outcome->next_queue, c.max_queue));
        }
        QueueLedger& l = ledger_[n];
        l.arrivals += arrivals[n].packets;
        l.served += a.payload_packets();
        l.drops += outcome->drops;
        if (l.initial_queue + l.arrivals - l.served - l.drops != outcome->next_queue) {
            fail(fmt::format("MU {} packet conservation broken", n));
        }
        record.mus[n].action = a;
        record.mus[n].outcome = *outcome;
        utilities[n] = outcome->utility;
    }
    std::vector<double> prices(static_cast<std::size_t>(c.mus_per_sp), c.utility_price);
    for (int i = 0; i < c.sp_count; ++i) {
        SpSlot& s = record.sps[i];
        s.win = auction.winners[i];
        s.payment = auction.payments[i];
        s.payoff = sp_payoff(std::span(utilities).subspan(static_cast<std::size_t>(i) * c.mus_per_sp, prices.size()),
                             prices, s.payment);
    }

    // (7) Next states, then learning.
    std::vector<Features> old_features = features_;
    std::vector<ActionMask> old_masks = std::move(masks_);
    masks_.clear();
    eve_ = mobility_->step(eve_, eve_rng_);
    for (int n = 0; n < mus; ++n) {
        MuLocalState& s = states_[n];
        s.mu_loc = mobility_->step(s.mu_loc, mobility_rng_[n]);
        s.eve_loc = eve_;
        s.tasks = arrivals[n].next_tasks;
        s.queue = record.mus[n].outcome.next_queue;
    }
    refresh_observations();

    if (spec_.learning) {
        for (int n = 0; n < mus; ++n) {
            if (agent_of_[n] < 0) continue;
            agents_[agent_of_[n]].remember(
                {old_features[n], action_index[n], utilities[n], features_[n], old_masks[n], masks_[n]});
        }
        train_agents();
    }
    for (int i = 0; i < c.sp_count; ++i) {
        if (learner_of_[i] < 0) continue;
        SpLearner& learner = learners_[learner_of_[i]];
        if (spec_.learning) {
            learner.observe(auction.winners[i], auction.payments[i]);
        } else {
            learner.advance(auction.payments[i]);
        }
    }

    ++slot_;
    return record;
}

void Simulation::save(std::ostream& out) const {
    write_header(out, "simulation");
    write_line(out, "sim", slot_, clamped_bids_, eve_, states_.size(), agents_.size(), learners_.size());
    for (std::size_t n = 0; n < states_.size(); ++n) {
        const MuLocalState& s = states_[n];
        const QueueLedger& l = ledger_[n];
        write_line(out, "mu", s.mu_loc, s.eve_loc, s.tasks, s.queue, l.arrivals, l.served, l.drops, l.initial_queue);
    }
    write_rng(out, "rng.eavesdropper", eve_rng_);
    for (std::size_t n = 0; n < states_.size(); ++n) {
        write_rng(out, "rng.mobility", mobility_rng_[n]);
        write_rng(out, "rng.arrivals", arrival_rng_[n]);
        write_rng(out, "rng.baseline-act", baseline_act_rng_[n]);
    }
    for (const Rng& r : baseline_bid_rng_) write_rng(out, "rng.baseline-bid", r);
    for (std::size_t a = 0; a < agents_.size(); ++a) agents_[a].save(out, owns_net_[a] != 0);
    for (const SpLearner& l : learners_) l.save(out);
}

void Simulation::load(std::istream& in) {
    read_header(in, "simulation");
    auto f = read_fields(in, "sim", 6);
    if (std::stoull(f[3]) != states_.size() || std::stoull(f[4]) != agents_.size() ||
        std::stoull(f[5]) != learners_.size()) {
        throw std::runtime_error("checkpoint: population does not match the configuration");
    }
    slot_ = std::stoll(f[0]);
    clamped_bids_ = std::stoll(f[1]);
    eve_ = std::stoi(f[2]);
    for (std::size_t n = 0; n < states_.size(); ++n) {
        auto m = read_fields(in, "mu", 8);
        states_[n] = {std::stoi(m[0]), std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3])};
        ledger_[n] = {std::stoll(m[4]), std::stoll(m[5]), std::stoll(m[6]), std::stoi(m[7])};
    }
    eve_rng_ = read_rng(in, "rng.eavesdropper");
    for (std::size_t n = 0; n < states_.size(); ++n) {
        mobility_rng_[n] = read_rng(in, "rng.mobility");
        arrival_rng_[n] = read_rng(in, "rng.arrivals");
        baseline_act_rng_[n] = read_rng(in, "rng.baseline-act");
    }
    for (Rng& r : baseline_bid_rng_) r = read_rng(in, "rng.baseline-bid");
    for (std::size_t a = 0; a < agents_.size(); ++a) agents_[a].load(in, owns_net_[a] != 0);
    for (SpLearner& l : learners_) l.load(in);
    refresh_observations();
}

RunResult run(Simulation& sim, std::int64_t slots, WindowAccumulator& window, const SlotSink& sink) {
    RunResult result;
    for (std::int64_t k = 0; k < slots; ++k) {
        const SlotRecord record = sim.step();
        if (sink) sink(record);
        if (auto w = window.add(record)) result.windows.push_back(*w);
        ++result.slots;
    }
    return result;
}

RunResult run(const ExperimentSpec& spec, const SlotSink& sink) {
    Simulation sim(spec);
    WindowAccumulator window(spec.window);
    RunResult result = run(sim, spec.horizon, window, sink);
    if (auto w = window.flush()) result.windows.push_back(*w);
    return result;
}

void write_slots_header(std::ostream& out) {
    out << "slot,mu,sp,mu_loc,eve_loc,tasks,queue,want,phi,offload,schedule,packets,next_queue,drops,"
           "cpu_j,tx_j,utility,sp_valuation,sp_demand,sp_win,sp_payment,sp_payoff\n";
}

void write_slot_rows(std::ostream& out, const SlotRecord& r) {
    for (std::size_t n = 0; n < r.mus.size(); ++n) {
        const MuSlot& m = r.mus[n];
        const SpSlot& s = r.sps[m.sp];
        fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:.9e},{:.9e},{:.9e},{:.9e},{},{},{:.9e},{:.9e}\n",
                   r.slot, n, m.sp, m.state.mu_loc, m.state.eve_loc, m.state.tasks, m.state.queue, m.wants,
                   m.action.phi, m.action.offload, m.action.schedule, m.packets, m.outcome.next_queue,
                   m.outcome.drops, m.outcome.cpu_j, m.outcome.tx_j, m.outcome.utility, s.valuation, s.demand, s.win,
                   s.payment, s.payoff);
    }
}

void write_summary_header(std::ostream& out) {
    out << "slot_window,policy,lambda,J,avg_utility_per_mu,avg_payment,avg_drops,avg_queue\n";
}

void write_summary_row(std::ostream& out, const WindowSummary& w, const std::string& policy, double lambda,
                       int channels) {
    fmt::print(out, "{},{},{:.6f},{},{:.9f},{:.9f},{:.9f},{:.9f}\n", w.end_slot, policy, lambda, channels,
               w.avg_utility_per_mu, w.avg_payment, w.avg_drops, w.avg_queue);
}

double discounted_return(std::span<const double> payoffs, double gamma) {
    double sum = 0.0;
    double weight = 1.0;
    for (double f : payoffs) {
        sum += weight * f;
        weight *= gamma;
    }
    return (1.0 - gamma) * sum;
}

Estimate mean_and_standard_error(std::span<const double> samples) {
    Estimate e;
    if (samples.empty()) return e;
    const double n = static_cast<double>(samples.size());
    for (double x : samples) e.mean += x;
    e.mean /= n;
    if (samples.size() < 2) return e;
    double ss = 0.0;
    for (double x : samples) ss += (x - e.mean) * (x - e.mean);
    e.standard_error = std::sqrt(ss / (n - 1.0) / n);
    return e;
}

std::vector<Estimate> evaluate_policy(const Simulation& trained, int episodes, std::int64_t horizon,
                                      std::uint64_t seed) {
    const int sps = trained.spec().config.sp_count;
    const double gamma = trained.spec().config.discount;
    std::vector<std::vector<double>> returns(sps);
    for (int e = 0; e < episodes; ++e) {
        Simulation sim = trained;
        sim.set_learning(false);
        sim.reset_environment(splitmix64(seed + static_cast<std::uint64_t>(e)));
        std::vector<std::vector<double>> payoffs(sps);
        for (std::int64_t k = 0; k < horizon; ++k) {
            const SlotRecord r = sim.step();
            for (int i = 0; i < sps; ++i) payoffs[i].push_back(r.sps[i].payoff);
        }
        for (int i = 0; i < sps; ++i) returns[i].push_back(discounted_return(payoffs[i], gamma));
    }
    std::vector<Estimate> out;
    for (const auto& r : returns) out.push_back(mean_and_standard_error(r));
    return out;
}

namespace {

ExperimentSpec sweep_point(const SweepSpec& spec, double value, Policy policy, int seed) {
    ExperimentSpec e = spec.base;
    if (spec.axis == SweepAxis::lambda) {
        e.config.arrival_rate = value;
    } else {
        e.config.channels = static_cast<int>(std::lround(value));
    }
    e.policies = {policy};
    e.seed = spec.base.seed + static_cast<std::uint64_t>(seed);
    return e;
}

}  // namespace

std::vector<SweepRow> sweep(const SweepSpec& spec) {
    if (spec.values.empty()) throw ConfigError("sweep axis is empty");
    if (spec.policies.empty()) throw ConfigError("sweep needs at least one policy");
    if (spec.seeds < 1) throw ConfigError("sweep needs at least one seed");

    const std::size_t points = spec.values.size();
    const std::size_t policies = spec.policies.size();
    const std::size_t seeds = static_cast<std::size_t>(spec.seeds);
    const std::size_t jobs = points * policies * seeds;
    std::vector<RunResult> results(jobs);
    std::vector<std::exception_ptr> errors(jobs);

    auto job = [&](std::size_t j) {
        const std::size_t s = j % seeds;
        const std::size_t q = (j / seeds) % policies;
        const std::size_t p = j / (seeds * policies);
        try {
            results[j] = run(sweep_point(spec, spec.values[p], spec.policies[q], static_cast<int>(s)));
        } catch (...) {
            errors[j] = std::current_exception();
        }
    };
    const auto n = static_cast<std::int64_t>(jobs);
    if (spec.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t j = 0; j < n; ++j) job(static_cast<std::size_t>(j));
    } else {
        for (std::int64_t j = 0; j < n; ++j) job(static_cast<std::size_t>(j));
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::vector<SweepRow> rows;
    for (std::size_t p = 0; p < points; ++p) {
        for (std::size_t q = 0; q < policies; ++q) {
            const ExperimentSpec point = sweep_point(spec, spec.values[p], spec.policies[q], 0);
            SweepRow row;
            row.policy = spec.policies[q];
            row.lambda = point.config.arrival_rate;
            row.channels = point.config.channels;
            const std::size_t base = (p * policies + q) * seeds;
            row.windows = results[base].windows;
            for (auto& w : row.windows) w = {w.end_slot, w.slots, 0.0, 0.0, 0.0, 0.0};
            for (std::size_t s = 0; s < seeds; ++s) {
                const auto& windows = results[base + s].windows;
                for (std::size_t k = 0; k < windows.size(); ++k) {
                    row.windows[k].avg_utility_per_mu += windows[k].avg_utility_per_mu / seeds;
                    row.windows[k].avg_payment += windows[k].avg_payment / seeds;
                    row.windows[k].avg_drops += windows[k].avg_drops / seeds;
                    row.windows[k].avg_queue += windows[k].avg_queue / seeds;
                }
                row.final_by_seed.push_back(windows.back().avg_utility_per_mu);
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_sweep_summary(std::ostream& out, const std::vector<SweepRow>& rows) {
    write_summary_header(out);
    for (const SweepRow& row : rows) {
        for (const WindowSummary& w : row.windows) write_summary_row(out, w, to_string(row.policy), row.lambda, row.channels);
    }
}

void write_sweep_table(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "policy,lambda,J,avg_utility_per_mu,std_error,seeds\n";
    for (const SweepRow& row : rows) {
        const Estimate e = mean_and_standard_error(row.final_by_seed);
        fmt::print(out, "{},{:.6f},{},{:.9f},{:.9f},{}\n", to_string(row.policy), row.lambda, row.channels, e.mean,
                   e.standard_error, row.final_by_seed.size());
    }
}

}  // namespace slicing
