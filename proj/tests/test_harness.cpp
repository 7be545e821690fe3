#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "slicing/harness.hpp"

using namespace slicing;

namespace {

// Small DRL setup that starts training within a few dozen slots.
ExperimentSpec quick_drl(std::int64_t horizon, std::uint64_t seed = 7) {
    ExperimentSpec spec;
    spec.config.batch_size = 16;
    spec.config.replay_size = 200;
    spec.config.epsilon_anneal_slots = 100;
    spec.config.payment_warmup_slots = 50;
    spec.config.target_sync_period = 10;
    spec.horizon = horizon;
    spec.window = 50;
    spec.seed = seed;
    return spec;
}

std::string csv_of(const ExperimentSpec& spec) {
    std::ostringstream slots;
    write_slots_header(slots);
    const RunResult r = run(spec, [&](const SlotRecord& rec) { write_slot_rows(slots, rec); });
    std::ostringstream summary;
    write_summary_header(summary);
    for (const auto& w : r.windows) write_summary_row(summary, w, "drl", spec.config.arrival_rate, spec.config.channels);
    return slots.str() + summary.str();
}

}  // namespace

TEST_CASE("one random slot passes every invariant") {
    ExperimentSpec spec;
    spec.policies = {Policy::random};
    spec.horizon = 1;
    std::vector<SlotRecord> records;
    const RunResult r = run(spec, [&](const SlotRecord& rec) { records.push_back(rec); });
    REQUIRE(records.size() == 1);
    CHECK(records[0].slot == 1);
    CHECK(records[0].mus.size() == 6);
    CHECK(records[0].sps.size() == 3);
    REQUIRE(r.windows.size() == 1);
    CHECK(r.windows[0].slots == 1);
}

TEST_CASE("experiment files carry the harness section") {
    std::istringstream in("[env]\nchannels = 8\n[harness]\npolicy = drl, random, queue_aware\nhorizon = 50\nwindow = 10\nseed = 4\n");
    const ExperimentSpec spec = load_experiment(in);
    CHECK(spec.config.channels == 8);
    CHECK(spec.policy_of(0) == Policy::drl);
    CHECK(spec.policy_of(1) == Policy::random);
    CHECK(spec.policy_of(2) == Policy::queue_aware);
    CHECK(spec.horizon == 50);
    CHECK(spec.window == 10);
    CHECK(spec.seed == 4);

    std::istringstream bad("[harness]\npolicies = drl\n");
    CHECK_THROWS_AS(load_experiment(bad), ConfigError);
    std::istringstream two("[harness]\npolicy = drl, random\n");
    CHECK_THROWS_AS(load_experiment(two), ConfigError);
}

TEST_CASE("identical spec and seed give byte-identical CSV") {
    const ExperimentSpec spec = quick_drl(150);
    const std::string a = csv_of(spec);
    const std::string b = csv_of(spec);
    CHECK(a == b);
    CHECK(a != csv_of(quick_drl(150, 8)));
}

TEST_CASE("window summaries equal a recomputation from slot records") {
    ExperimentSpec spec = quick_drl(130);
    spec.policies = {Policy::drl, Policy::queue_aware, Policy::channel_aware};
    std::vector<SlotRecord> records;
    const RunResult r = run(spec, [&](const SlotRecord& rec) { records.push_back(rec); });
    REQUIRE(r.windows.size() == 3);
    CHECK(r.windows[2].slots == 30);
    std::size_t begin = 0;
    for (const WindowSummary& w : r.windows) {
        double utility = 0, payment = 0, drops = 0, queue = 0;
        for (std::size_t k = begin; k < begin + static_cast<std::size_t>(w.slots); ++k) {
            double u = 0, d = 0, q = 0, p = 0;
            for (const MuSlot& m : records[k].mus) {
                u += m.outcome.utility;
                d += m.outcome.drops;
                q += m.outcome.next_queue;
            }
            for (const SpSlot& s : records[k].sps) p += s.payment;
            utility += u / 6;
            drops += d / 6;
            queue += q / 6;
            payment += p / 3;
        }
        CHECK(w.end_slot == records[begin + w.slots - 1].slot);
        CHECK(w.avg_utility_per_mu == doctest::Approx(utility / w.slots).epsilon(1e-12));
        CHECK(w.avg_drops == doctest::Approx(drops / w.slots).epsilon(1e-12));
        CHECK(w.avg_queue == doctest::Approx(queue / w.slots).epsilon(1e-12));
        CHECK(w.avg_payment == doctest::Approx(payment / w.slots).epsilon(1e-12));
        begin += static_cast<std::size_t>(w.slots);
    }
}

TEST_CASE("records are consistent with the auction and the queue model") {
    ExperimentSpec spec = quick_drl(200);
    spec.config.channels = 2;  // forces contention
    spec.config.mus_per_sp = 3;
    spec.policies = {Policy::drl, Policy::random, Policy::queue_aware};
    Simulation sim(spec);
    std::vector<int> queue_before;
    for (const auto& s : sim.states()) queue_before.push_back(s.queue);
    int paid = 0;
    for (int k = 0; k < 200; ++k) {
        const SlotRecord r = sim.step();
        for (std::size_t i = 0; i < r.sps.size(); ++i) {
            const SpSlot& sp = r.sps[i];
            CHECK(sp.payment >= 0.0);
            if (!sp.win) CHECK(sp.payment == 0.0);
            if (sp.win) CHECK(sp.payment <= sp.valuation + 1e-9);
            paid += sp.payment > 0;
            int served = 0;
            double utility = 0.0;
            for (const MuSlot& m : r.mus) {
                if (m.sp != static_cast<int>(i)) continue;
                served += m.action.phi;
                utility += m.outcome.utility;
            }
            CHECK(served == (sp.win ? sp.demand : 0));
            CHECK(sp.payoff == doctest::Approx(utility - sp.payment));
        }
        for (std::size_t n = 0; n < r.mus.size(); ++n) {
            const MuSlot& m = r.mus[n];
            CHECK(m.state.queue == queue_before[n]);
            const int raw = m.state.queue - m.action.payload_packets() + m.packets;
            CHECK(m.outcome.next_queue == std::min(raw, spec.config.max_queue));
            CHECK(m.outcome.drops == std::max(raw - spec.config.max_queue, 0));
            queue_before[n] = m.outcome.next_queue;
        }
    }
    CHECK(paid > 0);
    for (std::size_t n = 0; n < sim.ledger().size(); ++n) {
        const auto& l = sim.ledger()[n];
        CHECK(l.drops == l.arrivals - l.served - (sim.states()[n].queue - l.initial_queue));
    }
}

TEST_CASE("policies share environment randomness under one seed") {
    ExperimentSpec a = quick_drl(40);
    ExperimentSpec b = a;
    a.policies = {Policy::random};
    b.policies = {Policy::queue_aware};
    std::vector<std::vector<int>> pa, pb;
    run(a, [&](const SlotRecord& r) {
        std::vector<int> p;
        for (const auto& m : r.mus) p.push_back(m.packets);
        pa.push_back(p);
    });
    run(b, [&](const SlotRecord& r) {
        std::vector<int> p;
        for (const auto& m : r.mus) p.push_back(m.packets);
        pb.push_back(p);
    });
    CHECK(pa == pb);
}

TEST_CASE("checkpoint and resume continue the run identically") {
    const ExperimentSpec spec = quick_drl(240);
    std::ostringstream straight;
    {
        Simulation sim(spec);
        WindowAccumulator w(spec.window);
        run(sim, 240, w, [&](const SlotRecord& r) { write_slot_rows(straight, r); });
    }
    std::ostringstream resumed;
    std::stringstream checkpoint;
    {
        Simulation sim(spec);
        WindowAccumulator w(spec.window);
        run(sim, 120, w, [&](const SlotRecord& r) { write_slot_rows(resumed, r); });
        sim.save(checkpoint);
        w.save(checkpoint);
    }
    {
        Simulation sim(spec);
        WindowAccumulator w(spec.window);
        sim.load(checkpoint);
        w.load(checkpoint);
        CHECK(sim.slot() == 120);
        run(sim, 120, w, [&](const SlotRecord& r) { write_slot_rows(resumed, r); });
    }
    CHECK(straight.str() == resumed.str());
}

TEST_CASE("shared weights also checkpoint and resume identically") {
    ExperimentSpec spec = quick_drl(80);
    spec.config.share_weights = true;
    std::ostringstream straight, resumed;
    {
        Simulation sim(spec);
        WindowAccumulator w(spec.window);
        run(sim, 80, w, [&](const SlotRecord& r) { write_slot_rows(straight, r); });
    }
    std::stringstream checkpoint;
    {
        Simulation sim(spec);
        WindowAccumulator w(spec.window);
        run(sim, 40, w, [&](const SlotRecord& r) { write_slot_rows(resumed, r); });
        sim.save(checkpoint);
    }
    Simulation sim(spec);
    WindowAccumulator w(spec.window);
    sim.load(checkpoint);
    run(sim, 40, w, [&](const SlotRecord& r) { write_slot_rows(resumed, r); });
    CHECK(straight.str() == resumed.str());
}

TEST_CASE("discounted return") {
    const std::vector<double> f{4.0, 1.0, 2.0};
    CHECK(discounted_return(f, 0.0) == 4.0);
    CHECK(discounted_return(f, 0.5) == doctest::Approx(0.5 * (4.0 + 0.5 + 0.5)));
    const std::vector<double> constant(2000, 3.0);
    CHECK(discounted_return(constant, 0.9) == doctest::Approx(3.0).epsilon(1e-12));
    const Estimate e = mean_and_standard_error(std::vector<double>{1.0, 2.0, 3.0, 4.0});
    CHECK(e.mean == 2.5);
    CHECK(e.standard_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("evaluation with gamma = 0 is the mean first-slot payoff") {
    ExperimentSpec spec;
    spec.config.discount = 0.0;
    spec.policies = {Policy::queue_aware, Policy::random, Policy::channel_aware};
    Simulation trained(spec);
    for (int k = 0; k < 20; ++k) trained.step();
    const int episodes = 6;
    const auto est = evaluate_policy(trained, episodes, 5, 1234);
    for (int i = 0; i < 3; ++i) {
        double sum = 0.0;
        for (int e = 0; e < episodes; ++e) {
            Simulation sim = trained;
            sim.set_learning(false);
            sim.reset_environment(splitmix64(1234 + static_cast<std::uint64_t>(e)));
            sum += sim.step().sps[i].payoff;
        }
        CHECK(est[i].mean == doctest::Approx(sum / episodes).epsilon(1e-12));
    }
}

TEST_CASE("evaluation of a constant-payoff SP returns that payoff") {
    // No MUs: the payoff is -tau = 0 in every slot.
    ExperimentSpec spec;
    spec.config.mus_per_sp = 0;
    spec.policies = {Policy::random};
    Simulation sim(spec);
    const auto est = evaluate_policy(sim, 3, 50, 9);
    for (const Estimate& e : est) {
        CHECK(e.mean == 0.0);
        CHECK(e.standard_error == 0.0);
    }
}

TEST_CASE("standard error shrinks roughly as one over root episodes") {
    ExperimentSpec spec;
    spec.policies = {Policy::random};
    Simulation sim(spec);
    const auto small = evaluate_policy(sim, 40, 30, 5);
    const auto large = evaluate_policy(sim, 160, 30, 5);
    for (int i = 0; i < 3; ++i) {
        const double ratio = large[i].standard_error / small[i].standard_error;
        CHECK(ratio > 0.3);
        CHECK(ratio < 0.75);
    }
}

TEST_CASE("evaluation leaves the trained simulation untouched") {
    Simulation sim(quick_drl(60));
    for (int k = 0; k < 60; ++k) sim.step();
    std::ostringstream before, after;
    sim.save(before);
    evaluate_policy(sim, 2, 10, 3);
    sim.save(after);
    CHECK(before.str() == after.str());
}

TEST_CASE("serial and parallel sweeps agree exactly") {
    SweepSpec s;
    s.base = quick_drl(120);
    s.axis = SweepAxis::lambda;
    s.values = {6, 10};
    s.policies = {Policy::drl, Policy::random};
    s.seeds = 2;
    s.exec = Exec::serial;
    const auto serial = sweep(s);
    s.exec = Exec::parallel;
    const auto parallel = sweep(s);
    REQUIRE(serial.size() == 4);
    REQUIRE(parallel.size() == 4);
    std::ostringstream a, b;
    write_sweep_summary(a, serial);
    write_sweep_summary(b, parallel);
    CHECK(a.str() == b.str());
    for (std::size_t k = 0; k < serial.size(); ++k) CHECK(serial[k].final_by_seed == parallel[k].final_by_seed);

    std::ostringstream table;
    write_sweep_table(table, serial);
    std::istringstream lines(table.str());
    std::string line;
    int count = 0;
    while (std::getline(lines, line)) ++count;
    CHECK(count == 5);
}

TEST_CASE("a single-point channel sweep gives one row per policy") {
    SweepSpec s;
    s.base = quick_drl(20);
    s.axis = SweepAxis::channels;
    s.values = {8};
    s.policies = {Policy::drl, Policy::channel_aware, Policy::queue_aware, Policy::random};
    const auto rows = sweep(s);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
        CHECK(r.channels == 8);
        CHECK(r.lambda == 8.0);
        CHECK(r.final_by_seed.size() == 1);
    }
}
