#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "slicing/auction.hpp"

namespace slicing {

// Payment intervals. State 0 holds tau = 0 (a loss or a free win); the
// remaining states split (0, max_payment] into equal half-open intervals
// (lo, hi].
struct AbstractStateSpec {
    int states = 1;
    double max_payment = 0.0;

    // Upper boundary of state s (boundary(0) = 0, boundary(states-1) = max_payment).
    double boundary(int s) const;
};

// Payments above max_payment clamp to the top state.
int abstract_state(double previous_payment, const AbstractStateSpec& spec);

// y[s, s', phi]: transitions s -> s' observed when the SP's auction flag was phi.
class TransitionTable {
public:
    explicit TransitionTable(int states);

    int states() const { return states_; }
    void record(int from, int to, int phi);
    std::int64_t count(int from, int to, int phi) const { return counts_[index(from, to, phi)]; }
    std::int64_t total() const;

    // Row-normalised over destinations; uniform for an unseen row.
    std::vector<double> estimate(int from, int phi) const;

    void save(std::ostream& out) const;
    void load(std::istream& in);

private:
    std::size_t index(int from, int to, int phi) const {
        return (static_cast<std::size_t>(from) * states_ + to) * 2 + phi;
    }

    int states_;
    std::vector<std::int64_t> counts_;
};

// Robbins-Monro step size zeta0 / (1 + k / kappa).
struct StepSchedule {
    double zeta0 = 0.5;
    double kappa = 1000.0;

    double operator()(std::int64_t k) const { return zeta0 / (1.0 + static_cast<double>(k) / kappa); }
};

// Payment value over abstract states.
class PaymentValue {
public:
    explicit PaymentValue(int states) : values_(static_cast<std::size_t>(states), 0.0) {}

    std::span<const double> values() const { return values_; }
    double operator[](int s) const { return values_[s]; }
    double expected_next(std::span<const double> transition) const;

    // U(s) <- (1 - zeta) U(s) + zeta [(1 - gamma) tau + gamma sum_s' P(s'|s, phi) U(s')]
    void update(int s, int phi, double payment, const TransitionTable& table, double gamma, double zeta);

    void save(std::ostream& out) const;
    void load(std::istream& in);

private:
    std::vector<double> values_;
};

// What each subscribed MU reports to its SP before the auction.
struct MuReport {
    double value = 0.0;  // U_n
    int wants_channel = 0;  // z_n
    BsId bs = 0;
    double price = 1.0;  // alpha_n
};

struct BidResult {
    Bid bid;
    double raw_valuation = 0.0;
    bool clamped = false;
};

// C_b = sum of z_n in area b; nu = [sum alpha U_n - gamma sum_s' P(s'|s, 1{C>0}) U_i(s')] / (1 - gamma), clamped at 0.
BidResult build_bid(std::span<const MuReport> reports, int state, const TransitionTable& table,
                    const PaymentValue& payment_value, double gamma, int bs_count);

// sum_n alpha_n U_n - U_i(s)
double abstract_state_value(std::span<const double> mu_values, std::span<const double> prices,
                            const PaymentValue& payment_value, int state);

// One SP's abstraction layer across slots.
class SpLearner {
public:
    struct Options {
        int states = 5;
        double max_payment = 0.0;  // 0: learn the running maximum
        int warmup_slots = 2000;
        StepSchedule schedule;
        double gamma = 0.9;
    };

    explicit SpLearner(Options options);

    int state() const { return state_; }
    const AbstractStateSpec& spec() const { return spec_; }
    const TransitionTable& table() const { return table_; }
    const PaymentValue& payment_value() const { return value_; }
    std::int64_t updates() const { return updates_; }
    std::int64_t clamped_payments() const { return clamped_payments_; }

    BidResult bid(std::span<const MuReport> reports, int bs_count) const;

    // Auction result of this slot: records the transition, updates the
    // payment value and moves to the state implied by this payment.
    void observe(int phi, double payment);
    // Moves to the next abstract state without learning.
    void advance(double payment) { state_ = abstract_state(payment, spec_); }

    void save(std::ostream& out) const;
    void load(std::istream& in);

private:
    Options options_;
    AbstractStateSpec spec_;
    TransitionTable table_;
    PaymentValue value_;
    int state_ = 0;
    std::int64_t updates_ = 0;
    std::int64_t clamped_payments_ = 0;
    bool frozen_ = false;
};

}  // namespace slicing
