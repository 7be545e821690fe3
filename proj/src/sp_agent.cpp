#include "slicing/sp_agent.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "slicing/serialize.hpp"

namespace slicing {

double AbstractStateSpec::boundary(int s) const {
    if (s <= 0 || states <= 1) return 0.0;
    return max_payment * static_cast<double>(s) / static_cast<double>(states - 1);
}

int abstract_state(double previous_payment, const AbstractStateSpec& spec) {
    if (previous_payment <= 0.0 || spec.states <= 1) return 0;
    const int top = spec.states - 1;
    if (spec.max_payment <= 0.0 || previous_payment >= spec.max_payment) return top;
    const double width = spec.max_payment / static_cast<double>(top);
    const int s = static_cast<int>(std::ceil(previous_payment / width));
    return std::clamp(s, 1, top);
}

TransitionTable::TransitionTable(int states)
    : states_(states), counts_(static_cast<std::size_t>(states) * states * 2, 0) {
    if (states < 1) throw std::invalid_argument("at least one abstract state is required");
}

void TransitionTable::record(int from, int to, int phi) {
    if (from < 0 || from >= states_ || to < 0 || to >= states_ || phi < 0 || phi > 1) {
        throw std::out_of_range("transition index");
    }
    ++counts_[index(from, to, phi)];
}

std::int64_t TransitionTable::total() const {
    std::int64_t sum = 0;
    for (auto c : counts_) sum += c;
    return sum;
}

std::vector<double> TransitionTable::estimate(int from, int phi) const {
    std::vector<double> p(static_cast<std::size_t>(states_));
    std::int64_t row = 0;
    for (int to = 0; to < states_; ++to) row += count(from, to, phi);
    if (row == 0) {
        std::fill(p.begin(), p.end(), 1.0 / states_);
        return p;
    }
    for (int to = 0; to < states_; ++to) p[to] = static_cast<double>(count(from, to, phi)) / static_cast<double>(row);
    return p;
}

void TransitionTable::save(std::ostream& out) const {
    write_line(out, "transitions", states_);
    write_vector(out, "transitions.counts", counts_);
}

void TransitionTable::load(std::istream& in) {
    states_ = std::stoi(read_fields(in, "transitions", 1)[0]);
    counts_ = read_vector<std::int64_t>(in, "transitions.counts");
    if (counts_.size() != static_cast<std::size_t>(states_) * states_ * 2) {
        throw std::runtime_error("checkpoint: transition table size mismatch");
    }
}

double PaymentValue::expected_next(std::span<const double> transition) const {
    double sum = 0.0;
    for (std::size_t s = 0; s < values_.size(); ++s) sum += transition[s] * values_[s];
    return sum;
}

void PaymentValue::update(int s, int phi, double payment, const TransitionTable& table, double gamma, double zeta) {
    const auto p = table.estimate(s, phi);
    const double target = (1.0 - gamma) * payment + gamma * expected_next(p);
    values_[s] = (1.0 - zeta) * values_[s] + zeta * target;
}

void PaymentValue::save(std::ostream& out) const { write_vector(out, "payment_value", values_); }

void PaymentValue::load(std::istream& in) { values_ = read_vector(in, "payment_value"); }

BidResult build_bid(std::span<const MuReport> reports, int state, const TransitionTable& table,
                    const PaymentValue& payment_value, double gamma, int bs_count) {
    BidResult out;
    out.bid.demand.assign(static_cast<std::size_t>(bs_count), 0);
    double mu_value = 0.0;
    for (const MuReport& r : reports) {
        mu_value += r.price * r.value;
        if (r.wants_channel) ++out.bid.demand.at(static_cast<std::size_t>(r.bs));
    }
    const int wants = out.bid.total_demand() > 0 ? 1 : 0;
    const double future_payment = payment_value.expected_next(table.estimate(state, wants));
    out.raw_valuation = (mu_value - gamma * future_payment) / (1.0 - gamma);
    out.bid.valuation = clamp_valuation(out.raw_valuation);
    out.clamped = out.raw_valuation < 0.0;
    return out;
}

double abstract_state_value(std::span<const double> mu_values, std::span<const double> prices,
                            const PaymentValue& payment_value, int state) {
    double sum = 0.0;
    for (std::size_t n = 0; n < mu_values.size(); ++n) sum += prices[n] * mu_values[n];
    return sum - payment_value[state];
}

SpLearner::SpLearner(Options options)
    : options_(options),
      spec_{options.states, options.max_payment},
      table_(options.states),
      value_(options.states),
      frozen_(options.max_payment > 0.0) {}

BidResult SpLearner::bid(std::span<const MuReport> reports, int bs_count) const {
    return build_bid(reports, state_, table_, value_, options_.gamma, bs_count);
}

void SpLearner::observe(int phi, double payment) {
    if (!frozen_) {
        spec_.max_payment = std::max(spec_.max_payment, payment);
        if (updates_ + 1 >= options_.warmup_slots) frozen_ = true;
    }
    if (payment > spec_.max_payment) ++clamped_payments_;
    const int next = abstract_state(payment, spec_);
    table_.record(state_, next, phi);
    value_.update(state_, phi, payment, table_, options_.gamma, options_.schedule(updates_));
    ++updates_;
    state_ = next;
}

void SpLearner::save(std::ostream& out) const {
    write_line(out, "sp", state_, updates_, clamped_payments_, frozen_ ? 1 : 0, spec_.max_payment);
    table_.save(out);
    value_.save(out);
}

void SpLearner::load(std::istream& in) {
    auto f = read_fields(in, "sp", 5);
    state_ = std::stoi(f[0]);
    updates_ = std::stoll(f[1]);
    clamped_payments_ = std::stoll(f[2]);
    frozen_ = f[3] == "1";
    spec_.max_payment = parse_double(f[4]);
    table_.load(in);
    value_.load(in);
}

}  // namespace slicing
