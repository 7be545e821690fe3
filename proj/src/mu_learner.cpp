#include "slicing/mu_learner.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "slicing/serialize.hpp"

namespace slicing {

Action ActionSpace::decode(int index) const {
    Action a;
    a.schedule = index % (max_queue + 1);
    index /= max_queue + 1;
    a.offload = index % (max_tasks + 1);
    a.phi = index / (max_tasks + 1);
    return a;
}

ActionMask feasibility_mask(const MuLocalState& state, LinkGains gains, const ActionSpace& space,
                            const EnergyModel& energy) {
    ActionMask mask(static_cast<std::size_t>(space.size()), 0);
    mask[0] = 1;
    for (int rt = 0; rt <= std::min(state.tasks, space.max_tasks); ++rt) {
        for (int rp = 0; rp <= std::min(state.queue, space.max_queue); ++rp) {
            const Action a{1, rt, rp};
            // Energy grows with payload, so the rest of this row is infeasible too.
            if (!energy.transmit(a, gains)) break;
            mask[space.index(a)] = 1;
        }
    }
    return mask;
}

Features encode(const MuLocalState& state, const Grid& grid, int max_tasks, int max_queue) {
    auto scale = [](int v, int cells) { return cells > 1 ? 2.0 * v / (cells - 1) - 1.0 : 0.0; };
    auto unit = [](int v, int max) { return max > 0 ? static_cast<double>(v) / max : 0.0; };
    return {scale(grid.column(state.mu_loc), grid.width_cells), scale(grid.row(state.mu_loc), grid.height_cells),
            scale(grid.column(state.eve_loc), grid.width_cells), scale(grid.row(state.eve_loc), grid.height_cells),
            unit(state.tasks, max_tasks), unit(state.queue, max_queue)};
}

void apply_mask(std::span<double> q, const ActionMask& mask) {
    for (std::size_t k = 0; k < q.size(); ++k) {
        if (!mask[k]) q[k] = kMasked;
    }
}

ChannelPreference channel_preference(std::span<const double> masked_q, const ActionSpace& space) {
    const auto slice = static_cast<std::size_t>(space.slice_size());
    const auto without = masked_q.subspan(0, slice);
    const auto with = masked_q.subspan(slice, slice);
    const double best_without = *std::max_element(without.begin(), without.end());
    const double best_with = *std::max_element(with.begin(), with.end());
    return {best_with > best_without ? 1 : 0, std::max(best_with, best_without)};
}

Action select_action(std::span<const double> masked_q, const ActionSpace& space, int phi, double epsilon, Rng& rng) {
    if (!phi) return {};
    const int begin = space.slice_size();
    const int end = space.size();
    if (uniform01(rng) < epsilon) {
        std::vector<int> options;
        for (int k = begin; k < end; ++k) {
            if (masked_q[k] != kMasked) options.push_back(k);
        }
        // The payload-free action is always executable.
        if (options.empty()) return {1, 0, 0};
        return space.decode(options[uniform_below(rng, options.size())]);
    }
    int best = begin;
    for (int k = begin + 1; k < end; ++k) {
        if (masked_q[k] > masked_q[best]) best = k;
    }
    return space.decode(best);
}

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
    buffer_.reserve(capacity);
}

void ReplayMemory::push(Experience e) {
    if (buffer_.size() < capacity_) {
        buffer_.push_back(std::move(e));
    } else {
        buffer_[head_] = std::move(e);
    }
    head_ = (head_ + 1) % capacity_;
    count_ = std::min(count_ + 1, capacity_);
}

const Experience& ReplayMemory::at(std::size_t i) const {
    if (i >= count_) throw std::out_of_range("replay index");
    const std::size_t oldest = count_ < capacity_ ? 0 : head_;
    return buffer_[(oldest + i) % capacity_];
}

std::vector<const Experience*> ReplayMemory::sample(std::size_t batch, Rng& rng) const {
    std::vector<const Experience*> out;
    out.reserve(batch);
    if (count_ == 0) return out;
    if (batch > count_) {
        for (std::size_t k = 0; k < batch; ++k) out.push_back(&buffer_[uniform_below(rng, count_)]);
        return out;
    }
    seen_.assign(count_, 0);
    while (out.size() < batch) {
        const std::size_t j = uniform_below(rng, count_);
        if (seen_[j]) continue;
        seen_[j] = 1;
        out.push_back(&buffer_[j]);
    }
    return out;
}

namespace {

std::string mask_string(const ActionMask& mask) {
    std::string s(mask.size(), '0');
    for (std::size_t k = 0; k < mask.size(); ++k) s[k] = mask[k] ? '1' : '0';
    return s;
}

ActionMask parse_mask(const std::string& s) {
    ActionMask mask(s.size());
    for (std::size_t k = 0; k < s.size(); ++k) mask[k] = s[k] == '1';
    return mask;
}

}  // namespace

void ReplayMemory::save(std::ostream& out) const {
    write_line(out, "replay", capacity_, count_);
    for (std::size_t i = 0; i < count_; ++i) {
        const Experience& e = at(i);
        out << "exp";
        for (double v : e.state) out << ' ' << format_field(v);
        out << ' ' << e.action << ' ' << format_field(e.utility);
        for (double v : e.next) out << ' ' << format_field(v);
        out << ' ' << mask_string(e.state_mask) << ' ' << mask_string(e.next_mask) << '\n';
    }
}

void ReplayMemory::load(std::istream& in) {
    auto header = read_fields(in, "replay", 2);
    capacity_ = std::stoull(header[0]);
    const std::size_t count = std::stoull(header[1]);
    buffer_.clear();
    buffer_.reserve(capacity_);
    head_ = 0;
    count_ = 0;
    for (std::size_t i = 0; i < count; ++i) {
        auto fields = read_fields(in, "exp", 2 * kStateFeatures + 4);
        Experience e;
        std::size_t f = 0;
        for (double& v : e.state) v = parse_double(fields[f++]);
        e.action = std::stoi(fields[f++]);
        e.utility = parse_double(fields[f++]);
        for (double& v : e.next) v = parse_double(fields[f++]);
        e.state_mask = parse_mask(fields[f++]);
        e.next_mask = parse_mask(fields[f++]);
        push(std::move(e));
    }
}

double td_target(const Mlp& online, const Mlp& target, std::span<const double> next, const ActionMask& next_mask,
                 double utility, double gamma, TrainScratch& scratch) {
    scratch.outputs.resize(static_cast<std::size_t>(online.outputs()));
    online.forward_hidden(next, scratch.trace);
    online.outputs_from(scratch.trace, scratch.outputs);
    int best = -1;
    for (int k = 0; k < online.outputs(); ++k) {
        if (next_mask[k] && (best < 0 || scratch.outputs[k] > scratch.outputs[best])) best = k;
    }
    double bootstrap = 0.0;
    if (best >= 0) {
        target.forward_hidden(next, scratch.trace);
        bootstrap = target.output_at(scratch.trace, best);
    }
    return (1.0 - gamma) * utility + gamma * bootstrap;
}

double td_loss_gradient(const Mlp& net, std::span<const TdSample> samples, std::span<double> grad,
                        TrainScratch& scratch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    if (samples.empty()) return 0.0;
    const double inv = 1.0 / static_cast<double>(samples.size());
    double loss = 0.0;
    for (const TdSample& s : samples) {
        net.forward_hidden(s.input, scratch.trace);
        const double err = net.output_at(scratch.trace, s.action) - s.target;
        loss += err * err;
        net.accumulate_gradient(scratch.trace, s.action, 2.0 * err * inv, grad);
    }
    return loss * inv;
}

QNet::QNet(const ActionSpace& space, int hidden_width, AdamParams adam, Rng& init)
    : online_({kStateFeatures, hidden_width, hidden_width, space.size()}) {
    online_.initialize(init);
    target_ = online_;
    adam_ = Adam(online_.parameter_count(), adam);
}

QNet::QNet(Mlp online, AdamParams adam) : online_(std::move(online)), target_(online_) {
    adam_ = Adam(online_.parameter_count(), adam);
}

std::vector<double> QNet::q_values(std::span<const double> features, const ActionMask& mask) const {
    std::vector<double> q(static_cast<std::size_t>(online_.outputs()));
    online_.forward(features, q);
    apply_mask(q, mask);
    return q;
}

double QNet::train_step(std::span<const Experience* const> batch, double gamma) {
    if (batch.empty()) throw std::invalid_argument("train_step needs a non-empty batch");
    std::vector<TdSample> samples;
    samples.reserve(batch.size());
    targets_.resize(batch.size());
    for (std::size_t k = 0; k < batch.size(); ++k) {
        const Experience& e = *batch[k];
        if (e.action < 0 || e.action >= action_count() || !e.state_mask.at(e.action)) {
            throw std::invalid_argument(fmt::format("experience records masked action {}", e.action));
        }
        targets_[k] = td_target(online_, target_, e.next, e.next_mask, e.utility, gamma, scratch_);
    }
    for (std::size_t k = 0; k < batch.size(); ++k) {
        samples.push_back({batch[k]->state, batch[k]->action, targets_[k]});
    }
    scratch_.grad.resize(online_.parameter_count());
    const double loss = td_loss_gradient(online_, samples, scratch_.grad, scratch_);
    adam_.step(online_.parameters(), scratch_.grad);
    return loss;
}

void QNet::save(std::ostream& out) const {
    save_mlp(out, online_);
    save_mlp(out, target_);
    adam_.save(out);
}

QNet QNet::load(std::istream& in) {
    QNet net;
    net.online_ = load_mlp(in);
    net.target_ = load_mlp(in);
    net.adam_.load(in);
    if (net.online_.widths() != net.target_.widths()) throw std::runtime_error("checkpoint: target shape differs");
    return net;
}

TabularQ::TabularQ(int states, int actions)
    : states_(states),
      actions_(actions),
      table_(static_cast<std::size_t>(states) * actions, 0.0),
      visits_(table_.size(), 0) {}

std::span<const double> TabularQ::row(int state) const {
    return std::span<const double>(table_).subspan(index(state, 0), static_cast<std::size_t>(actions_));
}

double TabularQ::update(int state, int action, double utility, int next_state, const ActionMask& next_mask,
                        double gamma) {
    double best = kMasked;
    for (int a = 0; a < actions_; ++a) {
        if (next_mask[a]) best = std::max(best, q(next_state, a));
    }
    if (best == kMasked) best = 0.0;
    const std::size_t k = index(state, action);
    const double target = (1.0 - gamma) * utility + gamma * best;
    const double err = target - table_[k];
    const double step = 1.0 / static_cast<double>(++visits_[k]);
    table_[k] += step * err;
    return err;
}

MuAgent::MuAgent(std::shared_ptr<QNet> net, std::size_t replay_capacity, Rng explore, Rng sample)
    : net_(std::move(net)), replay_(replay_capacity), explore_(explore), sample_(sample) {}

void MuAgent::remember(Experience e) {
    if (!e.state_mask.at(e.action)) throw std::invalid_argument("refusing to store a masked action");
    replay_.push(std::move(e));
}

std::optional<double> MuAgent::train(std::size_t batch, double gamma) {
    if (replay_.size() < batch) return std::nullopt;
    const auto picked = replay_.sample(batch, sample_);
    return net_->train_step(picked, gamma);
}

void MuAgent::save(std::ostream& out, bool with_net) const {
    write_rng(out, "rng.explore", explore_);
    write_rng(out, "rng.sample", sample_);
    replay_.save(out);
    if (with_net) net_->save(out);
}

void MuAgent::load(std::istream& in, bool with_net) {
    explore_ = read_rng(in, "rng.explore");
    sample_ = read_rng(in, "rng.sample");
    replay_.load(in);
    if (with_net) *net_ = QNet::load(in);
}

}  // namespace slicing
