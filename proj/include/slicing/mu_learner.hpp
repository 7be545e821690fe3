#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "slicing/config.hpp"
#include "slicing/env.hpp"
#include "slicing/qnet.hpp"
#include "slicing/rng.hpp"

namespace slicing {

// Joint action (phi, R_t, R_p), flattened phi-major.
struct ActionSpace {
    int max_tasks = 0;
    int max_queue = 0;

    int slice_size() const { return (max_tasks + 1) * (max_queue + 1); }
    int size() const { return 2 * slice_size(); }
    int index(const Action& a) const { return (a.phi * (max_tasks + 1) + a.offload) * (max_queue + 1) + a.schedule; }
    Action decode(int index) const;
};

// 1 = executable. Besides R_t <= A_t, R_p <= W and a feasible secrecy
// energy, only the canonical no-op (0,0,0) represents phi = 0.
using ActionMask = std::vector<std::uint8_t>;

ActionMask feasibility_mask(const MuLocalState& state, LinkGains gains, const ActionSpace& space,
                            const EnergyModel& energy);

inline constexpr int kStateFeatures = 6;
using Features = std::array<double, kStateFeatures>;

// MU and eavesdropper cell coordinates in [-1, 1], then A_t / A_max and W / W_max.
Features encode(const MuLocalState& state, const Grid& grid, int max_tasks, int max_queue);

inline constexpr double kMasked = -std::numeric_limits<double>::infinity();

// Masked entries become -inf.
void apply_mask(std::span<double> q, const ActionMask& mask);

struct ChannelPreference {
    int z = 0;           // wants a channel
    double value = 0.0;  // max over unmasked actions
};

// z = 1 iff the best phi=1 action strictly beats the best phi=0 action.
ChannelPreference channel_preference(std::span<const double> masked_q, const ActionSpace& space);

// Greedy over the realised phi slice (lowest index wins ties), uniform over
// that slice's unmasked actions with probability epsilon; phi = 0 is the no-op.
Action select_action(std::span<const double> masked_q, const ActionSpace& space, int phi, double epsilon, Rng& rng);

struct Experience {
    Features state{};
    int action = 0;
    double utility = 0.0;
    Features next{};
    ActionMask state_mask;
    ActionMask next_mask;
};

class ReplayMemory {
public:
    explicit ReplayMemory(std::size_t capacity);

    void push(Experience e);
    std::size_t size() const { return count_; }
    std::size_t capacity() const { return capacity_; }
    // i = 0 is the oldest retained experience.
    const Experience& at(std::size_t i) const;
    // Uniform without replacement (with replacement if batch > size).
    std::vector<const Experience*> sample(std::size_t batch, Rng& rng) const;

    void save(std::ostream& out) const;
    void load(std::istream& in);

private:
    std::size_t capacity_;
    std::vector<Experience> buffer_;
    std::size_t head_ = 0;  // next write position
    std::size_t count_ = 0;
    mutable std::vector<std::uint8_t> seen_;
};

// One TD regression sample: pull Q(input, action) toward a fixed target.
struct TdSample {
    std::span<const double> input;
    int action = 0;
    double target = 0.0;
};

// Reusable buffers for the training kernels.
struct TrainScratch {
    Mlp::Trace trace;
    std::vector<double> outputs;
    std::vector<double> grad;
};

// Double-DQN target (1-gamma) u + gamma Q(next, argmax_a Q(next, a; online); target).
double td_target(const Mlp& online, const Mlp& target, std::span<const double> next, const ActionMask& next_mask,
                 double utility, double gamma, TrainScratch& scratch);

// Mean squared TD error over samples; grad is overwritten with its gradient
// (targets held fixed).
double td_loss_gradient(const Mlp& net, std::span<const TdSample> samples, std::span<double> grad,
                        TrainScratch& scratch);

// Online network, target network and optimiser state for one MU.
class QNet {
public:
    QNet(const ActionSpace& space, int hidden_width, AdamParams adam, Rng& init);
    QNet(Mlp online, AdamParams adam);

    const Mlp& online() const { return online_; }
    const Mlp& target() const { return target_; }
    Mlp& online() { return online_; }
    const Adam& optimizer() const { return adam_; }
    int action_count() const { return online_.outputs(); }

    // Forward pass with the mask applied.
    std::vector<double> q_values(std::span<const double> features, const ActionMask& mask) const;

    // One optimiser step on the batch; returns the pre-step loss. Throws
    // std::invalid_argument on an empty batch or a recorded action that was masked.
    double train_step(std::span<const Experience* const> batch, double gamma);

    void sync_target() { target_ = online_; }

    void save(std::ostream& out) const;
    static QNet load(std::istream& in);

private:
    QNet() = default;

    Mlp online_;
    Mlp target_;
    Adam adam_;
    TrainScratch scratch_;
    std::vector<double> targets_;
};

// Lookup-table Q with step size 1/visits; with the target equal to the
// online table this is classical Q-learning.
class TabularQ {
public:
    TabularQ(int states, int actions);

    std::span<const double> row(int state) const;
    double q(int state, int action) const { return table_[index(state, action)]; }
    std::int64_t visits(int state, int action) const { return visits_[index(state, action)]; }

    // Returns the TD error before the update.
    double update(int state, int action, double utility, int next_state, const ActionMask& next_mask, double gamma);

private:
    std::size_t index(int s, int a) const { return static_cast<std::size_t>(s) * actions_ + a; }

    int states_;
    int actions_;
    std::vector<double> table_;
    std::vector<std::int64_t> visits_;
};

// Per-MU learner: a (possibly shared) QNet, replay memory and its own streams.
class MuAgent {
public:
    MuAgent(std::shared_ptr<QNet> net, std::size_t replay_capacity, Rng explore, Rng sample);

    QNet& net() { return *net_; }
    const QNet& net() const { return *net_; }
    const std::shared_ptr<QNet>& shared_net() const { return net_; }
    const ReplayMemory& replay() const { return replay_; }
    Rng& explore_rng() { return explore_; }

    std::vector<double> q_values(const Features& f, const ActionMask& mask) const { return net_->q_values(f, mask); }

    void remember(Experience e);
    // Trains once the replay memory holds a full batch; returns the loss if it trained.
    std::optional<double> train(std::size_t batch, double gamma);

    void save(std::ostream& out, bool with_net) const;
    void load(std::istream& in, bool with_net);

private:
    std::shared_ptr<QNet> net_;
    ReplayMemory replay_;
    Rng explore_;
    Rng sample_;
};

}  // namespace slicing
