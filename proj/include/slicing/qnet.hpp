#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "slicing/rng.hpp"

namespace slicing {

// tanh evaluated with a fixed polynomial rather than the C library, so
// trajectories do not depend on the libm build. Within a few ulp of std::tanh.
double activation(double x);

// Fully connected network: tanh on hidden layers, identity on the output.
// Parameters are stored flat, layer by layer, as W then b. W is input-major:
// the weight from input c to unit r of a layer with `out` units sits at c * out + r.
class Mlp {
public:
    Mlp() = default;
    explicit Mlp(std::vector<int> widths);

    // Uniform in +-1/sqrt(fan_in).
    void initialize(Rng& rng);

    const std::vector<int>& widths() const { return widths_; }
    int inputs() const { return widths_.front(); }
    int outputs() const { return widths_.back(); }
    std::size_t parameter_count() const { return params_.size(); }
    std::span<double> parameters() { return params_; }
    std::span<const double> parameters() const { return params_; }

    // Full output vector.
    void forward(std::span<const double> input, std::span<double> output) const;

    // Hidden activations of every layer (activations[0] is the input copy).
    // Reuses the caller's buffers.
    struct Trace {
        std::vector<std::vector<double>> activations;
    };
    void forward_hidden(std::span<const double> input, Trace& trace) const;
    // Single output unit from a completed hidden trace.
    double output_at(const Trace& trace, int unit) const;
    // All outputs from a completed hidden trace.
    void outputs_from(const Trace& trace, std::span<double> output) const;

    // grad += scale * d(output[unit]) / d(params), given the hidden trace.
    void accumulate_gradient(const Trace& trace, int unit, double scale, std::span<double> grad) const;

    // Index of the weight from input c to unit r of `layer` within parameters().
    std::size_t weight_index(std::size_t layer, int c, int r) const {
        return offsets_[layer] + static_cast<std::size_t>(c) * widths_[layer + 1] + r;
    }
    std::size_t bias_index(std::size_t layer, int r) const { return bias_offset(layer) + r; }

    bool operator==(const Mlp&) const = default;

private:
    std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
    std::size_t bias_offset(std::size_t layer) const {
        return offsets_[layer] + static_cast<std::size_t>(widths_[layer + 1]) * widths_[layer];
    }

    std::vector<int> widths_;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
};

struct AdamParams {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    bool operator==(const AdamParams&) const = default;
};

class Adam {
public:
    Adam() = default;
    Adam(std::size_t size, AdamParams params);

    void step(std::span<double> params, std::span<const double> grad);

    const AdamParams& params() const { return params_; }
    std::int64_t steps() const { return steps_; }

    void save(std::ostream& out) const;
    void load(std::istream& in);

    bool operator==(const Adam&) const = default;

private:
    AdamParams params_;
    std::vector<double> m_;
    std::vector<double> v_;
    std::int64_t steps_ = 0;
};

void save_mlp(std::ostream& out, const Mlp& net);
Mlp load_mlp(std::istream& in);

}  // namespace slicing
