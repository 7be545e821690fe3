#include "slicing/qnet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "slicing/serialize.hpp"

namespace slicing {

Mlp::Mlp(std::vector<int> widths) : widths_(std::move(widths)) {
    if (widths_.size() < 2) throw std::invalid_argument("an MLP needs at least input and output widths");
    std::size_t total = 0;
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        if (widths_[l] < 1 || widths_[l + 1] < 1) throw std::invalid_argument("layer widths must be positive");
        offsets_.push_back(total);
        total += static_cast<std::size_t>(widths_[l + 1]) * (widths_[l] + 1);
    }
    params_.assign(total, 0.0);
}

void Mlp::initialize(Rng& rng) {
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(widths_[l]));
        const std::size_t begin = offsets_[l];
        const std::size_t end = begin + static_cast<std::size_t>(widths_[l + 1]) * (widths_[l] + 1);
        for (std::size_t k = begin; k < end; ++k) params_[k] = (2.0 * uniform01(rng) - 1.0) * bound;
    }
}

namespace {

// expm1 on |r| <= ln2 / 2 by its Taylor series through r^13.
inline double expm1_reduced(double r) {
    double p = 1.0 / 6227020800.0;
    p = p * r + 1.0 / 479001600.0;
    p = p * r + 1.0 / 39916800.0;
    p = p * r + 1.0 / 3628800.0;
    p = p * r + 1.0 / 362880.0;
    p = p * r + 1.0 / 40320.0;
    p = p * r + 1.0 / 5040.0;
    p = p * r + 1.0 / 720.0;
    p = p * r + 1.0 / 120.0;
    p = p * r + 1.0 / 24.0;
    p = p * r + 1.0 / 6.0;
    p = p * r + 0.5;
    p = p * r + 1.0;
    return p * r;
}

inline double clamp_pre_activation(double x) { return std::clamp(x, -20.0, 20.0); }  // tanh(20) rounds to 1

// Branch-free so the hidden-layer loops vectorise; expects |x| <= 20.
inline double tanh_kernel(double x) {
    constexpr double kLog2e = 1.4426950408889634;
    constexpr double kLn2Hi = 6.93147180369123816490e-01;
    constexpr double kLn2Lo = 1.90821492927058770002e-10;
    constexpr double kShift = 0x1.8p52;
    const double ax = std::abs(x);
    const double t = 2.0 * ax;
    const double k = (t * kLog2e + kShift) - kShift;
    const double r = (t - k * kLn2Hi) - k * kLn2Lo;
    const double q = expm1_reduced(r);
    const auto bits = std::bit_cast<std::uint64_t>(k + (kShift + 1023.0)) << 52;
    const double scale = std::bit_cast<double>(bits);  // 2^k
    const double em1 = scale * q + (scale - 1.0);      // e^t - 1
    return std::copysign(em1 / (em1 + 2.0), x);
}

// Rows [r0, r0 + kBlock) of out = W^T in + b, accumulated in registers.
template <int kBlock>
inline void affine_block(const double* __restrict w, const double* __restrict b, const double* __restrict in, int rows,
                         int cols, int r0, double* __restrict out) {
    double acc[kBlock];
    for (int k = 0; k < kBlock; ++k) acc[k] = b[r0 + k];
    for (int c = 0; c < cols; ++c) {
        const double x = in[c];
        const double* col = w + static_cast<std::size_t>(c) * rows + r0;
#pragma omp simd
        for (int k = 0; k < kBlock; ++k) acc[k] = std::fma(col[k], x, acc[k]);
    }
    for (int k = 0; k < kBlock; ++k) out[r0 + k] = acc[k];
}

// out = W^T in + b with W input-major (cols x rows). Every output sums b
// then the inputs in order with fused multiply-adds, whatever the blocking.
inline void affine(const double* __restrict w, const double* __restrict b, const double* __restrict in, int rows,
                   int cols, double* __restrict out) {
    int r0 = 0;
    for (; r0 + 32 <= rows; r0 += 32) affine_block<32>(w, b, in, rows, cols, r0, out);
    for (; r0 + 16 <= rows; r0 += 16) affine_block<16>(w, b, in, rows, cols, r0, out);
    for (; r0 + 8 <= rows; r0 += 8) affine_block<8>(w, b, in, rows, cols, r0, out);
    for (int r = r0; r < rows; ++r) {
        double acc = b[r];
        for (int c = 0; c < cols; ++c) acc = std::fma(w[static_cast<std::size_t>(c) * rows + r], in[c], acc);
        out[r] = acc;
    }
}

}  // namespace

double activation(double x) { return tanh_kernel(clamp_pre_activation(x)); }

void Mlp::forward_hidden(std::span<const double> input, Trace& trace) const {
    const std::size_t layers = widths_.size() - 1;
    trace.activations.resize(layers);
    trace.activations[0].assign(input.begin(), input.end());
    for (std::size_t l = 0; l + 1 < layers; ++l) {
        auto& out = trace.activations[l + 1];
        const int rows = widths_[l + 1];
        out.resize(static_cast<std::size_t>(rows));
        double* o = out.data();
        affine(&params_[weight_offset(l)], &params_[bias_offset(l)], trace.activations[l].data(), rows, widths_[l], o);
        for (int r = 0; r < rows; ++r) o[r] = clamp_pre_activation(o[r]);
#pragma omp simd
        for (int r = 0; r < rows; ++r) o[r] = tanh_kernel(o[r]);
    }
}

double Mlp::output_at(const Trace& trace, int unit) const {
    const std::size_t l = widths_.size() - 2;
    const int cols = widths_[l];
    const int rows = widths_[l + 1];
    const double* w = &params_[weight_offset(l) + static_cast<std::size_t>(unit)];
    const double* in = trace.activations[l].data();
    double acc = params_[bias_offset(l) + unit];
    for (int c = 0; c < cols; ++c) acc += w[static_cast<std::size_t>(c) * rows] * in[c];
    return acc;
}

void Mlp::outputs_from(const Trace& trace, std::span<double> output) const {
    const std::size_t l = widths_.size() - 2;
    affine(&params_[weight_offset(l)], &params_[bias_offset(l)], trace.activations[l].data(), widths_[l + 1],
           widths_[l], output.data());
}

void Mlp::forward(std::span<const double> input, std::span<double> output) const {
    thread_local Trace trace;
    forward_hidden(input, trace);
    outputs_from(trace, output);
}

void Mlp::accumulate_gradient(const Trace& trace, int unit, double scale, std::span<double> grad) const {
    std::size_t l = widths_.size() - 2;
    // Output layer: only unit `unit` receives gradient.
    const int cols = widths_[l];
    const int out_rows = widths_[l + 1];
    {
        const auto& in = trace.activations[l];
        double* gw = &grad[weight_offset(l) + static_cast<std::size_t>(unit)];
        for (int c = 0; c < cols; ++c) gw[static_cast<std::size_t>(c) * out_rows] += scale * in[c];
        grad[bias_offset(l) + unit] += scale;
    }
    if (l == 0) return;
    // delta over the last hidden layer's pre-activations
    thread_local std::vector<double> delta;
    thread_local std::vector<double> below;
    delta.resize(static_cast<std::size_t>(cols));
    {
        const double* w = &params_[weight_offset(l) + static_cast<std::size_t>(unit)];
        const auto& h = trace.activations[l];
        for (int c = 0; c < cols; ++c) delta[c] = scale * w[static_cast<std::size_t>(c) * out_rows] * (1.0 - h[c] * h[c]);
    }
    while (l-- > 0) {
        const int rows = widths_[l + 1];
        const int in_width = widths_[l];
        const auto& in = trace.activations[l];
        double* gw = &grad[weight_offset(l)];
        double* gb = &grad[bias_offset(l)];
        const double* d = delta.data();
        for (int c = 0; c < in_width; ++c) {
            const double x = in[c];
            double* g = gw + static_cast<std::size_t>(c) * rows;
#pragma omp simd
            for (int r = 0; r < rows; ++r) g[r] = std::fma(d[r], x, g[r]);
        }
        for (int r = 0; r < rows; ++r) gb[r] += d[r];
        if (l == 0) break;
        below.resize(static_cast<std::size_t>(in_width));
        const double* w = &params_[weight_offset(l)];
        for (int c = 0; c < in_width; ++c) {
            const double* col = w + static_cast<std::size_t>(c) * rows;
            double acc = 0.0;
            for (int r = 0; r < rows; ++r) acc += d[r] * col[r];
            below[c] = acc * (1.0 - in[c] * in[c]);
        }
        delta.swap(below);
    }
}

Adam::Adam(std::size_t size, AdamParams params) : params_(params), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
    if (params.size() != m_.size() || grad.size() != m_.size()) throw std::invalid_argument("Adam size mismatch");
    ++steps_;
    const double b1 = params_.beta1;
    const double b2 = params_.beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
    const double lr = params_.learning_rate;
    const double eps = params_.epsilon;
    for (std::size_t k = 0; k < params.size(); ++k) {
        m_[k] = b1 * m_[k] + (1.0 - b1) * grad[k];
        v_[k] = b2 * v_[k] + (1.0 - b2) * grad[k] * grad[k];
        params[k] -= lr * (m_[k] / c1) / (std::sqrt(v_[k] / c2) + eps);
    }
}

void Adam::save(std::ostream& out) const {
    write_line(out, "adam", params_.learning_rate, params_.beta1, params_.beta2, params_.epsilon, steps_);
    write_vector(out, "adam.m", m_);
    write_vector(out, "adam.v", v_);
}

void Adam::load(std::istream& in) {
    auto fields = read_fields(in, "adam", 5);
    params_.learning_rate = parse_double(fields[0]);
    params_.beta1 = parse_double(fields[1]);
    params_.beta2 = parse_double(fields[2]);
    params_.epsilon = parse_double(fields[3]);
    steps_ = std::stoll(fields[4]);
    m_ = read_vector(in, "adam.m");
    v_ = read_vector(in, "adam.v");
    if (m_.size() != v_.size()) throw std::runtime_error("checkpoint: Adam moment sizes differ");
}

void save_mlp(std::ostream& out, const Mlp& net) {
    std::vector<double> widths(net.widths().begin(), net.widths().end());
    write_vector(out, "mlp.widths", widths);
    write_vector(out, "mlp.params", std::vector<double>(net.parameters().begin(), net.parameters().end()));
}

Mlp load_mlp(std::istream& in) {
    const auto w = read_vector(in, "mlp.widths");
    std::vector<int> widths;
    for (double x : w) widths.push_back(static_cast<int>(x));
    Mlp net(widths);
    const auto params = read_vector(in, "mlp.params");
    if (params.size() != net.parameter_count()) throw std::runtime_error("checkpoint: MLP parameter count mismatch");
    std::copy(params.begin(), params.end(), net.parameters().begin());
    return net;
}

}  // namespace slicing
