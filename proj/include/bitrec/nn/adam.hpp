#pragma once

#include <cmath>
#include <vector>

#include "bitrec/errors.hpp"

namespace bitrec {
namespace nn {

// Bias-corrected Adam over a flat parameter group.
template <typename T>
struct AdamState {
    std::vector<T> m, v;
    long t = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    AdamState() = default;
    explicit AdamState(std::size_t n, double lr_ = 1e-3)
        : m(n, T(0)), v(n, T(0)), lr(lr_) {}
};

template <typename T>
void adam_step(std::vector<T>& params, const std::vector<T>& grads, AdamState<T>& state) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw invalid_argument("adam_step: size mismatch");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        const double m = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        const double v = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        state.m[i] = static_cast<T>(m);
        state.v[i] = static_cast<T>(v);
        params[i] -= static_cast<T>(state.lr * (m / bc1) / (std::sqrt(v / bc2) + state.epsilon));
    }
}

} // namespace nn
} // namespace bitrec
