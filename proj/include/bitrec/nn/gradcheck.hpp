#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bitrec/nn/network.hpp"

namespace bitrec {
namespace nn {

struct GradCheckEntry {
    std::string group;
    double max_rel_error = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;

    double worst() const {
        double w = 0.0;
        for (const auto& e : entries) w = std::max(w, e.max_rel_error);
        return w;
    }
    bool pass(double tolerance) const { return worst() < tolerance; }
};

namespace detail {

inline double rel_error(double analytic, double numeric) {
    const double diff = std::abs(analytic - numeric);
    const double scale = std::max(std::abs(analytic), std::abs(numeric));
    // Batch norm makes the loss exactly invariant to the biases feeding
    // it, so some derivatives are legitimately zero. Comparing those
    // relatively would just amplify finite-difference noise; fall back
    // to the absolute difference when both sides are near zero.
    if (scale < 1e-6) return diff;
    return diff / scale;
}

} // namespace detail

// Central finite differences against one parameter group. `loss` must
// re-run the forward pass from scratch each call. When max_probes is
// nonzero and smaller than the group, a deterministic evenly-strided
// subset of indices is probed instead of the whole group.
inline double check_group(std::vector<double>& values,
                          const std::vector<double>& analytic_grad,
                          const std::function<double()>& loss,
                          double h = 1e-5, std::size_t max_probes = 0) {
    double worst = 0.0;
    const std::size_t n = values.size();
    const std::size_t count = (max_probes && max_probes < n) ? max_probes : n;
    const std::size_t stride = n / count;
    for (std::size_t j = 0; j < count; ++j) {
        const std::size_t i = j * stride;
        const double saved = values[i];
        values[i] = saved + h;
        const double lp = loss();
        values[i] = saved - h;
        const double lm = loss();
        values[i] = saved;
        const double numeric = (lp - lm) / (2.0 * h);
        worst = std::max(worst, detail::rel_error(analytic_grad[i], numeric));
    }
    return worst;
}

// Checks the trainable groups of a double-precision network plus the
// input gradient, under the given loss head. Large groups are probed at
// a strided subset (probes_per_group) to keep the check tractable.
inline GradCheckReport check_network(BitplaneNetwork<double>& net, Tensor4<double> input,
                                     const Tensor4<double>& target, bool use_bce,
                                     double h = 1e-5, std::size_t probes_per_group = 64) {
    auto loss_fn = [&]() {
        // Train-mode loss depends only on batch statistics, so the running
        // stat updates during repeated probes do not perturb the check.
        Tensor4<double> out = net.forward(input, BnMode::train, false);
        return use_bce ? bce_loss(out, target) : mse_loss(out, target);
    };

    net.zero_grad();
    Tensor4<double> out = net.forward(input, BnMode::train, true);
    Tensor4<double> grad_loss =
        use_bce ? bce_loss_backward(out, target) : mse_loss_backward(out, target);
    Tensor4<double> grad_input = net.backward(grad_loss);

    GradCheckReport report;
    for (auto& p : net.params()) {
        if (!p.grad) continue;
        report.entries.push_back(
            {p.name, check_group(*p.value, *p.grad, loss_fn, h, probes_per_group)});
    }
    report.entries.push_back(
        {"input", check_group(input.v, grad_input.v, loss_fn, h, probes_per_group)});
    return report;
}

} // namespace nn
} // namespace bitrec
