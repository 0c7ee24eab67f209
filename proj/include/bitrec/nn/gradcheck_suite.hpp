#pragma once

#include "bitrec/nn/gradcheck.hpp"

namespace bitrec {
namespace nn {

struct SuiteResult {
    std::string component;
    double max_rel_error = 0.0;
    double tolerance = 0.0;
    bool pass() const { return max_rel_error < tolerance; }
};

namespace detail {

inline Tensor4<double> random_tensor(int n, int c, int h, int w, std::mt19937& rng,
                                     double lo = -1.0, double hi = 1.0) {
    Tensor4<double> t(n, c, h, w);
    std::uniform_real_distribution<double> dist(lo, hi);
    for (auto& v : t.v) v = dist(rng);
    return t;
}

} // namespace detail

// Double-precision finite-difference checks for every differentiable
// component, mirroring the layer tolerances of the test suite.
inline std::vector<SuiteResult> run_gradcheck_suite(std::uint32_t seed = 7) {
    std::mt19937 rng(seed);
    std::vector<SuiteResult> results;

    { // conv layer: weights, bias, and input under an MSE head
        Conv2d<double> conv(3, 4);
        conv.init(rng);
        Tensor4<double> x = detail::random_tensor(2, 3, 5, 5, rng);
        Tensor4<double> target = detail::random_tensor(2, 4, 5, 5, rng);
        auto loss = [&]() { return mse_loss(conv.forward(x, false), target); };
        conv.zero_grad();
        Tensor4<double> out = conv.forward(x);
        Tensor4<double> gin = conv.backward(mse_loss_backward(out, target));
        double worst = check_group(conv.weight, conv.grad_weight, loss);
        worst = std::max(worst, check_group(conv.bias, conv.grad_bias, loss));
        worst = std::max(worst, check_group(x.v, gin.v, loss));
        results.push_back({"conv2d", worst, 1e-6});
    }

    { // batch norm, train mode
        BatchNorm<double> bn(3);
        std::uniform_real_distribution<double> dist(0.5, 1.5);
        for (auto& g : bn.gamma) g = dist(rng);
        for (auto& b : bn.beta) b = dist(rng) - 1.0;
        Tensor4<double> x = detail::random_tensor(4, 3, 4, 4, rng);
        Tensor4<double> target = detail::random_tensor(4, 3, 4, 4, rng);
        auto loss = [&]() { return mse_loss(bn.forward(x, BnMode::train, false), target); };
        bn.zero_grad();
        Tensor4<double> out = bn.forward(x, BnMode::train);
        Tensor4<double> gin = bn.backward(mse_loss_backward(out, target));
        double worst = check_group(bn.gamma, bn.grad_gamma, loss);
        worst = std::max(worst, check_group(bn.beta, bn.grad_beta, loss));
        worst = std::max(worst, check_group(x.v, gin.v, loss));
        results.push_back({"batch_norm(train)", worst, 1e-5});
    }

    { // relu, input kept away from the kink
        ReLU<double> relu;
        Tensor4<double> x = detail::random_tensor(1, 2, 4, 4, rng);
        for (auto& v : x.v) v += (v >= 0 ? 0.2 : -0.2);
        Tensor4<double> target = detail::random_tensor(1, 2, 4, 4, rng);
        auto loss = [&]() { return mse_loss(relu.forward(x, false), target); };
        Tensor4<double> out = relu.forward(x);
        Tensor4<double> gin = relu.backward(mse_loss_backward(out, target));
        results.push_back({"relu", check_group(x.v, gin.v, loss), 1e-7});
    }

    { // sigmoid
        Sigmoid<double> sig;
        Tensor4<double> x = detail::random_tensor(1, 2, 4, 4, rng, -2.0, 2.0);
        Tensor4<double> target = detail::random_tensor(1, 2, 4, 4, rng, 0.0, 1.0);
        auto loss = [&]() { return mse_loss(sig.forward(x, false), target); };
        Tensor4<double> out = sig.forward(x);
        Tensor4<double> gin = sig.backward(mse_loss_backward(out, target));
        results.push_back({"sigmoid", check_group(x.v, gin.v, loss), 1e-7});
    }

    { // bce loss w.r.t. predictions
        Tensor4<double> pred = detail::random_tensor(1, 3, 4, 4, rng, 0.05, 0.95);
        Tensor4<double> target(1, 3, 4, 4);
        for (auto& v : target.v) v = (rng() & 1u) ? 1.0 : 0.0;
        auto loss = [&]() { return bce_loss(pred, target); };
        Tensor4<double> g = bce_loss_backward(pred, target);
        results.push_back({"bce_loss", check_group(pred.v, g.v, loss), 1e-6});
    }

    { // mse loss w.r.t. predictions
        Tensor4<double> pred = detail::random_tensor(1, 3, 4, 4, rng);
        Tensor4<double> target = detail::random_tensor(1, 3, 4, 4, rng);
        auto loss = [&]() { return mse_loss(pred, target); };
        Tensor4<double> g = mse_loss_backward(pred, target);
        results.push_back({"mse_loss", check_group(pred.v, g.v, loss), 1e-6});
    }

    { // full D=1 network + BCE
        BitplaneNetwork<double> net(1, 3, true);
        net.init(rng);
        Tensor4<double> x = detail::random_tensor(1, 3, 8, 8, rng, 0.0, 1.0);
        Tensor4<double> target(1, 3, 8, 8);
        for (auto& v : target.v) v = (rng() & 1u) ? 1.0 : 0.0;
        GradCheckReport report = check_network(net, x, target, /*use_bce=*/true);
        results.push_back({"full_network(D=1)+bce", report.worst(), 1e-4});
    }

    return results;
}

} // namespace nn
} // namespace bitrec
