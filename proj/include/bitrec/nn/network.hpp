#pragma once

#include <string>

#include "bitrec/nn/layers.hpp"

namespace bitrec {
namespace nn {

// Conv-BN-ReLU-Conv-BN with an additive skip from input to output.
template <typename T>
struct ResidualBlock {
    Conv2d<T> conv1, conv2;
    BatchNorm<T> bn1, bn2;
    ReLU<T> relu;

    ResidualBlock() = default;
    explicit ResidualBlock(int channels)
        : conv1(channels, channels), conv2(channels, channels),
          bn1(channels), bn2(channels) {}

    void init(std::mt19937& rng) {
        conv1.init(rng);
        conv2.init(rng);
    }

    Tensor4<T> forward(const Tensor4<T>& x, BnMode mode, bool cache = true) {
        Tensor4<T> y = conv1.forward(x, cache);
        y = bn1.forward(y, mode, cache);
        y = relu.forward(y, cache);
        y = conv2.forward(y, cache);
        y = bn2.forward(y, mode, cache);
        for (std::size_t i = 0; i < y.size(); ++i) y.v[i] += x.v[i];
        return y;
    }

    Tensor4<T> backward(const Tensor4<T>& grad_out) {
        Tensor4<T> g = bn2.backward(grad_out);
        g = conv2.backward(g);
        g = relu.backward(g);
        g = bn1.backward(g);
        g = conv1.backward(g);
        for (std::size_t i = 0; i < g.size(); ++i) g.v[i] += grad_out.v[i];
        return g;
    }

    void zero_grad() {
        conv1.zero_grad();
        conv2.zero_grad();
        bn1.zero_grad();
        bn2.zero_grad();
    }
};

// Reference to one named parameter group inside a network, used by the
// optimizer, the gradient checker, and the serializer.
template <typename T>
struct ParamRef {
    std::string name;
    std::vector<T>* value = nullptr;
    std::vector<T>* grad = nullptr; // nullptr for running statistics
};

// Plane-prediction network: Conv -> D residual blocks -> BN -> Conv
// (-> sigmoid unless configured as a raw residual head).
template <typename T>
class BitplaneNetwork {
public:
    // Metadata carried with the model file.
    int depth = 1;        // D
    int channels = 3;
    int plane_index = -1; // plane this network predicts; -1 for single-shot
    int source_bits = 0;  // q of the network's input
    int container_bits = 8;
    bool sigmoid_head = true;

    Conv2d<T> conv_in;
    std::vector<ResidualBlock<T>> blocks;
    BatchNorm<T> bn_out;
    Conv2d<T> conv_out;
    Sigmoid<T> sigmoid;

    static constexpr int kWidth = 64;

    BitplaneNetwork() = default;
    BitplaneNetwork(int d, int img_channels, bool with_sigmoid = true)
        : depth(d), channels(img_channels), sigmoid_head(with_sigmoid),
          conv_in(img_channels, kWidth), bn_out(kWidth), conv_out(kWidth, img_channels) {
        if (d < 1) throw invalid_argument("BitplaneNetwork: depth must be >= 1");
        if (img_channels != 1 && img_channels != 3)
            throw invalid_argument("BitplaneNetwork: channels must be 1 or 3");
        blocks.reserve(d);
        for (int i = 0; i < d; ++i) blocks.emplace_back(kWidth);
    }

    void init(std::mt19937& rng) {
        conv_in.init(rng);
        for (auto& b : blocks) b.init(rng);
        conv_out.init(rng);
    }

    Tensor4<T> forward(const Tensor4<T>& x, BnMode mode, bool cache = true) {
        if (x.c != channels) throw invalid_argument("network_forward: channel mismatch");
        Tensor4<T> y = conv_in.forward(x, cache);
        for (auto& b : blocks) y = b.forward(y, mode, cache);
        y = bn_out.forward(y, mode, cache);
        y = conv_out.forward(y, cache);
        if (sigmoid_head) y = sigmoid.forward(y, cache);
        return y;
    }

    Tensor4<T> backward(const Tensor4<T>& grad_out) {
        Tensor4<T> g = sigmoid_head ? sigmoid.backward(grad_out) : grad_out;
        g = conv_out.backward(g);
        g = bn_out.backward(g);
        for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) g = it->backward(g);
        return conv_in.backward(g);
    }

    void zero_grad() {
        conv_in.zero_grad();
        for (auto& b : blocks) b.zero_grad();
        bn_out.zero_grad();
        conv_out.zero_grad();
    }

    // Trainable groups first, then BN running statistics (serialized,
    // never optimized).
    std::vector<ParamRef<T>> params() {
        std::vector<ParamRef<T>> out;
        auto add = [&out](const std::string& name, std::vector<T>& v, std::vector<T>* g) {
            out.push_back({name, &v, g});
        };
        add("conv_in.weight", conv_in.weight, &conv_in.grad_weight);
        add("conv_in.bias", conv_in.bias, &conv_in.grad_bias);
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            const std::string pfx = "block" + std::to_string(i) + ".";
            auto& b = blocks[i];
            add(pfx + "conv1.weight", b.conv1.weight, &b.conv1.grad_weight);
            add(pfx + "conv1.bias", b.conv1.bias, &b.conv1.grad_bias);
            add(pfx + "bn1.gamma", b.bn1.gamma, &b.bn1.grad_gamma);
            add(pfx + "bn1.beta", b.bn1.beta, &b.bn1.grad_beta);
            add(pfx + "conv2.weight", b.conv2.weight, &b.conv2.grad_weight);
            add(pfx + "conv2.bias", b.conv2.bias, &b.conv2.grad_bias);
            add(pfx + "bn2.gamma", b.bn2.gamma, &b.bn2.grad_gamma);
            add(pfx + "bn2.beta", b.bn2.beta, &b.bn2.grad_beta);
        }
        add("bn_out.gamma", bn_out.gamma, &bn_out.grad_gamma);
        add("bn_out.beta", bn_out.beta, &bn_out.grad_beta);
        add("conv_out.weight", conv_out.weight, &conv_out.grad_weight);
        add("conv_out.bias", conv_out.bias, &conv_out.grad_bias);
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            const std::string pfx = "block" + std::to_string(i) + ".";
            auto& b = blocks[i];
            add(pfx + "bn1.running_mean", b.bn1.running_mean, nullptr);
            add(pfx + "bn1.running_var", b.bn1.running_var, nullptr);
            add(pfx + "bn2.running_mean", b.bn2.running_mean, nullptr);
            add(pfx + "bn2.running_var", b.bn2.running_var, nullptr);
        }
        add("bn_out.running_mean", bn_out.running_mean, nullptr);
        add("bn_out.running_var", bn_out.running_var, nullptr);
        return out;
    }

    std::size_t trainable_count() {
        std::size_t n = 0;
        for (const auto& p : params())
            if (p.grad) n += p.value->size();
        return n;
    }
};

} // namespace nn
} // namespace bitrec
