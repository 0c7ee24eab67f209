#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "bitrec/nn/tensor.hpp"

namespace bitrec {
namespace nn {

namespace detail {

// Unpacks one sample into a (C*9) x (H*W) patch matrix for stride-1,
// pad-1 3x3 cross-correlation.
template <typename T>
void im2col_3x3(const T* src, int c, int h, int w, T* col) {
    const std::size_t hw = static_cast<std::size_t>(h) * w;
    std::size_t row = 0;
    for (int ch = 0; ch < c; ++ch) {
        const T* plane = src + static_cast<std::size_t>(ch) * hw;
        for (int ky = -1; ky <= 1; ++ky)
            for (int kx = -1; kx <= 1; ++kx, ++row) {
                T* dst = col + row * hw;
                for (int y = 0; y < h; ++y) {
                    const int sy = y + ky;
                    T* d = dst + static_cast<std::size_t>(y) * w;
                    if (sy < 0 || sy >= h) {
                        std::fill(d, d + w, T(0));
                        continue;
                    }
                    const T* s = plane + static_cast<std::size_t>(sy) * w;
                    for (int x = 0; x < w; ++x) {
                        const int sx = x + kx;
                        d[x] = (sx < 0 || sx >= w) ? T(0) : s[sx];
                    }
                }
            }
    }
}

// Scatter-add of a patch matrix back to image layout (adjoint of im2col).
template <typename T>
void col2im_3x3(const T* col, int c, int h, int w, T* dst) {
    const std::size_t hw = static_cast<std::size_t>(h) * w;
    std::fill(dst, dst + static_cast<std::size_t>(c) * hw, T(0));
    std::size_t row = 0;
    for (int ch = 0; ch < c; ++ch) {
        T* plane = dst + static_cast<std::size_t>(ch) * hw;
        for (int ky = -1; ky <= 1; ++ky)
            for (int kx = -1; kx <= 1; ++kx, ++row) {
                const T* src = col + row * hw;
                for (int y = 0; y < h; ++y) {
                    const int sy = y + ky;
                    if (sy < 0 || sy >= h) continue;
                    const T* s = src + static_cast<std::size_t>(y) * w;
                    T* d = plane + static_cast<std::size_t>(sy) * w;
                    for (int x = 0; x < w; ++x) {
                        const int sx = x + kx;
                        if (sx >= 0 && sx < w) d[sx] += s[x];
                    }
                }
            }
    }
}

} // namespace detail

// 3x3 convolution (cross-correlation), stride 1, zero padding 1.
template <typename T>
class Conv2d {
public:
    int in_ch = 0, out_ch = 0;
    std::vector<T> weight;      // out_ch x in_ch x 3 x 3
    std::vector<T> bias;        // out_ch
    std::vector<T> grad_weight;
    std::vector<T> grad_bias;

    Conv2d() = default;
    Conv2d(int in, int out)
        : in_ch(in), out_ch(out),
          weight(static_cast<std::size_t>(out) * in * 9, T(0)),
          bias(out, T(0)),
          grad_weight(weight.size(), T(0)),
          grad_bias(out, T(0)) {}

    // He-normal fan-in init, zero bias.
    void init(std::mt19937& rng) {
        std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / (in_ch * 9)));
        for (auto& v : weight) v = static_cast<T>(dist(rng));
        std::fill(bias.begin(), bias.end(), T(0));
    }

    Tensor4<T> forward(const Tensor4<T>& x, bool cache = true) {
        if (x.c != in_ch) throw invalid_argument("conv2d: channel mismatch");
        if (cache) input_ = x;
        Tensor4<T> out(x.n, out_ch, x.h, x.w);
        const int hw = x.h * x.w;
        std::vector<T> col(static_cast<std::size_t>(in_ch) * 9 * hw);
        for (int i = 0; i < x.n; ++i) {
            detail::im2col_3x3(x.sample(i), in_ch, x.h, x.w, col.data());
            T* o = out.sample(i);
            for (int oc = 0; oc < out_ch; ++oc)
                std::fill(o + static_cast<std::size_t>(oc) * hw,
                          o + static_cast<std::size_t>(oc + 1) * hw, bias[oc]);
            detail::gemm_nn(out_ch, hw, in_ch * 9, weight.data(), col.data(), o);
        }
        return out;
    }

    // Accumulates parameter gradients; returns grad w.r.t. the input.
    Tensor4<T> backward(const Tensor4<T>& grad_out) {
        const Tensor4<T>& x = input_;
        Tensor4<T> grad_in(x.n, in_ch, x.h, x.w);
        const int hw = x.h * x.w;
        const int k = in_ch * 9;
        std::vector<T> col(static_cast<std::size_t>(k) * hw);
        std::vector<T> grad_col(static_cast<std::size_t>(k) * hw);
        for (int i = 0; i < x.n; ++i) {
            detail::im2col_3x3(x.sample(i), in_ch, x.h, x.w, col.data());
            const T* g = grad_out.sample(i);
            detail::gemm_nt(out_ch, k, hw, g, col.data(), grad_weight.data());
            for (int oc = 0; oc < out_ch; ++oc) {
                T acc = T(0);
                const T* go = g + static_cast<std::size_t>(oc) * hw;
                for (int j = 0; j < hw; ++j) acc += go[j];
                grad_bias[oc] += acc;
            }
            std::fill(grad_col.begin(), grad_col.end(), T(0));
            detail::gemm_tn(k, hw, out_ch, weight.data(), g, grad_col.data());
            detail::col2im_3x3(grad_col.data(), in_ch, x.h, x.w, grad_in.sample(i));
        }
        return grad_in;
    }

    void zero_grad() {
        std::fill(grad_weight.begin(), grad_weight.end(), T(0));
        std::fill(grad_bias.begin(), grad_bias.end(), T(0));
    }

private:
    Tensor4<T> input_;
};

enum class BnMode { train, eval };

template <typename T>
class BatchNorm {
public:
    int channels = 0;
    std::vector<T> gamma, beta;
    std::vector<T> running_mean, running_var;
    std::vector<T> grad_gamma, grad_beta;
    double momentum = 0.9;
    double epsilon = 1e-5;

    BatchNorm() = default;
    explicit BatchNorm(int c)
        : channels(c), gamma(c, T(1)), beta(c, T(0)),
          running_mean(c, T(0)), running_var(c, T(1)),
          grad_gamma(c, T(0)), grad_beta(c, T(0)) {}

    Tensor4<T> forward(const Tensor4<T>& x, BnMode mode, bool cache = true) {
        if (x.c != channels) throw invalid_argument("batch_norm: channel mismatch");
        Tensor4<T> out(x.n, x.c, x.h, x.w);
        const std::size_t hw = static_cast<std::size_t>(x.h) * x.w;
        const std::size_t m = static_cast<std::size_t>(x.n) * hw;
        if (mode == BnMode::train) {
            if (cache) {
                x_hat_.assign(x.size(), T(0));
                inv_std_.assign(channels, T(0));
                batch_n_ = x.n;
                batch_hw_ = static_cast<int>(hw);
            }
            for (int ch = 0; ch < channels; ++ch) {
                double mean = 0.0, var = 0.0;
                for (int i = 0; i < x.n; ++i) {
                    const T* s = x.sample(i) + ch * hw;
                    for (std::size_t j = 0; j < hw; ++j) mean += s[j];
                }
                mean /= static_cast<double>(m);
                for (int i = 0; i < x.n; ++i) {
                    const T* s = x.sample(i) + ch * hw;
                    for (std::size_t j = 0; j < hw; ++j) {
                        const double d = s[j] - mean;
                        var += d * d;
                    }
                }
                var /= static_cast<double>(m); // biased, matches normalization
                const double inv_std = 1.0 / std::sqrt(var + epsilon);
                for (int i = 0; i < x.n; ++i) {
                    const T* s = x.sample(i) + ch * hw;
                    T* o = out.sample(i) + ch * hw;
                    T* xh = cache ? x_hat_.data() + (x.sample(i) - x.v.data()) + ch * hw : nullptr;
                    for (std::size_t j = 0; j < hw; ++j) {
                        const T h = static_cast<T>((s[j] - mean) * inv_std);
                        if (xh) xh[j] = h;
                        o[j] = gamma[ch] * h + beta[ch];
                    }
                }
                if (cache) inv_std_[ch] = static_cast<T>(inv_std);
                running_mean[ch] = static_cast<T>(momentum * running_mean[ch] + (1.0 - momentum) * mean);
                running_var[ch] = static_cast<T>(momentum * running_var[ch] + (1.0 - momentum) * var);
            }
        } else {
            for (int ch = 0; ch < channels; ++ch) {
                const double inv_std = 1.0 / std::sqrt(static_cast<double>(running_var[ch]) + epsilon);
                const double mean = running_mean[ch];
                for (int i = 0; i < x.n; ++i) {
                    const T* s = x.sample(i) + ch * hw;
                    T* o = out.sample(i) + ch * hw;
                    for (std::size_t j = 0; j < hw; ++j)
                        o[j] = static_cast<T>(gamma[ch] * ((s[j] - mean) * inv_std) + beta[ch]);
                }
            }
        }
        return out;
    }

    // Exact train-mode backward through the batch statistics.
    Tensor4<T> backward(const Tensor4<T>& grad_out) {
        Tensor4<T> grad_in(grad_out.n, grad_out.c, grad_out.h, grad_out.w);
        const std::size_t hw = static_cast<std::size_t>(batch_hw_);
        const double m = static_cast<double>(batch_n_) * batch_hw_;
        for (int ch = 0; ch < channels; ++ch) {
            double sum_dy = 0.0, sum_dy_xhat = 0.0;
            for (int i = 0; i < batch_n_; ++i) {
                const T* g = grad_out.sample(i) + ch * hw;
                const T* xh = x_hat_.data() + grad_out.sample_stride() * i + ch * hw;
                for (std::size_t j = 0; j < hw; ++j) {
                    sum_dy += g[j];
                    sum_dy_xhat += static_cast<double>(g[j]) * xh[j];
                }
            }
            grad_gamma[ch] += static_cast<T>(sum_dy_xhat);
            grad_beta[ch] += static_cast<T>(sum_dy);
            const double scale = gamma[ch] * inv_std_[ch] / m;
            for (int i = 0; i < batch_n_; ++i) {
                const T* g = grad_out.sample(i) + ch * hw;
                const T* xh = x_hat_.data() + grad_out.sample_stride() * i + ch * hw;
                T* gi = grad_in.sample(i) + ch * hw;
                for (std::size_t j = 0; j < hw; ++j)
                    gi[j] = static_cast<T>(scale * (m * g[j] - sum_dy - xh[j] * sum_dy_xhat));
            }
        }
        return grad_in;
    }

    void zero_grad() {
        std::fill(grad_gamma.begin(), grad_gamma.end(), T(0));
        std::fill(grad_beta.begin(), grad_beta.end(), T(0));
    }

private:
    std::vector<T> x_hat_;
    std::vector<T> inv_std_;
    int batch_n_ = 0;
    int batch_hw_ = 0;
};

template <typename T>
class ReLU {
public:
    Tensor4<T> forward(const Tensor4<T>& x, bool cache = true) {
        Tensor4<T> out = x;
        for (auto& v : out.v) v = std::max(v, T(0));
        if (cache) mask_ = x;
        return out;
    }
    Tensor4<T> backward(const Tensor4<T>& grad_out) {
        Tensor4<T> grad_in = grad_out;
        for (std::size_t i = 0; i < grad_in.size(); ++i)
            if (mask_.v[i] <= T(0)) grad_in.v[i] = T(0);
        return grad_in;
    }

private:
    Tensor4<T> mask_;
};

template <typename T>
class Sigmoid {
public:
    Tensor4<T> forward(const Tensor4<T>& x, bool cache = true) {
        Tensor4<T> out = x;
        for (auto& v : out.v) v = T(1) / (T(1) + std::exp(-v));
        if (cache) out_ = out;
        return out;
    }
    Tensor4<T> backward(const Tensor4<T>& grad_out) {
        Tensor4<T> grad_in = grad_out;
        for (std::size_t i = 0; i < grad_in.size(); ++i)
            grad_in.v[i] *= out_.v[i] * (T(1) - out_.v[i]);
        return grad_in;
    }

private:
    Tensor4<T> out_;
};

inline constexpr double kBceClamp = 1e-7;

// Mean binary cross entropy with predictions clamped away from {0,1}.
template <typename T>
double bce_loss(const Tensor4<T>& pred, const Tensor4<T>& target) {
    if (!pred.same_shape(target)) throw invalid_argument("bce_loss: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double t = target.v[i];
        if (t != 0.0 && t != 1.0) throw invalid_argument("bce_loss: target not in {0,1}");
        const double p = std::clamp(static_cast<double>(pred.v[i]), kBceClamp, 1.0 - kBceClamp);
        acc -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
    }
    return acc / static_cast<double>(pred.size());
}

template <typename T>
Tensor4<T> bce_loss_backward(const Tensor4<T>& pred, const Tensor4<T>& target) {
    Tensor4<T> grad(pred.n, pred.c, pred.h, pred.w);
    const double inv_n = 1.0 / static_cast<double>(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double p = pred.v[i];
        if (p <= kBceClamp || p >= 1.0 - kBceClamp) {
            grad.v[i] = T(0); // clamp region is flat
            continue;
        }
        const double t = target.v[i];
        grad.v[i] = static_cast<T>((p - t) / (p * (1.0 - p)) * inv_n);
    }
    return grad;
}

template <typename T>
double mse_loss(const Tensor4<T>& pred, const Tensor4<T>& target) {
    if (!pred.same_shape(target)) throw invalid_argument("mse_loss: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = static_cast<double>(pred.v[i]) - target.v[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.size());
}

template <typename T>
Tensor4<T> mse_loss_backward(const Tensor4<T>& pred, const Tensor4<T>& target) {
    Tensor4<T> grad(pred.n, pred.c, pred.h, pred.w);
    const double inv_n = 2.0 / static_cast<double>(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i)
        grad.v[i] = static_cast<T>((static_cast<double>(pred.v[i]) - target.v[i]) * inv_n);
    return grad;
}

} // namespace nn
} // namespace bitrec
