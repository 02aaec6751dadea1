#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sslmseg/tensor.hpp"

namespace sslmseg {

struct Conv2dSpec {
  int in_channels = 1;
  int out_channels = 1;
  int kernel_h = 1;
  int kernel_w = 1;
  int stride_h = 1;
  int stride_w = 1;
  int pad_h = 0;
  int pad_w = 0;
  int dilation_h = 1;
  int dilation_w = 1;

  int out_h(int h) const { return (h + 2 * pad_h - dilation_h * (kernel_h - 1) - 1) / stride_h + 1; }
  int out_w(int w) const { return (w + 2 * pad_w - dilation_w * (kernel_w - 1) - 1) / stride_w + 1; }
  std::size_t weight_count() const {
    return static_cast<std::size_t>(out_channels) * in_channels * kernel_h * kernel_w;
  }
  friend bool operator==(const Conv2dSpec&, const Conv2dSpec&) = default;
};

struct Pool2dSpec {
  int kernel_h = 1;
  int kernel_w = 1;
  int stride_h = 1;
  int stride_w = 1;
  int pad_h = 0;
  int pad_w = 0;

  int out_h(int h) const { return (h + 2 * pad_h - kernel_h) / stride_h + 1; }
  int out_w(int w) const { return (w + 2 * pad_w - kernel_w) / stride_w + 1; }
  friend bool operator==(const Pool2dSpec&, const Pool2dSpec&) = default;
};

/// Im2col buffer kept from the forward pass for the weight gradient.
template <typename T>
struct ConvCache {
  AlignedVector<T> columns;  // [in*kh*kw x out_h*out_w]
};

/// Cross-correlation with zero padding. weight is [out, in, kh, kw], bias [out].
template <typename T>
Tensor4<T> conv2d_forward(const Tensor4<T>& input, const Conv2dSpec& spec,
                          std::span<const T> weight, std::span<const T> bias,
                          ConvCache<T>* cache = nullptr);

/// Accumulates into grad_weight / grad_bias; writes grad_input when non-null.
template <typename T>
void conv2d_backward(const Tensor4<T>& input, const Conv2dSpec& spec, std::span<const T> weight,
                     const Tensor4<T>& grad_output, const ConvCache<T>* cache,
                     Tensor4<T>* grad_input, std::span<T> grad_weight, std::span<T> grad_bias);

namespace debug {
/// Test-only fault injection: negates the first weight-gradient entry of every
/// conv2d_backward call while enabled.
void set_flip_conv_grad_sign(bool enabled);
bool flip_conv_grad_sign();
}  // namespace debug

inline constexpr double kLeakySlope = 0.01;

template <typename T>
Tensor4<T> leaky_relu_forward(const Tensor4<T>& x, T slope = T(kLeakySlope));
template <typename T>
Tensor4<T> leaky_relu_backward(const Tensor4<T>& x, const Tensor4<T>& grad_output,
                               T slope = T(kLeakySlope));

/// Max pooling; padded positions never win. `argmax` receives the flat input
/// index selected for every output element.
template <typename T>
Tensor4<T> maxpool2d_forward(const Tensor4<T>& x, const Pool2dSpec& spec,
                             std::vector<std::size_t>* argmax = nullptr);
template <typename T>
Tensor4<T> maxpool2d_backward(const Tensor4<T>& x, const Pool2dSpec& spec,
                              const std::vector<std::size_t>& argmax,
                              const Tensor4<T>& grad_output);

/// [1 x C x H x W] -> [1 x C*H x 1 x W]; element (c, h, w) moves to channel c*H + h.
template <typename T>
Tensor4<T> collapse_freq(const Tensor4<T>& x);
template <typename T>
Tensor4<T> expand_freq(const Tensor4<T>& x, int channels, int height);

template <typename T>
struct BceResult {
  double loss = 0.0;
  std::vector<T> grad;  // d loss / d logits
};

/// Mean of max(z,0) - z y + log(1 + exp(-|z|)); gradient (sigmoid(z) - y) / N.
template <typename T>
BceResult<T> bce_with_logits(std::span<const T> logits, std::span<const T> targets);

template <typename T>
T sigmoid(T z);

struct AdamHyper {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  friend bool operator==(const AdamHyper&, const AdamHyper&) = default;
};

template <typename T>
struct AdamState {
  AdamHyper hyper;
  std::uint64_t step = 0;
  std::vector<std::vector<T>> m;
  std::vector<std::vector<T>> v;

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

/// Bias-corrected Adam update of every parameter tensor.
template <typename T>
void adam_step(std::vector<std::vector<T>>& params, const std::vector<std::vector<T>>& grads,
               AdamState<T>& state);

}  // namespace sslmseg
