#define EIGEN_DONT_PARALLELIZE
#include "sslmseg/layers.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

namespace sslmseg {

namespace {

std::atomic<bool> g_flip_conv_grad{false};

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapMat = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMapMat = Eigen::Map<const RowMat<T>>;

void check_conv_shapes(int in_c, const Conv2dSpec& spec, std::size_t weights, std::size_t biases) {
  if (in_c != spec.in_channels) {
    throw DimensionError("conv2d expects " + std::to_string(spec.in_channels) +
                         " input channels, got " + std::to_string(in_c));
  }
  if (weights != spec.weight_count() || biases != static_cast<std::size_t>(spec.out_channels)) {
    throw DimensionError("conv2d parameter size mismatch");
  }
  if (spec.dilation_h < 1 || spec.dilation_w < 1 || spec.stride_h < 1 || spec.stride_w < 1) {
    throw DimensionError("conv2d stride and dilation must be >= 1");
  }
}

// Copies into Eigen-owned (aligned) storage.
template <typename T>
RowMat<T> aligned_copy(const T* data, Eigen::Index rows, Eigen::Index cols) {
  return ConstMapMat<T>(data, rows, cols);
}

template <typename T>
void im2col(const Tensor4<T>& x, const Conv2dSpec& s, int oh, int ow, AlignedVector<T>& cols) {
  const std::size_t P = static_cast<std::size_t>(oh) * ow;
  cols.assign(static_cast<std::size_t>(s.in_channels) * s.kernel_h * s.kernel_w * P, T(0));
  std::size_t row = 0;
  for (int ci = 0; ci < s.in_channels; ++ci) {
    for (int i = 0; i < s.kernel_h; ++i) {
      for (int j = 0; j < s.kernel_w; ++j, ++row) {
        T* dst = cols.data() + row * P;
        for (int y = 0; y < oh; ++y) {
          const int iy = y * s.stride_h - s.pad_h + i * s.dilation_h;
          if (iy < 0 || iy >= x.h) continue;
          const T* src = x.data.data() + x.index(ci, iy, 0);
          T* d = dst + static_cast<std::size_t>(y) * ow;
          for (int xo = 0; xo < ow; ++xo) {
            const int ix = xo * s.stride_w - s.pad_w + j * s.dilation_w;
            if (ix >= 0 && ix < x.w) d[xo] = src[ix];
          }
        }
      }
    }
  }
}

template <typename T>
void col2im(const AlignedVector<T>& cols, const Conv2dSpec& s, int oh, int ow, Tensor4<T>& dx) {
  const std::size_t P = static_cast<std::size_t>(oh) * ow;
  std::size_t row = 0;
  for (int ci = 0; ci < s.in_channels; ++ci) {
    for (int i = 0; i < s.kernel_h; ++i) {
      for (int j = 0; j < s.kernel_w; ++j, ++row) {
        const T* src = cols.data() + row * P;
        for (int y = 0; y < oh; ++y) {
          const int iy = y * s.stride_h - s.pad_h + i * s.dilation_h;
          if (iy < 0 || iy >= dx.h) continue;
          T* dst = dx.data.data() + dx.index(ci, iy, 0);
          const T* sr = src + static_cast<std::size_t>(y) * ow;
          for (int xo = 0; xo < ow; ++xo) {
            const int ix = xo * s.stride_w - s.pad_w + j * s.dilation_w;
            if (ix >= 0 && ix < dx.w) dst[ix] += sr[xo];
          }
        }
      }
    }
  }
}

}  // namespace

namespace debug {
void set_flip_conv_grad_sign(bool enabled) { g_flip_conv_grad.store(enabled); }
bool flip_conv_grad_sign() { return g_flip_conv_grad.load(); }
}  // namespace debug

template <typename T>
Tensor4<T> conv2d_forward(const Tensor4<T>& input, const Conv2dSpec& spec,
                          std::span<const T> weight, std::span<const T> bias,
                          ConvCache<T>* cache) {
  check_conv_shapes(input.c, spec, weight.size(), bias.size());
  const int oh = spec.out_h(input.h);
  const int ow = spec.out_w(input.w);
  if (oh < 1 || ow < 1) {
    throw DimensionError("conv2d input " + input.shape_string() + " too small for the kernel");
  }
  AlignedVector<T> local;
  AlignedVector<T>& cols = cache ? cache->columns : local;
  im2col(input, spec, oh, ow, cols);

  const auto K = static_cast<Eigen::Index>(spec.weight_count() / spec.out_channels);
  const auto P = static_cast<Eigen::Index>(oh) * ow;
  const RowMat<T> w = aligned_copy(weight.data(), spec.out_channels, K);
  ConstMapMat<T> c(cols.data(), K, P);
  RowMat<T> o = w * c;
  Tensor4<T> out(spec.out_channels, oh, ow);
  for (int co = 0; co < spec.out_channels; ++co) {
    T* dst = out.data.data() + static_cast<std::size_t>(co) * P;
    for (Eigen::Index k = 0; k < P; ++k) dst[k] = o(co, k) + bias[co];
  }
  return out;
}

template <typename T>
void conv2d_backward(const Tensor4<T>& input, const Conv2dSpec& spec, std::span<const T> weight,
                     const Tensor4<T>& grad_output, const ConvCache<T>* cache,
                     Tensor4<T>* grad_input, std::span<T> grad_weight, std::span<T> grad_bias) {
  check_conv_shapes(input.c, spec, weight.size(), grad_bias.size());
  const int oh = spec.out_h(input.h);
  const int ow = spec.out_w(input.w);
  if (grad_output.c != spec.out_channels || grad_output.h != oh || grad_output.w != ow) {
    throw DimensionError("conv2d grad_output shape mismatch");
  }
  AlignedVector<T> local;
  const AlignedVector<T>* cols = cache ? &cache->columns : nullptr;
  if (cols == nullptr || cols->empty()) {
    im2col(input, spec, oh, ow, local);
    cols = &local;
  }
  const auto K = static_cast<Eigen::Index>(spec.weight_count() / spec.out_channels);
  const auto P = static_cast<Eigen::Index>(oh) * ow;
  const RowMat<T> g = aligned_copy(grad_output.data.data(), spec.out_channels, P);
  ConstMapMat<T> c(cols->data(), K, P);
  const RowMat<T> contrib = g * c.transpose();
  for (int co = 0; co < spec.out_channels; ++co) {
    for (Eigen::Index k = 0; k < K; ++k) grad_weight[static_cast<std::size_t>(co * K + k)] += contrib(co, k);
  }
  if (g_flip_conv_grad.load(std::memory_order_relaxed)) grad_weight[0] -= T(2) * contrib(0, 0);
  for (int co = 0; co < spec.out_channels; ++co) grad_bias[co] += g.row(co).sum();

  if (grad_input != nullptr) {
    const RowMat<T> w = aligned_copy(weight.data(), spec.out_channels, K);
    AlignedVector<T> dcols(static_cast<std::size_t>(K * P));
    MapMat<T> dc(dcols.data(), K, P);
    dc.noalias() = w.transpose() * g;
    *grad_input = Tensor4<T>(input.c, input.h, input.w);
    col2im(dcols, spec, oh, ow, *grad_input);
  }
}

template <typename T>
Tensor4<T> leaky_relu_forward(const Tensor4<T>& x, T slope) {
  Tensor4<T> y = x;
  for (auto& v : y.data) v = v >= T(0) ? v : slope * v;
  return y;
}

template <typename T>
Tensor4<T> leaky_relu_backward(const Tensor4<T>& x, const Tensor4<T>& grad_output, T slope) {
  if (!x.same_shape(grad_output)) throw DimensionError("leaky_relu grad shape mismatch");
  Tensor4<T> g = grad_output;
  for (std::size_t i = 0; i < g.data.size(); ++i) {
    if (x.data[i] < T(0)) g.data[i] *= slope;
  }
  return g;
}

template <typename T>
Tensor4<T> maxpool2d_forward(const Tensor4<T>& x, const Pool2dSpec& spec,
                             std::vector<std::size_t>* argmax) {
  const int oh = spec.out_h(x.h);
  const int ow = spec.out_w(x.w);
  if (oh < 1 || ow < 1) throw DimensionError("maxpool input " + x.shape_string() + " too small");
  Tensor4<T> out(x.c, oh, ow);
  if (argmax) argmax->assign(out.size(), 0);
  for (int ch = 0; ch < x.c; ++ch) {
    for (int y = 0; y < oh; ++y) {
      for (int xo = 0; xo < ow; ++xo) {
        T best = -std::numeric_limits<T>::infinity();
        std::size_t best_idx = 0;
        bool found = false;
        for (int i = 0; i < spec.kernel_h; ++i) {
          const int iy = y * spec.stride_h - spec.pad_h + i;
          if (iy < 0 || iy >= x.h) continue;
          for (int j = 0; j < spec.kernel_w; ++j) {
            const int ix = xo * spec.stride_w - spec.pad_w + j;
            if (ix < 0 || ix >= x.w) continue;
            const std::size_t idx = x.index(ch, iy, ix);
            if (!found || x.data[idx] > best) {
              best = x.data[idx];
              best_idx = idx;
              found = true;
            }
          }
        }
        const std::size_t o = out.index(ch, y, xo);
        out.data[o] = best;
        if (argmax) (*argmax)[o] = best_idx;
      }
    }
  }
  return out;
}

template <typename T>
Tensor4<T> maxpool2d_backward(const Tensor4<T>& x, const Pool2dSpec& spec,
                              const std::vector<std::size_t>& argmax,
                              const Tensor4<T>& grad_output) {
  if (grad_output.h != spec.out_h(x.h) || grad_output.w != spec.out_w(x.w) ||
      grad_output.c != x.c || argmax.size() != grad_output.size()) {
    throw DimensionError("maxpool grad shape mismatch");
  }
  Tensor4<T> g(x.c, x.h, x.w);
  for (std::size_t o = 0; o < grad_output.size(); ++o) g.data[argmax[o]] += grad_output.data[o];
  return g;
}

template <typename T>
Tensor4<T> collapse_freq(const Tensor4<T>& x) {
  // Row-major [C][H][W] and [C*H][1][W] share the same memory order.
  Tensor4<T> y;
  y.c = x.c * x.h;
  y.h = 1;
  y.w = x.w;
  y.data = x.data;
  return y;
}

template <typename T>
Tensor4<T> expand_freq(const Tensor4<T>& x, int channels, int height) {
  if (x.h != 1 || x.c != channels * height) throw DimensionError("expand_freq shape mismatch");
  Tensor4<T> y;
  y.c = channels;
  y.h = height;
  y.w = x.w;
  y.data = x.data;
  return y;
}

template <typename T>
T sigmoid(T z) {
  if (z >= T(0)) return T(1) / (T(1) + std::exp(-z));
  const T e = std::exp(z);
  return e / (T(1) + e);
}

template <typename T>
BceResult<T> bce_with_logits(std::span<const T> logits, std::span<const T> targets) {
  if (logits.size() != targets.size()) throw DimensionError("bce: length mismatch");
  if (logits.empty()) throw DimensionError("bce: empty input");
  BceResult<T> r;
  r.grad.resize(logits.size());
  const double inv_n = 1.0 / static_cast<double>(logits.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double z = logits[i];
    const double y = targets[i];
    if (!(y >= 0.0 && y <= 1.0)) throw DomainError("bce: target outside [0, 1]");
    acc += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
    r.grad[i] = static_cast<T>((sigmoid(z) - y) * inv_n);
  }
  r.loss = acc * inv_n;
  return r;
}

template <typename T>
void adam_step(std::vector<std::vector<T>>& params, const std::vector<std::vector<T>>& grads,
               AdamState<T>& state) {
  if (grads.size() != params.size()) throw DimensionError("adam: parameter count mismatch");
  if (state.m.empty()) {
    state.m.resize(params.size());
    state.v.resize(params.size());
    for (std::size_t p = 0; p < params.size(); ++p) {
      state.m[p].assign(params[p].size(), T(0));
      state.v[p].assign(params[p].size(), T(0));
    }
  }
  ++state.step;
  const auto& h = state.hyper;
  const double bc1 = 1.0 - std::pow(h.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(h.beta2, static_cast<double>(state.step));
  for (std::size_t p = 0; p < params.size(); ++p) {
    if (grads[p].size() != params[p].size() || state.m[p].size() != params[p].size()) {
      throw DimensionError("adam: tensor shape mismatch");
    }
    auto& theta = params[p];
    auto& m = state.m[p];
    auto& v = state.v[p];
    for (std::size_t i = 0; i < theta.size(); ++i) {
      const double g = grads[p][i];
      const double mi = h.beta1 * m[i] + (1.0 - h.beta1) * g;
      const double vi = h.beta2 * v[i] + (1.0 - h.beta2) * g * g;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double m_hat = mi / bc1;
      const double v_hat = vi / bc2;
      theta[i] = static_cast<T>(theta[i] - h.lr * m_hat / (std::sqrt(v_hat) + h.eps));
    }
  }
}

#define SSLMSEG_INSTANTIATE_LAYERS(T)                                                          \
  template Tensor4<T> conv2d_forward<T>(const Tensor4<T>&, const Conv2dSpec&,                 \
                                        std::span<const T>, std::span<const T>, ConvCache<T>*); \
  template void conv2d_backward<T>(const Tensor4<T>&, const Conv2dSpec&, std::span<const T>,   \
                                   const Tensor4<T>&, const ConvCache<T>*, Tensor4<T>*,        \
                                   std::span<T>, std::span<T>);                                \
  template Tensor4<T> leaky_relu_forward<T>(const Tensor4<T>&, T);                             \
  template Tensor4<T> leaky_relu_backward<T>(const Tensor4<T>&, const Tensor4<T>&, T);         \
  template Tensor4<T> maxpool2d_forward<T>(const Tensor4<T>&, const Pool2dSpec&,              \
                                           std::vector<std::size_t>*);                         \
  template Tensor4<T> maxpool2d_backward<T>(const Tensor4<T>&, const Pool2dSpec&,             \
                                            const std::vector<std::size_t>&, const Tensor4<T>&); \
  template Tensor4<T> collapse_freq<T>(const Tensor4<T>&);                                     \
  template Tensor4<T> expand_freq<T>(const Tensor4<T>&, int, int);                             \
  template T sigmoid<T>(T);                                                                    \
  template BceResult<T> bce_with_logits<T>(std::span<const T>, std::span<const T>);            \
  template void adam_step<T>(std::vector<std::vector<T>>&, const std::vector<std::vector<T>>&, \
                             AdamState<T>&);

SSLMSEG_INSTANTIATE_LAYERS(float)
SSLMSEG_INSTANTIATE_LAYERS(double)

}  // namespace sslmseg
