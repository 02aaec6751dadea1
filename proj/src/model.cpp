#include "sslmseg/model.hpp"

#include <cmath>

#include "sslmseg/error.hpp"
#include "sslmseg/random.hpp"

namespace sslmseg {

ModelSpec::ModelSpec(int height) : input_height(height) {
  if (height < kMinInputHeight) {
    throw DimensionError("network input height must be >= " + std::to_string(kMinInputHeight) +
                         ", got " + std::to_string(height));
  }
  conv3.in_channels = conv2.out_channels * pooled_height();
}

template <typename T>
Model<T>::Model(int input_height) : spec_(input_height), params_(kParamCount) {
  const Conv2dSpec* convs[] = {&spec_.conv1, &spec_.conv2, &spec_.conv3, &spec_.conv4};
  for (std::size_t k = 0; k < 4; ++k) {
    params_[2 * k].assign(convs[k]->weight_count(), T(0));
    params_[2 * k + 1].assign(static_cast<std::size_t>(convs[k]->out_channels), T(0));
  }
}

template <typename T>
Model<T> Model<T>::initialized(int input_height, std::uint64_t seed) {
  Model m(input_height);
  Rng rng(seed);
  const Conv2dSpec* convs[] = {&m.spec_.conv1, &m.spec_.conv2, &m.spec_.conv3, &m.spec_.conv4};
  for (std::size_t k = 0; k < 4; ++k) {
    const auto& c = *convs[k];
    const double fan_in = static_cast<double>(c.in_channels) * c.kernel_h * c.kernel_w;
    const double bound = std::sqrt(6.0 / fan_in);
    for (auto& w : m.params_[2 * k]) w = static_cast<T>(rng.uniform(-bound, bound));
  }
  return m;
}

template <typename T>
const std::vector<std::string>& Model<T>::param_names() {
  static const std::vector<std::string> names = {
      "conv1.weight", "conv1.bias", "conv2.weight", "conv2.bias",
      "conv3.weight", "conv3.bias", "conv4.weight", "conv4.bias"};
  return names;
}

template <typename T>
std::size_t Model<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.size();
  return n;
}

template <typename T>
Tensor4<T> Model<T>::forward(const Tensor4<T>& input, Trace<T>* trace) const {
  if (input.c != 1 || input.h != spec_.input_height) {
    throw DimensionError("model expects [1x1x" + std::to_string(spec_.input_height) +
                         "xW] input, got " + input.shape_string());
  }
  if (input.w < 1) throw DimensionError("network input has no frames");
  Trace<T> local;
  Trace<T>& t = trace ? *trace : local;
  const bool keep = trace != nullptr;

  t.z1 = conv2d_forward<T>(input, spec_.conv1, param(conv1_w), param(conv1_b),
                           keep ? &t.cache1 : nullptr);
  t.a1 = leaky_relu_forward(t.z1);
  t.p1 = maxpool2d_forward(t.a1, spec_.pool, &t.pool_argmax);
  t.z2 = conv2d_forward<T>(t.p1, spec_.conv2, param(conv2_w), param(conv2_b),
                           keep ? &t.cache2 : nullptr);
  t.a2 = leaky_relu_forward(t.z2);
  t.c2 = collapse_freq(t.a2);
  t.z3 = conv2d_forward<T>(t.c2, spec_.conv3, param(conv3_w), param(conv3_b),
                           keep ? &t.cache3 : nullptr);
  t.a3 = leaky_relu_forward(t.z3);
  auto logits = conv2d_forward<T>(t.a3, spec_.conv4, param(conv4_w), param(conv4_b),
                                  keep ? &t.cache4 : nullptr);
  if (keep) t.input = input;
  return logits;
}

template <typename T>
std::vector<std::vector<T>> Model<T>::backward(const Trace<T>& t, std::span<const T> grad_logits,
                                               Tensor4<T>* grad_input) const {
  if (grad_logits.size() != static_cast<std::size_t>(t.a3.w)) {
    throw DimensionError("gradient length does not match the traced forward pass");
  }
  std::vector<std::vector<T>> grads(kParamCount);
  for (std::size_t p = 0; p < kParamCount; ++p) grads[p].assign(params_[p].size(), T(0));

  Tensor4<T> g4(1, 1, t.a3.w);
  g4.data.assign(grad_logits.begin(), grad_logits.end());

  Tensor4<T> g;
  conv2d_backward<T>(t.a3, spec_.conv4, param(conv4_w), g4, &t.cache4, &g, grads[conv4_w],
                     grads[conv4_b]);
  g = leaky_relu_backward(t.z3, g);
  Tensor4<T> gc;
  conv2d_backward<T>(t.c2, spec_.conv3, param(conv3_w), g, &t.cache3, &gc, grads[conv3_w],
                     grads[conv3_b]);
  g = expand_freq(gc, t.a2.c, t.a2.h);
  g = leaky_relu_backward(t.z2, g);
  Tensor4<T> gp;
  conv2d_backward<T>(t.p1, spec_.conv2, param(conv2_w), g, &t.cache2, &gp, grads[conv2_w],
                     grads[conv2_b]);
  g = maxpool2d_backward(t.a1, spec_.pool, t.pool_argmax, gp);
  g = leaky_relu_backward(t.z1, g);
  conv2d_backward<T>(t.input, spec_.conv1, param(conv1_w), g, &t.cache1, grad_input,
                     grads[conv1_w], grads[conv1_b]);
  return grads;
}

Tensor4<float> stack_inputs(std::span<const FeatureMatrix> inputs) {
  if (inputs.empty()) throw DimensionError("no network inputs to stack");
  const std::size_t cols = inputs.front().cols;
  std::size_t rows = 0;
  for (const auto& m : inputs) {
    if (m.cols != cols) {
      throw DimensionError("network inputs disagree on frame count (" + std::to_string(m.cols) +
                           " vs " + std::to_string(cols) + ")");
    }
    rows += m.rows;
  }
  Tensor4<float> t(1, static_cast<int>(rows), static_cast<int>(cols));
  auto dst = t.data.begin();
  for (const auto& m : inputs) dst = std::copy(m.values.begin(), m.values.end(), dst);
  return t;
}

template class Model<float>;
template class Model<double>;

}  // namespace sslmseg
