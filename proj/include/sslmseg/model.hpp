#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sslmseg/feature_matrix.hpp"
#include "sslmseg/layers.hpp"

namespace sslmseg {

/// Layer geometry of the boundary network for a given input height.
struct ModelSpec {
  int input_height = 80;
  Conv2dSpec conv1{1, 32, 5, 7, 1, 1, 2, 3, 1, 1};
  Pool2dSpec pool{5, 3, 5, 1, 1, 1};
  Conv2dSpec conv2{32, 64, 3, 5, 1, 1, 1, 6, 1, 3};
  Conv2dSpec conv3{0, 128, 1, 1};
  Conv2dSpec conv4{128, 1, 1, 1};

  explicit ModelSpec(int height = 80);
  int pooled_height() const { return pool.out_h(input_height); }
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

inline constexpr int kMinInputHeight = 3;

/// Intermediate activations kept for the backward pass.
template <typename T>
struct Trace {
  Tensor4<T> input;
  Tensor4<T> z1, a1;
  std::vector<std::size_t> pool_argmax;
  Tensor4<T> p1;
  Tensor4<T> z2, a2;
  Tensor4<T> c2;
  Tensor4<T> z3, a3;
  ConvCache<T> cache1, cache2, cache3, cache4;
};

template <typename T>
class Model {
 public:
  enum Param : std::size_t { conv1_w, conv1_b, conv2_w, conv2_b, conv3_w, conv3_b, conv4_w, conv4_b };
  static constexpr std::size_t kParamCount = 8;

  /// Zero-initialised parameters.
  explicit Model(int input_height = 80);
  /// He-uniform weights (bound sqrt(6 / fan_in)), zero biases.
  static Model initialized(int input_height, std::uint64_t seed);

  const ModelSpec& spec() const { return spec_; }
  int input_height() const { return spec_.input_height; }

  static const std::vector<std::string>& param_names();
  std::vector<std::vector<T>>& params() { return params_; }
  const std::vector<std::vector<T>>& params() const { return params_; }
  std::span<const T> param(Param p) const { return params_[p]; }
  std::size_t parameter_count() const;

  /// Logits of shape [1 x 1 x 1 x W].
  Tensor4<T> forward(const Tensor4<T>& input, Trace<T>* trace = nullptr) const;
  /// Parameter gradients for d loss / d logits; writes d loss / d input when non-null.
  std::vector<std::vector<T>> backward(const Trace<T>& trace, std::span<const T> grad_logits,
                                       Tensor4<T>* grad_input = nullptr) const;

  template <typename U>
  Model<U> cast() const {
    Model<U> out(spec_.input_height);
    for (std::size_t p = 0; p < kParamCount; ++p) {
      out.params()[p].assign(params_[p].begin(), params_[p].end());
    }
    return out;
  }

  friend bool operator==(const Model&, const Model&) = default;

 private:
  ModelSpec spec_;
  std::vector<std::vector<T>> params_;
};

/// Single-channel network input: finalized matrices stacked along the height axis.
Tensor4<float> stack_inputs(std::span<const FeatureMatrix> inputs);

template <typename T>
Tensor4<T> to_tensor(const FeatureMatrix& m) {
  Tensor4<T> t(1, static_cast<int>(m.rows), static_cast<int>(m.cols));
  t.data.assign(m.values.begin(), m.values.end());
  return t;
}

}  // namespace sslmseg
