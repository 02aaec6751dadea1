#pragma once

#include <cstddef>
#include <new>
#include <string>
#include <vector>

#include "sslmseg/error.hpp"

namespace sslmseg {

/// 64-byte aligned storage. Vectorised kernels pick their summation order from
/// the data address, so scratch buffers use this to keep results reproducible.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T* p, std::size_t) { ::operator delete(p, kAlign); }

  template <typename U>
  friend bool operator==(const AlignedAllocator&, const AlignedAllocator<U>&) {
    return true;
  }
};

template <typename T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

/// Dense [batch x channels x height x width] tensor, row-major.
template <typename T>
struct Tensor4 {
  int n = 1;
  int c = 0;
  int h = 0;
  int w = 0;
  std::vector<T> data;

  Tensor4() = default;
  Tensor4(int channels, int height, int width, T fill = T(0))
      : c(channels), h(height), w(width),
        data(static_cast<std::size_t>(channels) * height * width, fill) {}

  std::size_t size() const { return data.size(); }
  std::size_t index(int ch, int y, int x) const {
    return (static_cast<std::size_t>(ch) * h + y) * w + x;
  }
  T& at(int ch, int y, int x) { return data[index(ch, y, x)]; }
  T at(int ch, int y, int x) const { return data[index(ch, y, x)]; }

  bool same_shape(const Tensor4& o) const { return n == o.n && c == o.c && h == o.h && w == o.w; }
  std::string shape_string() const {
    return "[" + std::to_string(n) + "x" + std::to_string(c) + "x" + std::to_string(h) + "x" +
           std::to_string(w) + "]";
  }
};

}  // namespace sslmseg
