#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sesr/tensor.hpp"

namespace sesr {

/// A learnable tensor with its paired gradient buffer.
template <typename T>
struct Param {
  Tensor4<T> value;
  Tensor4<T> grad;

  Param() = default;
  explicit Param(Shape4 s) : value(s), grad(s) {}
};

template <typename T>
struct ParamRef {
  std::string name;
  Param<T>* param = nullptr;
};

/// Flat named view over a model's parameters; order is the model's
/// construction order and also the checkpoint group order.
template <typename T>
using ParamStore = std::vector<ParamRef<T>>;

template <typename T>
void zero_grads(const ParamStore<T>& store) {
  for (const auto& ref : store) ref.param->grad.fill(T(0));
}

template <typename T>
std::int64_t param_count(const ParamStore<T>& store) {
  std::int64_t total = 0;
  for (const auto& ref : store) total += ref.param->value.numel();
  return total;
}

std::uint64_t fnv1a64(std::string_view bytes);

/// FNV over the raw value bytes of every group, in store order.
template <typename T>
std::uint64_t value_checksum(const ParamStore<T>& store);

/// He-normal fill with the gain correction for a leaky rectifier:
/// std = sqrt(2 / ((1 + slope^2) * fan_in)). Deterministic per (seed, name).
template <typename T>
void fill_he_normal(Tensor4<T>& t, int fan_in, double leaky_slope, std::uint64_t seed,
                    std::string_view name);

/// The 4x4 stride-2 bilinear interpolation kernel; reproduces constants on
/// the interior of a 2x upsample. Expects a [c, c, 4, 4] or [1, 1, 4, 4]
/// tensor and writes the kernel on the diagonal channel pairs.
template <typename T>
void fill_bilinear_upsample(Tensor4<T>& t);

}  // namespace sesr
