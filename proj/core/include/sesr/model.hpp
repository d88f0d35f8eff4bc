#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sesr/layers.hpp"

namespace sesr {

enum class BlockKind { se, plain };

std::string to_string(BlockKind k);
BlockKind block_kind_from_string(const std::string& s);

/// Architecture hyperparameters. Defaults reproduce the published network:
/// depth-4 recursion, 64 base channels expanded x4 with a 16-wide attention
/// bottleneck, and the fixed x2/x4 progressive pyramid.
struct ModelConfig {
  int recursion_depth = 4;
  int base_channels = 64;
  int expansion = 4;
  int se_bottleneck = 16;
  std::vector<int> scales = {2, 4};
  double leaky_slope = 0.2;
  bool se_inner_activation = true;
  BlockKind block_kind = BlockKind::se;

  void validate() const;
  int expanded_channels() const { return base_channels * expansion; }
  BlockOptions block_options() const { return {leaky_slope, se_inner_activation}; }
  bool operator==(const ModelConfig&) const = default;
};

/// The two-branch progressive network: entry conv, x2 branch, then the x4
/// branch fed with the x2 branch's upscaled features and image.
template <typename T>
struct SESRModel {
  ModelConfig config;
  std::uint64_t seed = 0;
  Param<T> entry_w, entry_b;  // 3x3, 1 -> base
  BranchParams<T> branch2;
  BranchParams<T> branch4;

  ConvSpec entry_spec() const { return ConvSpec::conv(1, config.base_channels, 3, 1, 1); }

  /// Named parameter registry in construction (and checkpoint) order.
  ParamStore<T> params();
};

/// Deterministic build: identical (config, seed) give bitwise identical
/// parameters regardless of block kind overlaps.
template <typename T>
SESRModel<T> build_model(const ModelConfig& config, std::uint64_t seed);

template <typename To, typename From>
SESRModel<To> cast_model(const SESRModel<From>& m);

template <typename T>
struct PyramidOut {
  Tensor4<T> sr2;  // [n, 1, 2h, 2w]
  Tensor4<T> sr4;  // [n, 1, 4h, 4w]
};

template <typename T>
struct PyramidCache {
  Tensor4<T> lr;
  Tensor4<T> f0;
  BranchCache<T> b2, b4;
};

/// Runs the pyramid on a [n,1,h,w] luma tensor in [0,1]; outputs are not
/// clamped. h and w must be at least 8.
template <typename T>
PyramidOut<T> forward_pyramid(const SESRModel<T>& model, const Tensor4<T>& lr_y,
                              PyramidCache<T>* cache = nullptr);

/// Accumulates all parameter gradients and returns the gradient w.r.t. lr_y.
template <typename T>
Tensor4<T> pyramid_backward(SESRModel<T>& model, const PyramidCache<T>& cache,
                            const Tensor4<T>& grad_sr2, const Tensor4<T>& grad_sr4);

struct ParamCount {
  std::int64_t total = 0;
  std::map<std::string, std::int64_t> by_group;
};

template <typename T>
ParamCount count_params(SESRModel<T>& model);

extern template struct SESRModel<float>;
extern template struct SESRModel<double>;

}  // namespace sesr
