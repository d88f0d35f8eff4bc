#pragma once

#include <optional>
#include <vector>

#include "sesr/kernels.hpp"
#include "sesr/params.hpp"

// Composite layers of the SESR network: the channel-attention (squeeze and
// excitation) module, the SE residual block, the weight-shared recursive
// unit, and the per-scale reconstruction branch.

namespace sesr {

struct BlockOptions {
  double leaky_slope = 0.2;
  /// Apply a leaky rectifier between the bottleneck convolutions of the SE
  /// module (the SENet convention). When false the two 1x1 convolutions
  /// compose directly.
  bool se_inner_activation = true;
};

/// 1x1 bottleneck pair computing per-channel gains from channel means.
template <typename T>
struct SEModuleParams {
  int channels = 0;
  int bottleneck = 0;
  Param<T> down_w, down_b;  // 1x1, channels -> bottleneck
  Param<T> up_w, up_b;      // 1x1, bottleneck -> channels

  SEModuleParams() = default;
  SEModuleParams(int channels_, int bottleneck_);
  ConvSpec down_spec() const { return ConvSpec::conv(channels, bottleneck, 1); }
  ConvSpec up_spec() const { return ConvSpec::conv(bottleneck, channels, 1); }
};

template <typename T>
struct SECache {
  Shape4 input_shape;
  Tensor4<T> pooled;     // [n, C, 1, 1]
  Tensor4<T> down_pre;   // conv-down output before the inner activation
  Tensor4<T> down_post;  // input of conv-up
  Tensor4<T> gains;      // sigmoid output, in (0,1)
};

/// Gains for each channel of u: pool -> conv down -> (activation) ->
/// conv up -> sigmoid. Output shape [n, C, 1, 1].
template <typename T>
Tensor4<T> se_forward(const Tensor4<T>& u, const SEModuleParams<T>& p, const BlockOptions& opt,
                      SECache<T>* cache = nullptr);

/// Returns the gradient w.r.t. u and accumulates parameter gradients.
template <typename T>
Tensor4<T> se_backward(const SECache<T>& cache, SEModuleParams<T>& p, const BlockOptions& opt,
                       const Tensor4<T>& grad_gains);

/// Residual block: three 3x3/3x3/3x3(x4 channels) convolutions with leaky
/// rectifiers, optional channel attention on the residual, 1x1 transition
/// back to the base width, and the identity skip. No normalization layers.
template <typename T>
struct SEResBlockParams {
  int base = 64;
  int expanded = 256;
  Param<T> conv1_w, conv1_b;  // 3x3 base -> base
  Param<T> conv2_w, conv2_b;  // 3x3 base -> base
  Param<T> conv3_w, conv3_b;  // 3x3 base -> expanded
  std::optional<SEModuleParams<T>> se;  // absent for the plain ablation block
  Param<T> trans_w, trans_b;  // 1x1 expanded -> base

  SEResBlockParams() = default;
  SEResBlockParams(int base_, int expanded_, std::optional<int> se_bottleneck);
  ConvSpec conv1_spec() const { return ConvSpec::conv(base, base, 3, 1, 1); }
  ConvSpec conv2_spec() const { return ConvSpec::conv(base, base, 3, 1, 1); }
  ConvSpec conv3_spec() const { return ConvSpec::conv(base, expanded, 3, 1, 1); }
  ConvSpec trans_spec() const { return ConvSpec::conv(expanded, base, 1); }
};

template <typename T>
struct BlockCache {
  Tensor4<T> x;       // block input
  Tensor4<T> a1, z1;  // conv1 output, rectified
  Tensor4<T> a2, z2;  // conv2 output, rectified
  Tensor4<T> r;       // conv3 output (the residual before attention)
  Tensor4<T> scaled;  // channel-scaled residual (or r when no SE)
  SECache<T> se;
};

template <typename T>
Tensor4<T> se_resblock_forward(const Tensor4<T>& x, const SEResBlockParams<T>& p,
                               const BlockOptions& opt, BlockCache<T>* cache = nullptr);

template <typename T>
Tensor4<T> se_resblock_backward(const BlockCache<T>& cache, SEResBlockParams<T>& p,
                                const BlockOptions& opt, const Tensor4<T>& grad_out);

/// Applies the same block `depth` times. Parameter count does not grow with
/// depth; the backward sums parameter gradients across all applications.
template <typename T>
Tensor4<T> recursive_unit_forward(const Tensor4<T>& x, const SEResBlockParams<T>& p, int depth,
                                  const BlockOptions& opt,
                                  std::vector<BlockCache<T>>* caches = nullptr);

template <typename T>
Tensor4<T> recursive_unit_backward(const std::vector<BlockCache<T>>& caches,
                                   SEResBlockParams<T>& p, const BlockOptions& opt,
                                   const Tensor4<T>& grad_out);

/// One super-resolution branch: recursive unit, feature upscaling, residual
/// image prediction, and the global residual add on the cheaply upsampled
/// image.
template <typename T>
struct BranchParams {
  SEResBlockParams<T> block;
  Param<T> feat_deconv_w, feat_deconv_b;  // 4x4 stride 2, base -> base
  Param<T> res_conv_w, res_conv_b;        // 3x3, base -> 1
  Param<T> img_deconv_w, img_deconv_b;    // 4x4 stride 2, 1 -> 1

  BranchParams() = default;
  BranchParams(int base, int expanded, std::optional<int> se_bottleneck);
  ConvSpec feat_deconv_spec() const { return ConvSpec::deconv(block.base, block.base, 4, 2, 1); }
  ConvSpec res_conv_spec() const { return ConvSpec::conv(block.base, 1, 3, 1, 1); }
  ConvSpec img_deconv_spec() const { return ConvSpec::deconv(1, 1, 4, 2, 1); }
};

template <typename T>
struct BranchOut {
  Tensor4<T> hr_image;     // [n, 1, 2h, 2w]
  Tensor4<T> hr_features;  // [n, base, 2h, 2w]
};

template <typename T>
struct BranchCache {
  std::vector<BlockCache<T>> unit;
  Tensor4<T> unit_out;
  Tensor4<T> hr_features;
  Tensor4<T> lr_image;
};

template <typename T>
BranchOut<T> branch_reconstruct(const Tensor4<T>& features, const Tensor4<T>& lr_image,
                                const BranchParams<T>& p, int depth, const BlockOptions& opt,
                                BranchCache<T>* cache = nullptr);

template <typename T>
struct BranchGrads {
  Tensor4<T> features;
  Tensor4<T> lr_image;
};

/// grad_hr_features may be null when nothing downstream consumed the branch
/// feature output.
template <typename T>
BranchGrads<T> branch_backward(const BranchCache<T>& cache, BranchParams<T>& p,
                               const BlockOptions& opt, const Tensor4<T>& grad_hr_image,
                               const Tensor4<T>* grad_hr_features);

/// Appends the named parameters in a stable order.
template <typename T>
void collect_params(SEResBlockParams<T>& p, const std::string& prefix, ParamStore<T>& out);
template <typename T>
void collect_params(BranchParams<T>& p, const std::string& prefix, ParamStore<T>& out);

}  // namespace sesr
