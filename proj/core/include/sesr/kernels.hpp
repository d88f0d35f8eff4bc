#pragma once

#include <span>
#include <vector>

#include "sesr/tensor.hpp"

// Differentiable numeric kernels. Each forward has a paired backward that maps
// the upstream gradient to gradients of every input. Kernels are pure
// functions: no hidden state, identical inputs give identical outputs.

namespace sesr {

template <typename T>
struct ConvGrads {
  Tensor4<T> input;
  Tensor4<T> weights;
  std::vector<T> bias;  // empty when the forward ran without bias
};

/// Cross-correlation. weights [oc, ic, kh, kw]; bias has out_channels entries
/// or is empty.
template <typename T>
Tensor4<T> conv2d(const Tensor4<T>& input, const Tensor4<T>& weights, std::span<const T> bias,
                  const ConvSpec& spec);

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor4<T>& input, const Tensor4<T>& weights,
                             const ConvSpec& spec, const Tensor4<T>& grad_out, bool has_bias);

/// Fractionally strided (gradient-of-convolution) semantics.
/// weights [ic, oc, kh, kw].
template <typename T>
Tensor4<T> conv_transpose2d(const Tensor4<T>& input, const Tensor4<T>& weights,
                            std::span<const T> bias, const ConvSpec& spec);

template <typename T>
ConvGrads<T> conv_transpose2d_backward(const Tensor4<T>& input, const Tensor4<T>& weights,
                                       const ConvSpec& spec, const Tensor4<T>& grad_out,
                                       bool has_bias);

/// max(x, slope*x) elementwise, 0 <= slope < 1.
template <typename T>
Tensor4<T> leaky_relu(const Tensor4<T>& input, T slope);

template <typename T>
Tensor4<T> leaky_relu_backward(const Tensor4<T>& input, const Tensor4<T>& grad_out, T slope);

template <typename T>
Tensor4<T> sigmoid(const Tensor4<T>& input);

/// Backward from the forward *output* y: dy/dx = y*(1-y).
template <typename T>
Tensor4<T> sigmoid_backward(const Tensor4<T>& output, const Tensor4<T>& grad_out);

/// Per-channel spatial mean, output [n, c, 1, 1].
template <typename T>
Tensor4<T> global_avg_pool(const Tensor4<T>& input);

template <typename T>
Tensor4<T> global_avg_pool_backward(const Shape4& input_shape, const Tensor4<T>& grad_out);

/// Broadcast multiply of [n,c,h,w] by per-channel gains [n,c,1,1].
template <typename T>
Tensor4<T> channel_scale(const Tensor4<T>& input, const Tensor4<T>& gains);

template <typename T>
struct ChannelScaleGrads {
  Tensor4<T> input;
  Tensor4<T> gains;
};

template <typename T>
ChannelScaleGrads<T> channel_scale_backward(const Tensor4<T>& input, const Tensor4<T>& gains,
                                            const Tensor4<T>& grad_out);

/// Elementwise sum of identically shaped tensors.
template <typename T>
Tensor4<T> add(const Tensor4<T>& a, const Tensor4<T>& b);

template <typename T>
void add_inplace(Tensor4<T>& dst, const Tensor4<T>& src);

template <typename T>
void scale_inplace(Tensor4<T>& t, T factor);

}  // namespace sesr
