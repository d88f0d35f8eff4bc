#include "sesr/kernels.hpp"

#include <cblas.h>

#include <cmath>
#include <cstring>
#include <string>

namespace sesr {
namespace {

void gemm(bool trans_a, bool trans_b, int m, int n, int k, float alpha, const float* a, int lda,
          const float* b, int ldb, float beta, float* c, int ldc) {
  cblas_sgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

void gemm(bool trans_a, bool trans_b, int m, int n, int k, double alpha, const double* a, int lda,
          const double* b, int ldb, double beta, double* c, int ldc) {
  cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, m, n, k, alpha, a, lda, b, ldb, beta, c, ldc);
}

// Columns buffer layout: [ic*kh*kw, oh*ow] row-major, one batch sample at a time.
template <typename T>
void im2col(const Tensor4<T>& x, int n, const ConvSpec& s, int oh, int ow, T* col) {
  const int hw = oh * ow;
  for (int ic = 0; ic < s.in_channels; ++ic) {
    const T* src = x.plane(n, ic);
    for (int r = 0; r < s.kernel_h; ++r)
      for (int c = 0; c < s.kernel_w; ++c) {
        T* dst = col + ((std::size_t(ic) * s.kernel_h + r) * s.kernel_w + c) * hw;
        for (int i = 0; i < oh; ++i) {
          const int yy = i * s.stride - s.padding + r;
          if (yy < 0 || yy >= x.h()) {
            std::memset(dst + std::size_t(i) * ow, 0, sizeof(T) * ow);
            continue;
          }
          const T* row = src + std::size_t(yy) * x.w();
          for (int j = 0; j < ow; ++j) {
            const int xx = j * s.stride - s.padding + c;
            dst[std::size_t(i) * ow + j] = (xx < 0 || xx >= x.w()) ? T(0) : row[xx];
          }
        }
      }
  }
}

// Scatter-accumulate the columns buffer back into the input-shaped gradient.
template <typename T>
void col2im_accum(const T* col, const ConvSpec& s, int in_h, int in_w, int oh, int ow,
                  Tensor4<T>& gx, int n) {
  const int hw = oh * ow;
  for (int ic = 0; ic < s.in_channels; ++ic) {
    T* dst = gx.plane(n, ic);
    for (int r = 0; r < s.kernel_h; ++r)
      for (int c = 0; c < s.kernel_w; ++c) {
        const T* src = col + ((std::size_t(ic) * s.kernel_h + r) * s.kernel_w + c) * hw;
        for (int i = 0; i < oh; ++i) {
          const int yy = i * s.stride - s.padding + r;
          if (yy < 0 || yy >= in_h) continue;
          T* row = dst + std::size_t(yy) * in_w;
          for (int j = 0; j < ow; ++j) {
            const int xx = j * s.stride - s.padding + c;
            if (xx >= 0 && xx < in_w) row[xx] += src[std::size_t(i) * ow + j];
          }
        }
      }
  }
}

template <typename T>
void check_conv_args(const Tensor4<T>& input, const Tensor4<T>& weights,
                     std::span<const T> bias, const ConvSpec& spec) {
  spec.validate();
  if (!(weights.shape() == spec.weight_shape()))
    throw shape_error("conv weights shape " + weights.shape().str() + " does not match spec " +
                      spec.weight_shape().str());
  if (input.c() != spec.in_channels)
    throw shape_error("conv input has " + std::to_string(input.c()) + " channels, spec needs " +
                      std::to_string(spec.in_channels));
  if (!bias.empty() && int(bias.size()) != spec.out_channels)
    throw shape_error("conv bias length " + std::to_string(bias.size()) + " != out_channels " +
                      std::to_string(spec.out_channels));
}

// Core of the ordinary convolution; bias applied by the caller.
// out[oc, L] = W[oc, K] * col[K, L] per sample.
template <typename T>
Tensor4<T> conv_fwd_core(const Tensor4<T>& x, const Tensor4<T>& w, const ConvSpec& s) {
  const int oh = s.out_h(x.h());
  const int ow = s.out_w(x.w());
  const int K = s.in_channels * s.kernel_h * s.kernel_w;
  const int L = oh * ow;
  Tensor4<T> y({x.n(), s.out_channels, oh, ow});
  std::vector<T> col(std::size_t(K) * L);
  for (int n = 0; n < x.n(); ++n) {
    im2col(x, n, s, oh, ow, col.data());
    gemm(false, false, s.out_channels, L, K, T(1), w.flat().data(), K, col.data(), L, T(0),
         y.plane(n, 0), L);
  }
  return y;
}

// Gradient w.r.t. the conv input: col[K, L] = W^T[K, oc] * gy[oc, L], then col2im.
template <typename T>
Tensor4<T> conv_bwd_input_core(const Shape4& in_shape, const Tensor4<T>& w, const ConvSpec& s,
                               const Tensor4<T>& gy) {
  const int oh = gy.h();
  const int ow = gy.w();
  const int K = s.in_channels * s.kernel_h * s.kernel_w;
  const int L = oh * ow;
  Tensor4<T> gx(in_shape);
  std::vector<T> col(std::size_t(K) * L);
  for (int n = 0; n < in_shape.n; ++n) {
    gemm(true, false, K, L, s.out_channels, T(1), w.flat().data(), K, gy.plane(n, 0), L, T(0),
         col.data(), L);
    col2im_accum(col.data(), s, in_shape.h, in_shape.w, oh, ow, gx, n);
  }
  return gx;
}

// Gradient w.r.t. the conv weights: gW[oc, K] += gy[oc, L] * col[K, L]^T.
template <typename T>
Tensor4<T> conv_bwd_weights_core(const Tensor4<T>& x, const ConvSpec& s, const Tensor4<T>& gy) {
  const int oh = gy.h();
  const int ow = gy.w();
  const int K = s.in_channels * s.kernel_h * s.kernel_w;
  const int L = oh * ow;
  Tensor4<T> gw(Shape4{s.out_channels, s.in_channels, s.kernel_h, s.kernel_w});
  std::vector<T> col(std::size_t(K) * L);
  for (int n = 0; n < x.n(); ++n) {
    im2col(x, n, s, oh, ow, col.data());
    gemm(false, true, s.out_channels, K, L, T(1), gy.plane(n, 0), L, col.data(), L, T(1),
         gw.flat().data(), K);
  }
  return gw;
}

template <typename T>
std::vector<T> bias_grad(const Tensor4<T>& gy) {
  std::vector<T> gb(gy.c(), T(0));
  for (int n = 0; n < gy.n(); ++n)
    for (int c = 0; c < gy.c(); ++c) {
      const T* p = gy.plane(n, c);
      double acc = 0.0;
      for (int i = 0; i < gy.h() * gy.w(); ++i) acc += double(p[i]);
      gb[c] += T(acc);
    }
  return gb;
}

template <typename T>
void add_bias(Tensor4<T>& y, std::span<const T> bias) {
  if (bias.empty()) return;
  for (int n = 0; n < y.n(); ++n)
    for (int c = 0; c < y.c(); ++c) {
      T* p = y.plane(n, c);
      for (int i = 0; i < y.h() * y.w(); ++i) p[i] += bias[c];
    }
}

// A transposed conv with spec s is the input-gradient of an ordinary conv
// running the other way. equiv_spec describes that ordinary conv; the weight
// tensor [ic, oc, kh, kw] is reused in place as its [oc', ic', kh, kw].
ConvSpec equiv_conv_spec(const ConvSpec& s) {
  ConvSpec e = s;
  e.transposed = false;
  e.in_channels = s.out_channels;
  e.out_channels = s.in_channels;
  return e;
}

}  // namespace

template <typename T>
Tensor4<T> conv2d(const Tensor4<T>& input, const Tensor4<T>& weights, std::span<const T> bias,
                  const ConvSpec& spec) {
  if (spec.transposed) throw config_error("conv2d called with a transposed spec");
  check_conv_args(input, weights, bias, spec);
  Tensor4<T> y = conv_fwd_core(input, weights, spec);
  add_bias(y, bias);
  return y;
}

template <typename T>
ConvGrads<T> conv2d_backward(const Tensor4<T>& input, const Tensor4<T>& weights,
                             const ConvSpec& spec, const Tensor4<T>& grad_out, bool has_bias) {
  if (spec.transposed) throw config_error("conv2d_backward called with a transposed spec");
  check_conv_args(input, weights, std::span<const T>{}, spec);
  const Shape4 expect{input.n(), spec.out_channels, spec.out_h(input.h()), spec.out_w(input.w())};
  if (!(grad_out.shape() == expect))
    throw shape_error("conv2d_backward: grad_out shape " + grad_out.shape().str() +
                      " != " + expect.str());
  ConvGrads<T> g;
  g.input = conv_bwd_input_core(input.shape(), weights, spec, grad_out);
  g.weights = conv_bwd_weights_core(input, spec, grad_out);
  if (has_bias) g.bias = bias_grad(grad_out);
  return g;
}

template <typename T>
Tensor4<T> conv_transpose2d(const Tensor4<T>& input, const Tensor4<T>& weights,
                            std::span<const T> bias, const ConvSpec& spec) {
  if (!spec.transposed) throw config_error("conv_transpose2d needs spec.transposed = true");
  check_conv_args(input, weights, bias, spec);
  const ConvSpec e = equiv_conv_spec(spec);
  const Shape4 out_shape{input.n(), spec.out_channels, spec.out_size(input.h(), spec.kernel_h),
                         spec.out_size(input.w(), spec.kernel_w)};
  Tensor4<T> y = conv_bwd_input_core(out_shape, weights, e, input);
  add_bias(y, bias);
  return y;
}

template <typename T>
ConvGrads<T> conv_transpose2d_backward(const Tensor4<T>& input, const Tensor4<T>& weights,
                                       const ConvSpec& spec, const Tensor4<T>& grad_out,
                                       bool has_bias) {
  if (!spec.transposed) throw config_error("conv_transpose2d_backward needs transposed spec");
  check_conv_args(input, weights, std::span<const T>{}, spec);
  const Shape4 expect{input.n(), spec.out_channels, spec.out_size(input.h(), spec.kernel_h),
                      spec.out_size(input.w(), spec.kernel_w)};
  if (!(grad_out.shape() == expect))
    throw shape_error("conv_transpose2d_backward: grad_out shape " + grad_out.shape().str() +
                      " != " + expect.str());
  const ConvSpec e = equiv_conv_spec(spec);
  ConvGrads<T> g;
  g.input = conv_fwd_core(grad_out, weights, e);
  g.weights = conv_bwd_weights_core(grad_out, e, input);
  if (has_bias) g.bias = bias_grad(grad_out);
  return g;
}

template <typename T>
Tensor4<T> leaky_relu(const Tensor4<T>& input, T slope) {
  if (!(slope >= T(0) && slope < T(1)))
    throw config_error("leaky_relu: slope must be in [0, 1)");
  Tensor4<T> y(input.shape());
  auto src = input.flat();
  auto dst = y.flat();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] > T(0) ? src[i] : slope * src[i];
  return y;
}

template <typename T>
Tensor4<T> leaky_relu_backward(const Tensor4<T>& input, const Tensor4<T>& grad_out, T slope) {
  if (!(input.shape() == grad_out.shape()))
    throw shape_error("leaky_relu_backward: shape mismatch");
  Tensor4<T> g(input.shape());
  auto x = input.flat();
  auto gy = grad_out.flat();
  auto gx = g.flat();
  for (std::size_t i = 0; i < x.size(); ++i) gx[i] = x[i] > T(0) ? gy[i] : slope * gy[i];
  return g;
}

template <typename T>
Tensor4<T> sigmoid(const Tensor4<T>& input) {
  Tensor4<T> y(input.shape());
  auto src = input.flat();
  auto dst = y.flat();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = T(1) / (T(1) + std::exp(-src[i]));
  return y;
}

template <typename T>
Tensor4<T> sigmoid_backward(const Tensor4<T>& output, const Tensor4<T>& grad_out) {
  if (!(output.shape() == grad_out.shape()))
    throw shape_error("sigmoid_backward: shape mismatch");
  Tensor4<T> g(output.shape());
  auto y = output.flat();
  auto gy = grad_out.flat();
  auto gx = g.flat();
  for (std::size_t i = 0; i < y.size(); ++i) gx[i] = gy[i] * y[i] * (T(1) - y[i]);
  return g;
}

template <typename T>
Tensor4<T> global_avg_pool(const Tensor4<T>& input) {
  Tensor4<T> y({input.n(), input.c(), 1, 1});
  const double inv = 1.0 / (double(input.h()) * input.w());
  for (int n = 0; n < input.n(); ++n)
    for (int c = 0; c < input.c(); ++c) {
      const T* p = input.plane(n, c);
      double acc = 0.0;
      for (int i = 0; i < input.h() * input.w(); ++i) acc += double(p[i]);
      y.at(n, c, 0, 0) = T(acc * inv);
    }
  return y;
}

template <typename T>
Tensor4<T> global_avg_pool_backward(const Shape4& input_shape, const Tensor4<T>& grad_out) {
  if (grad_out.n() != input_shape.n || grad_out.c() != input_shape.c || grad_out.h() != 1 ||
      grad_out.w() != 1)
    throw shape_error("global_avg_pool_backward: grad_out must be [n,c,1,1]");
  Tensor4<T> g(input_shape);
  const T inv = T(1.0 / (double(input_shape.h) * input_shape.w));
  for (int n = 0; n < input_shape.n; ++n)
    for (int c = 0; c < input_shape.c; ++c) {
      const T v = grad_out.at(n, c, 0, 0) * inv;
      T* p = g.plane(n, c);
      for (int i = 0; i < input_shape.h * input_shape.w; ++i) p[i] = v;
    }
  return g;
}

template <typename T>
Tensor4<T> channel_scale(const Tensor4<T>& input, const Tensor4<T>& gains) {
  if (gains.n() != input.n() || gains.c() != input.c() || gains.h() != 1 || gains.w() != 1)
    throw shape_error("channel_scale: gains must be [n,c,1,1] matching input " +
                      input.shape().str() + ", got " + gains.shape().str());
  Tensor4<T> y(input.shape());
  for (int n = 0; n < input.n(); ++n)
    for (int c = 0; c < input.c(); ++c) {
      const T g = gains.at(n, c, 0, 0);
      const T* src = input.plane(n, c);
      T* dst = y.plane(n, c);
      for (int i = 0; i < input.h() * input.w(); ++i) dst[i] = src[i] * g;
    }
  return y;
}

template <typename T>
ChannelScaleGrads<T> channel_scale_backward(const Tensor4<T>& input, const Tensor4<T>& gains,
                                            const Tensor4<T>& grad_out) {
  if (!(grad_out.shape() == input.shape()))
    throw shape_error("channel_scale_backward: grad_out shape mismatch");
  ChannelScaleGrads<T> g{Tensor4<T>(input.shape()), Tensor4<T>(gains.shape())};
  for (int n = 0; n < input.n(); ++n)
    for (int c = 0; c < input.c(); ++c) {
      const T gain = gains.at(n, c, 0, 0);
      const T* x = input.plane(n, c);
      const T* gy = grad_out.plane(n, c);
      T* gx = g.input.plane(n, c);
      double acc = 0.0;
      for (int i = 0; i < input.h() * input.w(); ++i) {
        gx[i] = gy[i] * gain;
        acc += double(gy[i]) * double(x[i]);
      }
      g.gains.at(n, c, 0, 0) = T(acc);
    }
  return g;
}

template <typename T>
Tensor4<T> add(const Tensor4<T>& a, const Tensor4<T>& b) {
  if (!(a.shape() == b.shape()))
    throw shape_error("add: shape mismatch " + a.shape().str() + " vs " + b.shape().str());
  Tensor4<T> y(a.shape());
  auto fa = a.flat();
  auto fb = b.flat();
  auto fy = y.flat();
  for (std::size_t i = 0; i < fa.size(); ++i) fy[i] = fa[i] + fb[i];
  return y;
}

template <typename T>
void add_inplace(Tensor4<T>& dst, const Tensor4<T>& src) {
  if (!(dst.shape() == src.shape())) throw shape_error("add_inplace: shape mismatch");
  auto d = dst.flat();
  auto s = src.flat();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

template <typename T>
void scale_inplace(Tensor4<T>& t, T factor) {
  for (T& v : t.flat()) v *= factor;
}

#define SESR_INSTANTIATE_KERNELS(T)                                                             \
  template Tensor4<T> conv2d<T>(const Tensor4<T>&, const Tensor4<T>&, std::span<const T>,       \
                                const ConvSpec&);                                               \
  template ConvGrads<T> conv2d_backward<T>(const Tensor4<T>&, const Tensor4<T>&,                \
                                           const ConvSpec&, const Tensor4<T>&, bool);           \
  template Tensor4<T> conv_transpose2d<T>(const Tensor4<T>&, const Tensor4<T>&,                 \
                                          std::span<const T>, const ConvSpec&);                 \
  template ConvGrads<T> conv_transpose2d_backward<T>(const Tensor4<T>&, const Tensor4<T>&,      \
                                                     const ConvSpec&, const Tensor4<T>&, bool); \
  template Tensor4<T> leaky_relu<T>(const Tensor4<T>&, T);                                      \
  template Tensor4<T> leaky_relu_backward<T>(const Tensor4<T>&, const Tensor4<T>&, T);          \
  template Tensor4<T> sigmoid<T>(const Tensor4<T>&);                                            \
  template Tensor4<T> sigmoid_backward<T>(const Tensor4<T>&, const Tensor4<T>&);                \
  template Tensor4<T> global_avg_pool<T>(const Tensor4<T>&);                                    \
  template Tensor4<T> global_avg_pool_backward<T>(const Shape4&, const Tensor4<T>&);            \
  template Tensor4<T> channel_scale<T>(const Tensor4<T>&, const Tensor4<T>&);                   \
  template ChannelScaleGrads<T> channel_scale_backward<T>(const Tensor4<T>&, const Tensor4<T>&, \
                                                          const Tensor4<T>&);                   \
  template Tensor4<T> add<T>(const Tensor4<T>&, const Tensor4<T>&);                             \
  template void add_inplace<T>(Tensor4<T>&, const Tensor4<T>&);                                 \
  template void scale_inplace<T>(Tensor4<T>&, T);

SESR_INSTANTIATE_KERNELS(float)
SESR_INSTANTIATE_KERNELS(double)

}  // namespace sesr
