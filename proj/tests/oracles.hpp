// Brute-force reference implementations used to validate the production
// kernels. Everything here is written as plain nested loops with no shared
// code paths with core/src/kernels.cpp.
#pragma once

#include <cmath>
#include <vector>

#include "sesr/tensor.hpp"

namespace oracle {

using sesr::ConvSpec;
using sesr::Shape4;
using sesr::Tensor4;

// Direct six-nested-loop cross-correlation. Zero padding, square stride.
template <typename T>
Tensor4<T> conv2d_ref(const Tensor4<T>& x, const Tensor4<T>& w, const std::vector<T>& bias,
                      const ConvSpec& s) {
  const int oh = (x.h() + 2 * s.padding - s.kernel_h) / s.stride + 1;
  const int ow = (x.w() + 2 * s.padding - s.kernel_w) / s.stride + 1;
  Tensor4<T> y({x.n(), s.out_channels, oh, ow});
  for (int n = 0; n < x.n(); ++n)
    for (int oc = 0; oc < s.out_channels; ++oc)
      for (int i = 0; i < oh; ++i)
        for (int j = 0; j < ow; ++j) {
          double acc = bias.empty() ? 0.0 : double(bias[oc]);
          for (int ic = 0; ic < s.in_channels; ++ic)
            for (int r = 0; r < s.kernel_h; ++r)
              for (int c = 0; c < s.kernel_w; ++c) {
                int yy = i * s.stride - s.padding + r;
                int xx = j * s.stride - s.padding + c;
                if (yy < 0 || yy >= x.h() || xx < 0 || xx >= x.w()) continue;
                acc += double(x.at(n, ic, yy, xx)) * double(w.at(oc, ic, r, c));
              }
          y.at(n, oc, i, j) = T(acc);
        }
  return y;
}

// Scatter-accumulate transposed convolution. Weights are [ic, oc, kh, kw].
template <typename T>
Tensor4<T> conv_transpose2d_ref(const Tensor4<T>& x, const Tensor4<T>& w,
                                const std::vector<T>& bias, const ConvSpec& s) {
  const int oh = (x.h() - 1) * s.stride - 2 * s.padding + s.kernel_h;
  const int ow = (x.w() - 1) * s.stride - 2 * s.padding + s.kernel_w;
  Tensor4<T> y({x.n(), s.out_channels, oh, ow});
  for (int n = 0; n < x.n(); ++n) {
    for (int oc = 0; oc < s.out_channels; ++oc)
      for (int i = 0; i < oh; ++i)
        for (int j = 0; j < ow; ++j) y.at(n, oc, i, j) = bias.empty() ? T(0) : bias[oc];
    for (int ic = 0; ic < s.in_channels; ++ic)
      for (int i = 0; i < x.h(); ++i)
        for (int j = 0; j < x.w(); ++j)
          for (int oc = 0; oc < s.out_channels; ++oc)
            for (int r = 0; r < s.kernel_h; ++r)
              for (int c = 0; c < s.kernel_w; ++c) {
                int yy = i * s.stride - s.padding + r;
                int xx = j * s.stride - s.padding + c;
                if (yy < 0 || yy >= oh || xx < 0 || xx >= ow) continue;
                y.at(n, oc, yy, xx) += x.at(n, ic, i, j) * w.at(ic, oc, r, c);
              }
  }
  return y;
}

// Per-channel mean via a plain double-loop summation.
template <typename T>
Tensor4<T> global_avg_pool_ref(const Tensor4<T>& x) {
  Tensor4<T> y({x.n(), x.c(), 1, 1});
  for (int n = 0; n < x.n(); ++n)
    for (int c = 0; c < x.c(); ++c) {
      double acc = 0.0;
      for (int i = 0; i < x.h(); ++i)
        for (int j = 0; j < x.w(); ++j) acc += double(x.at(n, c, i, j));
      y.at(n, c, 0, 0) = T(acc / (double(x.h()) * x.w()));
    }
  return y;
}

template <typename T>
double max_rel_diff(const Tensor4<T>& a, const Tensor4<T>& b, double floor = 1e-12) {
  if (!(a.shape() == b.shape())) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  auto fa = a.flat();
  auto fb = b.flat();
  for (std::size_t i = 0; i < fa.size(); ++i) {
    double den = std::max({std::abs(double(fa[i])), std::abs(double(fb[i])), floor});
    worst = std::max(worst, std::abs(double(fa[i]) - double(fb[i])) / den);
  }
  return worst;
}

}  // namespace oracle
