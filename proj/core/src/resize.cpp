#include "sesr/resize.hpp"

#include <cmath>
#include <vector>

namespace sesr {
namespace {

// Keys cubic interpolation kernel with a = -0.5.
double cubic(double x) {
  const double ax = std::abs(x);
  if (ax <= 1.0) return (1.5 * ax - 2.5) * ax * ax + 1.0;
  if (ax < 2.0) return ((-0.5 * ax + 2.5) * ax - 4.0) * ax + 2.0;
  return 0.0;
}

struct Taps {
  int support = 0;                // taps per output sample
  std::vector<int> indices;      // [out * support], clamped via mirror
  std::vector<double> weights;   // [out * support], rows sum to 1
};

// Sample positions follow the align-to-pixel-centers mapping
// u = (j+1)/scale + 0.5*(1 - 1/scale) in 1-based input coordinates, with
// mirrored indices at the borders.
Taps make_taps(int in_len, int out_len, double scale, bool antialias) {
  const bool shrink = scale < 1.0 && antialias;
  const double kscale = shrink ? scale : 1.0;
  const double width = 4.0 / kscale;
  const int support = int(std::ceil(width)) + 2;

  Taps taps;
  taps.support = support;
  taps.indices.resize(std::size_t(out_len) * support);
  taps.weights.resize(std::size_t(out_len) * support);

  for (int j = 0; j < out_len; ++j) {
    const double u = (j + 1) / scale + 0.5 * (1.0 - 1.0 / scale);
    const int left = int(std::floor(u - width / 2.0));
    double sum = 0.0;
    for (int t = 0; t < support; ++t) {
      const int idx = left + t;  // 1-based, may run outside [1, in_len]
      const double w = kscale * cubic(kscale * (u - idx));
      taps.weights[std::size_t(j) * support + t] = w;
      sum += w;
      // Mirror with edge duplication: 1..n, n..1, repeating.
      int m = (idx - 1) % (2 * in_len);
      if (m < 0) m += 2 * in_len;
      taps.indices[std::size_t(j) * support + t] = m < in_len ? m : 2 * in_len - 1 - m;
    }
    for (int t = 0; t < support; ++t) taps.weights[std::size_t(j) * support + t] /= sum;
  }
  return taps;
}

// Resample along rows (dim 0) of a rows x cols buffer.
std::vector<double> resample_rows(const std::vector<double>& src, int rows, int cols,
                                  const Taps& taps, int out_rows) {
  std::vector<double> dst(std::size_t(out_rows) * cols, 0.0);
  for (int i = 0; i < out_rows; ++i) {
    double* out_row = dst.data() + std::size_t(i) * cols;
    for (int t = 0; t < taps.support; ++t) {
      const double w = taps.weights[std::size_t(i) * taps.support + t];
      const double* in_row =
          src.data() + std::size_t(taps.indices[std::size_t(i) * taps.support + t]) * cols;
      for (int j = 0; j < cols; ++j) out_row[j] += w * in_row[j];
    }
  }
  (void)rows;
  return dst;
}

std::vector<double> resample_cols(const std::vector<double>& src, int rows, int cols,
                                  const Taps& taps, int out_cols) {
  std::vector<double> dst(std::size_t(rows) * out_cols, 0.0);
  for (int i = 0; i < rows; ++i) {
    const double* in_row = src.data() + std::size_t(i) * cols;
    double* out_row = dst.data() + std::size_t(i) * out_cols;
    for (int j = 0; j < out_cols; ++j) {
      double acc = 0.0;
      for (int t = 0; t < taps.support; ++t)
        acc += taps.weights[std::size_t(j) * taps.support + t] *
               in_row[taps.indices[std::size_t(j) * taps.support + t]];
      out_row[j] = acc;
    }
  }
  return dst;
}

}  // namespace

ImagePlane imresize_bicubic(const ImagePlane& plane, double scale, const ResizeOptions& opts) {
  if (!(scale > 0.0)) throw config_error("imresize_bicubic: scale must be positive");
  const int out_rows = int(std::ceil(plane.rows * scale));
  const int out_cols = int(std::ceil(plane.cols * scale));
  if (out_rows < 1 || out_cols < 1)
    throw config_error("imresize_bicubic: output would be empty");

  const Taps row_taps = make_taps(plane.rows, out_rows, scale, opts.antialias);
  const Taps col_taps = make_taps(plane.cols, out_cols, scale, opts.antialias);

  std::vector<double> tmp = resample_rows(plane.values, plane.rows, plane.cols, row_taps,
                                          out_rows);
  std::vector<double> out = resample_cols(tmp, out_rows, plane.cols, col_taps, out_cols);

  ImagePlane result(out_rows, out_cols, plane.range);
  result.values = std::move(out);
  return result;
}

}  // namespace sesr
