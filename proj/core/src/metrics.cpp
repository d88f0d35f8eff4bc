#include "sesr/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace sesr {
namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

void check_pair(const ImagePlane& a, const ImagePlane& b, int border_crop, int min_extent) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw shape_error("metric: plane sizes differ");
  if (a.range != 255.0 || b.range != 255.0)
    throw config_error("metric: planes must declare range 255");
  if (border_crop < 0) throw config_error("metric: border_crop must be >= 0");
  if (a.rows - 2 * border_crop < min_extent || a.cols - 2 * border_crop < min_extent)
    throw shape_error("metric: border crop leaves too small a region");
}

std::vector<double> cropped(const ImagePlane& p, int crop, int& rows, int& cols) {
  rows = p.rows - 2 * crop;
  cols = p.cols - 2 * crop;
  std::vector<double> out(std::size_t(rows) * cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out[std::size_t(i) * cols + j] = p.at(i + crop, j + crop);
  return out;
}

// Separable valid-mode filtering with the normalized Gaussian window.
std::vector<double> gauss_valid(const std::vector<double>& img, int rows, int cols,
                                const std::vector<double>& g, int& out_rows, int& out_cols) {
  const int k = int(g.size());
  out_rows = rows - k + 1;
  out_cols = cols - k + 1;
  std::vector<double> tmp(std::size_t(rows) * out_cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < out_cols; ++j) {
      double acc = 0.0;
      for (int t = 0; t < k; ++t) acc += g[t] * img[std::size_t(i) * cols + j + t];
      tmp[std::size_t(i) * out_cols + j] = acc;
    }
  std::vector<double> out(std::size_t(out_rows) * out_cols);
  for (int i = 0; i < out_rows; ++i)
    for (int j = 0; j < out_cols; ++j) {
      double acc = 0.0;
      for (int t = 0; t < k; ++t) acc += g[t] * tmp[std::size_t(i + t) * out_cols + j];
      out[std::size_t(i) * out_cols + j] = acc;
    }
  return out;
}

std::vector<double> gauss_kernel() {
  std::vector<double> g(kWindow);
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double x = i - (kWindow - 1) / 2.0;
    g[i] = std::exp(-x * x / (2.0 * kSigma * kSigma));
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  return g;
}

}  // namespace

double psnr(const ImagePlane& a, const ImagePlane& b, int border_crop) {
  check_pair(a, b, border_crop, 1);
  int rows, cols;
  std::vector<double> ca = cropped(a, border_crop, rows, cols);
  std::vector<double> cb = cropped(b, border_crop, rows, cols);
  double mse = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    const double d = ca[i] - cb[i];
    mse += d * d;
  }
  mse /= double(ca.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const ImagePlane& a, const ImagePlane& b, int border_crop) {
  check_pair(a, b, border_crop, kWindow);
  int rows, cols;
  std::vector<double> x = cropped(a, border_crop, rows, cols);
  std::vector<double> y = cropped(b, border_crop, rows, cols);

  const std::size_t npix = x.size();
  std::vector<double> xx(npix), yy(npix), xy(npix);
  for (std::size_t i = 0; i < npix; ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }

  const std::vector<double> g = gauss_kernel();
  int vr, vc;
  std::vector<double> mu1 = gauss_valid(x, rows, cols, g, vr, vc);
  std::vector<double> mu2 = gauss_valid(y, rows, cols, g, vr, vc);
  std::vector<double> sxx = gauss_valid(xx, rows, cols, g, vr, vc);
  std::vector<double> syy = gauss_valid(yy, rows, cols, g, vr, vc);
  std::vector<double> sxy = gauss_valid(xy, rows, cols, g, vr, vc);

  const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < mu1.size(); ++i) {
    const double m1 = mu1[i], m2 = mu2[i];
    const double v1 = sxx[i] - m1 * m1;
    const double v2 = syy[i] - m2 * m2;
    const double cov = sxy[i] - m1 * m2;
    acc += ((2.0 * m1 * m2 + c1) * (2.0 * cov + c2)) /
           ((m1 * m1 + m2 * m2 + c1) * (v1 + v2 + c2));
  }
  return acc / double(mu1.size());
}

}  // namespace sesr
