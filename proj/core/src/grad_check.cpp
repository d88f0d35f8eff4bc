#include "sesr/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace sesr {
namespace {

double weighted_sum(const Tensor4<double>& y, const Tensor4<double>& w) {
  double acc = 0.0;
  auto fy = y.flat();
  auto fw = w.flat();
  for (std::size_t i = 0; i < fy.size(); ++i) acc += fy[i] * fw[i];
  return acc;
}

}  // namespace

GradCheckReport grad_check(const ForwardFn& fn, const BackwardFn& backward,
                           const Tensor4<double>& input, double tol,
                           const GradCheckOptions& opts) {
  GradCheckReport report;

  Tensor4<double> y0 = fn(input);
  if (!all_finite(y0)) {
    report.finite = false;
    return report;
  }

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Tensor4<double> weights(y0.shape());
  for (double& v : weights.flat()) v = unit(rng);

  Tensor4<double> analytic = backward(input, weights);
  if (!all_finite(analytic)) {
    report.finite = false;
    return report;
  }
  if (!(analytic.shape() == input.shape())) {
    report.pass = false;
    report.max_rel_err = std::numeric_limits<double>::infinity();
    return report;
  }

  std::vector<std::int64_t> picks(std::size_t(input.numel()));
  std::iota(picks.begin(), picks.end(), 0);
  if (opts.max_samples > 0 && std::int64_t(opts.max_samples) < input.numel()) {
    std::shuffle(picks.begin(), picks.end(), rng);
    picks.resize(opts.max_samples);
  }

  Tensor4<double> probe = input;
  const double h = opts.perturbation;
  for (std::int64_t i : picks) {
    const double saved = probe.flat()[i];
    probe.flat()[i] = saved + h;
    const double up = weighted_sum(fn(probe), weights);
    probe.flat()[i] = saved - h;
    const double down = weighted_sum(fn(probe), weights);
    probe.flat()[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      report.finite = false;
      return report;
    }
    const double fd = (up - down) / (2.0 * h);
    const double an = analytic.flat()[i];
    const double den = std::max({std::abs(fd), std::abs(an), opts.abs_floor});
    report.max_rel_err = std::max(report.max_rel_err, std::abs(fd - an) / den);
    ++report.elements_checked;
  }
  report.pass = report.finite && report.max_rel_err < tol;
  return report;
}

}  // namespace sesr
