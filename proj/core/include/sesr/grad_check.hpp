#pragma once

#include <functional>

#include "sesr/tensor.hpp"

namespace sesr {

struct GradCheckOptions {
  double perturbation = 1e-5;
  double abs_floor = 1e-8;
  /// When > 0, only this many randomly chosen input elements are perturbed.
  /// Large parameter groups are spot-checked this way.
  int max_samples = 0;
  unsigned seed = 7;
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  bool pass = false;
  /// False if the forward or backward produced non-finite values; the report
  /// then fails without raising.
  bool finite = true;
  int elements_checked = 0;
};

using ForwardFn = std::function<Tensor4<double>(const Tensor4<double>&)>;
/// backward(input, upstream) -> gradient w.r.t. input.
using BackwardFn =
    std::function<Tensor4<double>(const Tensor4<double>&, const Tensor4<double>&)>;

/// Central finite-difference check of an analytic gradient.
///
/// A fixed random weighting tensor turns fn into a scalar map
/// s(x) = sum(weights * fn(x)); the analytic gradient of s is
/// backward(x, weights), and each checked element is compared against
/// (s(x + h e_i) - s(x - h e_i)) / 2h at relative tolerance tol with an
/// absolute floor on the denominator.
GradCheckReport grad_check(const ForwardFn& fn, const BackwardFn& backward,
                           const Tensor4<double>& input, double tol,
                           const GradCheckOptions& opts = {});

}  // namespace sesr
