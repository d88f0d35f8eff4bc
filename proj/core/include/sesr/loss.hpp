#pragma once

#include <vector>

#include "sesr/tensor.hpp"

namespace sesr {

template <typename T>
struct CharbonnierResult {
  double loss = 0.0;
  std::vector<Tensor4<T>> grads;  // d loss / d pred, one per branch
};

/// Multi-branch Charbonnier penalty: per branch the mean over pixels of
/// sqrt((pred - target)^2 + eps^2), summed over branches and averaged over
/// the batch. Perfect predictions give exactly branches * eps.
template <typename T>
CharbonnierResult<T> charbonnier_loss(const std::vector<Tensor4<T>>& preds,
                                      const std::vector<Tensor4<T>>& targets, double eps);

}  // namespace sesr
