#pragma once

#include <string>
#include <vector>

#include "sesr/params.hpp"

namespace sesr {

enum class OptimizerKind { adam, sgd_momentum };

std::string to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(const std::string& s);

/// Moment buffers mirror the parameter store entry for entry. Adam uses both
/// m and v; momentum SGD keeps its velocity in m.
template <typename T>
struct OptimizerState {
  OptimizerKind kind = OptimizerKind::adam;
  long step = 0;
  std::vector<Tensor4<T>> m;
  std::vector<Tensor4<T>> v;
};

template <typename T>
OptimizerState<T> make_optimizer_state(OptimizerKind kind, const ParamStore<T>& params);

/// One update from the gradients currently held in the store.
/// adam: bias-corrected moments, beta1 0.9, beta2 0.999, eps 1e-8.
/// sgd_momentum: v <- 0.9 v + g; p <- p - lr*v.
/// Non-finite gradients abort before any parameter is touched.
template <typename T>
void optimizer_step(const ParamStore<T>& params, OptimizerState<T>& state, double lr);

}  // namespace sesr
