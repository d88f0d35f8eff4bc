#include "sesr/optim.hpp"

#include <cmath>
#include <stdexcept>

namespace sesr {

std::string to_string(OptimizerKind k) {
  return k == OptimizerKind::adam ? "adam" : "sgd_momentum";
}

OptimizerKind optimizer_from_string(const std::string& s) {
  if (s == "adam") return OptimizerKind::adam;
  if (s == "sgd_momentum" || s == "sgd") return OptimizerKind::sgd_momentum;
  throw config_error("unknown optimizer '" + s + "'");
}

template <typename T>
OptimizerState<T> make_optimizer_state(OptimizerKind kind, const ParamStore<T>& params) {
  OptimizerState<T> st;
  st.kind = kind;
  st.m.reserve(params.size());
  for (const auto& ref : params) st.m.emplace_back(ref.param->value.shape());
  if (kind == OptimizerKind::adam) {
    st.v.reserve(params.size());
    for (const auto& ref : params) st.v.emplace_back(ref.param->value.shape());
  }
  return st;
}

template <typename T>
void optimizer_step(const ParamStore<T>& params, OptimizerState<T>& state, double lr) {
  if (state.m.size() != params.size())
    throw shape_error("optimizer_step: state does not mirror the parameter store");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!(params[i].param->grad.shape() == params[i].param->value.shape()))
      throw shape_error("optimizer_step: grad shape mismatch in " + params[i].name);
    if (!all_finite(params[i].param->grad))
      throw std::runtime_error("optimizer_step: non-finite gradient in group '" +
                               params[i].name + "'; step aborted");
  }

  state.step += 1;
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  const double bc1 = 1.0 - std::pow(beta1, double(state.step));
  const double bc2 = 1.0 - std::pow(beta2, double(state.step));

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].param->value.flat();
    auto g = params[i].param->grad.flat();
    auto m = state.m[i].flat();
    if (state.kind == OptimizerKind::adam) {
      auto v = state.v[i].flat();
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double gk = double(g[k]);
        const double mk = beta1 * double(m[k]) + (1.0 - beta1) * gk;
        const double vk = beta2 * double(v[k]) + (1.0 - beta2) * gk * gk;
        m[k] = T(mk);
        v[k] = T(vk);
        p[k] = T(double(p[k]) - lr * (mk / bc1) / (std::sqrt(vk / bc2) + eps));
      }
    } else {
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double vk = 0.9 * double(m[k]) + double(g[k]);
        m[k] = T(vk);
        p[k] = T(double(p[k]) - lr * vk);
      }
    }
  }
}

#define SESR_INSTANTIATE_OPTIM(T)                                                       \
  template struct OptimizerState<T>;                                                    \
  template OptimizerState<T> make_optimizer_state<T>(OptimizerKind, const ParamStore<T>&); \
  template void optimizer_step<T>(const ParamStore<T>&, OptimizerState<T>&, double);

SESR_INSTANTIATE_OPTIM(float)
SESR_INSTANTIATE_OPTIM(double)

}  // namespace sesr
