#include "sesr/loss.hpp"

#include <cmath>
#include <string>

namespace sesr {

template <typename T>
CharbonnierResult<T> charbonnier_loss(const std::vector<Tensor4<T>>& preds,
                                      const std::vector<Tensor4<T>>& targets, double eps) {
  if (eps <= 0.0) throw config_error("charbonnier_loss: eps must be > 0");
  if (preds.size() != targets.size() || preds.empty())
    throw shape_error("charbonnier_loss: need matching non-empty pred/target lists");

  CharbonnierResult<T> out;
  out.grads.reserve(preds.size());
  const double eps2 = eps * eps;
  for (std::size_t s = 0; s < preds.size(); ++s) {
    const auto& p = preds[s];
    const auto& t = targets[s];
    if (!(p.shape() == t.shape()))
      throw shape_error("charbonnier_loss: branch " + std::to_string(s) + " shapes differ: " +
                        p.shape().str() + " vs " + t.shape().str());
    const int batch = p.n();
    const double pixels = double(p.numel()) / batch;  // per-sample pixel count
    const double norm = 1.0 / (double(batch) * pixels);
    Tensor4<T> g(p.shape());
    auto fp = p.flat();
    auto ft = t.flat();
    auto fg = g.flat();
    double acc = 0.0;
    for (std::size_t i = 0; i < fp.size(); ++i) {
      const double d = double(fp[i]) - double(ft[i]);
      const double rho = std::sqrt(d * d + eps2);
      acc += rho;
      fg[i] = T(norm * d / rho);
    }
    out.loss += norm * acc;
    out.grads.push_back(std::move(g));
  }
  return out;
}

template CharbonnierResult<float> charbonnier_loss<float>(const std::vector<Tensor4<float>>&,
                                                          const std::vector<Tensor4<float>>&,
                                                          double);
template CharbonnierResult<double> charbonnier_loss<double>(const std::vector<Tensor4<double>>&,
                                                            const std::vector<Tensor4<double>>&,
                                                            double);

}  // namespace sesr
