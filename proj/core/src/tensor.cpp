#include "sesr/tensor.hpp"

#include <cmath>

namespace sesr {

std::string Shape4::str() const {
  return std::to_string(n) + "x" + std::to_string(c) + "x" + std::to_string(h) + "x" +
         std::to_string(w);
}

void ConvSpec::validate() const {
  if (in_channels < 1 || out_channels < 1)
    throw config_error("ConvSpec: channel counts must be >= 1");
  if (kernel_h < 1 || kernel_w < 1)
    throw config_error("ConvSpec: kernel dims must be >= 1");
  if (stride < 1 || stride > 2)
    throw config_error("ConvSpec: stride must be 1 or 2, got " + std::to_string(stride));
  if (padding < 0)
    throw config_error("ConvSpec: padding must be >= 0");
}

int ConvSpec::out_size(int in, int kernel) const {
  validate();
  if (transposed) {
    int out = (in - 1) * stride - 2 * padding + kernel;
    if (out < 1)
      throw config_error("ConvSpec: transposed output size " + std::to_string(out) +
                         " < 1 for input " + std::to_string(in));
    return out;
  }
  int span = in + 2 * padding - kernel;
  if (span < 0 || span % stride != 0)
    throw config_error("ConvSpec: (in + 2*padding - kernel) = " + std::to_string(span) +
                       " is not a non-negative multiple of stride " + std::to_string(stride));
  return span / stride + 1;
}

template <typename T>
bool all_finite(const Tensor4<T>& t) {
  for (T v : t.flat())
    if (!std::isfinite(double(v))) return false;
  return true;
}

template bool all_finite<float>(const Tensor4<float>&);
template bool all_finite<double>(const Tensor4<double>&);

template class Tensor4<float>;
template class Tensor4<double>;

}  // namespace sesr
