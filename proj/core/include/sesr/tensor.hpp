#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sesr {

/// Dimension / shape violations detected at kernel boundaries.
struct shape_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Invalid layer or model configuration (non-integer output size, bad enum, ...).
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Shape4 {
  int n = 1;
  int c = 1;
  int h = 1;
  int w = 1;

  bool operator==(const Shape4&) const = default;
  std::int64_t numel() const {
    return std::int64_t(n) * c * h * w;
  }
  std::string str() const;
};

/// Dense NCHW tensor, row-major within each image plane.
/// All dimensions are >= 1; the data vector always holds exactly numel() values.
template <typename T>
class Tensor4 {
 public:
  Tensor4() : shape_{1, 1, 1, 1}, data_(1, T(0)) {}

  explicit Tensor4(Shape4 s) : shape_(checked(s)), data_(std::size_t(s.numel()), T(0)) {}

  Tensor4(Shape4 s, std::vector<T> values) : shape_(checked(s)), data_(std::move(values)) {
    if (std::int64_t(data_.size()) != shape_.numel())
      throw shape_error("Tensor4: data length " + std::to_string(data_.size()) +
                        " does not match shape " + shape_.str());
  }

  const Shape4& shape() const { return shape_; }
  int n() const { return shape_.n; }
  int c() const { return shape_.c; }
  int h() const { return shape_.h; }
  int w() const { return shape_.w; }
  std::int64_t numel() const { return shape_.numel(); }

  T& at(int i, int j, int y, int x) { return data_[index(i, j, y, x)]; }
  const T& at(int i, int j, int y, int x) const { return data_[index(i, j, y, x)]; }

  /// Pointer to the start of spatial plane (i, j).
  T* plane(int i, int j) { return data_.data() + index(i, j, 0, 0); }
  const T* plane(int i, int j) const { return data_.data() + index(i, j, 0, 0); }

  std::span<T> flat() { return {data_.data(), data_.size()}; }
  std::span<const T> flat() const { return {data_.data(), data_.size()}; }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  bool operator==(const Tensor4&) const = default;

 private:
  static Shape4 checked(const Shape4& s) {
    if (s.n < 1 || s.c < 1 || s.h < 1 || s.w < 1)
      throw shape_error("Tensor4: all dimensions must be >= 1, got " + s.str());
    return s;
  }
  std::size_t index(int i, int j, int y, int x) const {
    return ((std::size_t(i) * shape_.c + j) * shape_.h + y) * shape_.w + x;
  }

  Shape4 shape_;
  std::vector<T> data_;
};

template <typename T>
bool all_finite(const Tensor4<T>& t);

/// Elementwise conversion between precisions (f32 <-> f64).
template <typename To, typename From>
Tensor4<To> cast(const Tensor4<From>& t) {
  Tensor4<To> out(t.shape());
  auto src = t.flat();
  auto dst = out.flat();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = To(src[i]);
  return out;
}

/// Geometry of a (possibly transposed) 2-D convolution.
///
/// Ordinary conv weights are [out_channels, in_channels, kernel_h, kernel_w];
/// transposed conv weights are [in_channels, out_channels, kernel_h, kernel_w].
/// The convolution convention is cross-correlation (no kernel flip).
struct ConvSpec {
  int in_channels = 0;
  int out_channels = 0;
  int kernel_h = 0;
  int kernel_w = 0;
  int stride = 1;
  int padding = 0;
  bool transposed = false;

  void validate() const;

  /// Output spatial extent for an input extent. Throws config_error when an
  /// ordinary conv does not produce a positive integral size.
  int out_h(int in) const { return out_size(in, kernel_h); }
  int out_w(int in) const { return out_size(in, kernel_w); }
  int out_size(int in, int kernel) const;

  Shape4 weight_shape() const {
    return transposed ? Shape4{in_channels, out_channels, kernel_h, kernel_w}
                      : Shape4{out_channels, in_channels, kernel_h, kernel_w};
  }

  static ConvSpec conv(int in_c, int out_c, int k, int stride = 1, int padding = 0) {
    return {in_c, out_c, k, k, stride, padding, false};
  }
  static ConvSpec deconv(int in_c, int out_c, int k, int stride, int padding) {
    return {in_c, out_c, k, k, stride, padding, true};
  }
};

extern template class Tensor4<float>;
extern template class Tensor4<double>;

}  // namespace sesr
