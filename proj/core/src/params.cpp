#include "sesr/params.hpp"

#include <cmath>
#include <cstring>
#include <random>

namespace sesr {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

template <typename T>
std::uint64_t value_checksum(const ParamStore<T>& store) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* p, std::size_t len) {
    const unsigned char* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& ref : store) {
    mix(ref.name.data(), ref.name.size());
    auto flat = ref.param->value.flat();
    mix(flat.data(), flat.size() * sizeof(T));
  }
  return h;
}

template <typename T>
void fill_he_normal(Tensor4<T>& t, int fan_in, double leaky_slope, std::uint64_t seed,
                    std::string_view name) {
  const double stddev = std::sqrt(2.0 / ((1.0 + leaky_slope * leaky_slope) * double(fan_in)));
  std::mt19937_64 rng(seed ^ fnv1a64(name));
  std::normal_distribution<double> dist(0.0, stddev);
  for (T& v : t.flat()) v = T(dist(rng));
}

template <typename T>
void fill_bilinear_upsample(Tensor4<T>& t) {
  if (t.h() != 4 || t.w() != 4 || t.n() != t.c())
    throw shape_error("fill_bilinear_upsample expects a square-channel [c,c,4,4] tensor");
  t.fill(T(0));
  for (int c = 0; c < t.n(); ++c)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const double wi = 1.0 - std::abs(i - 1.5) / 2.0;
        const double wj = 1.0 - std::abs(j - 1.5) / 2.0;
        t.at(c, c, i, j) = T(wi * wj);
      }
}

template std::uint64_t value_checksum<float>(const ParamStore<float>&);
template std::uint64_t value_checksum<double>(const ParamStore<double>&);
template void fill_he_normal<float>(Tensor4<float>&, int, double, std::uint64_t,
                                    std::string_view);
template void fill_he_normal<double>(Tensor4<double>&, int, double, std::uint64_t,
                                     std::string_view);
template void fill_bilinear_upsample<float>(Tensor4<float>&);
template void fill_bilinear_upsample<double>(Tensor4<double>&);

}  // namespace sesr
