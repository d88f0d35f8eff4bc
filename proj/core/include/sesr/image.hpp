#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sesr/tensor.hpp"

namespace sesr {

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A single real-valued plane with a declared value range: 255 for metric
/// space, 1 for network space.
struct ImagePlane {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;
  double range = 255.0;

  ImagePlane() = default;
  ImagePlane(int r, int c, double range_ = 255.0)
      : rows(r), cols(c), values(std::size_t(r) * c, 0.0), range(range_) {}

  double& at(int r, int c) { return values[std::size_t(r) * cols + c]; }
  double at(int r, int c) const { return values[std::size_t(r) * cols + c]; }
};

/// Clamp every value into [0, range].
void clamp_to_range(ImagePlane& p);

/// Interleaved 8-bit image; channels is 1 (gray) or 3 (RGB).
struct Image8 {
  int rows = 0;
  int cols = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t& at(int r, int c, int ch) {
    return pixels[(std::size_t(r) * cols + c) * channels + ch];
  }
  std::uint8_t at(int r, int c, int ch) const {
    return pixels[(std::size_t(r) * cols + c) * channels + ch];
  }
};

/// PNG, PPM (P6) or PGM (P5), decided by file signature.
Image8 read_image(const std::string& path);
/// Format decided by extension: .png, .ppm, .pgm.
void write_image(const Image8& img, const std::string& path);

struct YCbCrPlanes {
  ImagePlane y, cb, cr;
};

/// BT.601 conversion of 8-bit RGB. full_range = true gives the JPEG/OpenCV
/// transform (Y in [0,255]); false gives the studio-swing transform
/// (Y in [16,235]) used by the conventional super-resolution benchmark
/// scripts. Values are real, not re-quantized.
YCbCrPlanes rgb_to_ycbcr(const Image8& rgb, bool full_range);

Image8 ycbcr_to_rgb(const ImagePlane& y, const ImagePlane& cb, const ImagePlane& cr,
                    bool full_range);

/// Luma plane of any supported image: gray images pass through untouched,
/// color images go through rgb_to_ycbcr.
ImagePlane luma_plane(const Image8& img, bool full_range);

ImagePlane plane_from_gray(const Image8& gray);
Image8 gray_from_plane(const ImagePlane& p);

}  // namespace sesr
