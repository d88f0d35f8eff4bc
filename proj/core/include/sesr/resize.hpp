#pragma once

#include "sesr/image.hpp"

namespace sesr {

struct ResizeOptions {
  /// Widen the kernel by 1/scale when downscaling. This is the convention
  /// under which the standard benchmark baselines are computed; disable for
  /// a plain (aliasing) cubic decimation.
  bool antialias = true;
};

/// Separable cubic-convolution resampling (Keys kernel, a = -0.5) with
/// symmetric boundary handling and per-tap weight normalization. Output
/// extent is ceil(extent * scale).
ImagePlane imresize_bicubic(const ImagePlane& plane, double scale,
                            const ResizeOptions& opts = {});

}  // namespace sesr
