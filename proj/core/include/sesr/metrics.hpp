#pragma once

#include "sesr/image.hpp"

namespace sesr {

/// 10*log10(255^2 / MSE) on range-255 planes after cropping border_crop
/// pixels from every side. Identical planes give +infinity.
double psnr(const ImagePlane& a, const ImagePlane& b, int border_crop);

/// Single-scale structural similarity: 11x11 Gaussian window, sigma 1.5,
/// K1 = 0.01, K2 = 0.03, L = 255, averaged over valid window positions after
/// the border crop.
double ssim(const ImagePlane& a, const ImagePlane& b, int border_crop);

}  // namespace sesr
