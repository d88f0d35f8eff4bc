#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sesr/image.hpp"
#include "sesr/model.hpp"

namespace sesr {

struct ImageScore {
  std::string name;
  double psnr_db = 0.0;
  double ssim = 0.0;
};

struct EvalReport {
  std::string dataset;
  std::string method;
  int scale = 0;
  int border_crop = 0;
  std::vector<ImageScore> per_image;  // sorted by image name
  double mean_psnr = 0.0;
  double mean_ssim = 0.0;
  std::vector<std::string> skipped;  // unreadable files, with reasons

  std::string to_json() const;
  /// Aligned "Method | PSNR/SSIM" text block in the benchmark-table style.
  std::string table_text() const;
};

struct EvalOptions {
  /// Luma convention for the ground-truth extraction. The studio-swing
  /// transform matches the published benchmark tables; full range matches
  /// the conversion used at application time.
  bool full_range_luma = false;
  bool antialias = true;
  /// Re-quantize the restored plane to 8 bits before scoring.
  bool quantize_output = false;
};

/// Maps a range-255 low-resolution luma plane to its upscaled counterpart.
using UpscaleFn = std::function<ImagePlane(const ImagePlane& lr, int scale)>;

UpscaleFn bicubic_upscaler(const ResizeOptions& opts = {});
/// Network method: feeds lr/255 through the pyramid, picks the branch for
/// the requested scale, clamps, rescales to 255.
UpscaleFn sesr_upscaler(const SESRModel<float>& model);

/// Runs the protocol over every image in dataset_dir: luma extraction,
/// center crop to a multiple of scale, bicubic downscale, method upscale,
/// clamp, and metrics at border_crop = scale. Scale 1 is accepted as a
/// degenerate identity configuration for harness tests.
EvalReport evaluate_dataset(const UpscaleFn& method, const std::string& method_name,
                            const std::string& dataset_dir, int scale,
                            const EvalOptions& opts = {});

/// Crops so both extents are multiples of scale, trimming symmetrically.
ImagePlane center_crop_to_multiple(const ImagePlane& p, int scale);

struct AblationArm {
  std::string block_kind;
  std::string config_digest;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  EvalReport eval;
};

struct AblationReport {
  AblationArm plain;
  AblationArm se;
  std::string to_json() const;
};

}  // namespace sesr
