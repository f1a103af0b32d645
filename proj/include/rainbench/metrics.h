#pragma once

#include "rainbench/hvs_tables.h"
#include "rainbench/image.h"

namespace rainbench {

// Every decibel score is clamped to this value; it is what zero error reports.
inline constexpr double kZeroErrorDb = 100.0;

struct SsimParams {
  int window_size = 11;
  double gaussian_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 255.0;

  double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }
  void validate() const;
};

struct QualityScore {
  double ssim = 0.0;
  double psnr_hvs_m = 0.0;
  double psnr_hvs = 0.0;
  double psnr = 0.0;
  double mse = 0.0;
};

// All metrics take single-channel planes of equal size; see to_luma.

double mse(const ImageBuffer& a, const ImageBuffer& b);

/// 10 log10(255^2 / mse), clamped to kZeroErrorDb.
double psnr(const ImageBuffer& a, const ImageBuffer& b);

/// Mean SSIM over every valid (unpadded) Gaussian window position.
/// Throws ImageTooSmall when either side is below the window size.
double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& params = {});

// Which block's activity sets the masking threshold. kMaxOfBoth follows
// the published reference code; kReference uses only the first argument.
enum class MaskingSource { kMaxOfBoth, kReference };

struct HvsScores {
  double psnr_hvs_m = 0.0;
  double psnr_hvs = 0.0;
};

/// PSNR-HVS and PSNR-HVS-M over non-overlapping 8x8 blocks. Right and
/// bottom remainders that do not fill a block are dropped. `a` is the
/// reference image.
HvsScores psnr_hvs_m(const ImageBuffer& a, const ImageBuffer& b, const HvsTables& tables = HvsTables::published(),
                     MaskingSource masking = MaskingSource::kMaxOfBoth);

// Convert an error energy to dB with the zero-error cap.
double energy_to_db(double mean_squared_error);

}  // namespace rainbench
