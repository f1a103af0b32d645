#include "rainbench/metrics.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "rainbench/dct.h"
#include "rainbench/error.h"

namespace rainbench {

namespace {

void require_comparable(const ImageBuffer& a, const ImageBuffer& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorKind::kDimensionMismatch, std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                                   " vs " + std::to_string(b.width()) + "x" +
                                                   std::to_string(b.height()));
  }
  if (a.channels() != 1 || b.channels() != 1) {
    throw Error(ErrorKind::kChannelMismatch, "metrics expect single-channel planes");
  }
}

// Valid-mode separable filter of a plane by a 1-D kernel in both directions.
std::vector<double> filter_valid(const std::vector<double>& src, int width, int height,
                                 const std::vector<double>& kernel) {
  const int ks = static_cast<int>(kernel.size());
  const int ow = width - ks + 1;
  const int oh = height - ks + 1;
  std::vector<double> horiz(static_cast<std::size_t>(ow) * height);
  for (int y = 0; y < height; ++y) {
    const double* row = src.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < ks; ++k) s += kernel[k] * row[x + k];
      horiz[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < ks; ++k) s += kernel[k] * horiz[static_cast<std::size_t>(y + k) * ow + x];
      out[static_cast<std::size_t>(y) * ow + x] = s;
    }
  }
  return out;
}

// Gaussian kernel normalized to unit sum; its outer product is the
// normalized 2-D window.
std::vector<double> gaussian_kernel(int size, double sigma) {
  std::vector<double> k(size);
  const double r = (size - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    k[i] = std::exp(-((i - r) * (i - r)) / (2.0 * sigma * sigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// sum((x - mean)^2) * n / (n - 1) over a square region of `block`.
double scaled_variance(const Block8x8& block, int y0, int x0, int size) {
  double mean = 0.0;
  for (int y = y0; y < y0 + size; ++y)
    for (int x = x0; x < x0 + size; ++x) mean += block[y * 8 + x];
  const int n = size * size;
  mean /= n;
  double ss = 0.0;
  for (int y = y0; y < y0 + size; ++y)
    for (int x = x0; x < x0 + size; ++x) ss += (block[y * 8 + x] - mean) * (block[y * 8 + x] - mean);
  return ss / (n - 1) * n;
}

// Masking strength of a block: weighted AC energy scaled by how evenly
// activity spreads over its four quadrants.
double masking_strength(const Block8x8& pixels, const DctBlock& dct, const HvsTables& t) {
  double energy = 0.0;
  for (int k = 0; k < 8; ++k) {
    for (int l = 0; l < 8; ++l) {
      if (k == 0 && l == 0) continue;
      energy += dct.at(k, l) * dct.at(k, l) * t.masking_weights[k][l];
    }
  }
  double activity = scaled_variance(pixels, 0, 0, 8);
  if (activity != 0.0) {
    activity = (scaled_variance(pixels, 0, 0, 4) + scaled_variance(pixels, 0, 4, 4) +
                scaled_variance(pixels, 4, 4, 4) + scaled_variance(pixels, 4, 0, 4)) /
               activity;
  }
  return std::sqrt(energy * activity) / t.masking_normalizer;
}

Block8x8 load_block(const ImageBuffer& img, int x0, int y0) {
  Block8x8 b{};
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) b[y * 8 + x] = img.at(x0 + x, y0 + y);
  return b;
}

}  // namespace

void SsimParams::validate() const {
  if (window_size < 3 || window_size % 2 == 0) {
    throw Error(ErrorKind::kInvalidArgument, "SSIM window size must be odd and >= 3");
  }
  if (!(gaussian_sigma > 0.0) || !(k1 > 0.0) || !(k2 > 0.0) || !(dynamic_range > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "SSIM sigma, k1, k2 and dynamic range must be positive");
  }
}

double energy_to_db(double mean_squared_error) {
  if (mean_squared_error <= 0.0) return kZeroErrorDb;
  return std::min(kZeroErrorDb, 10.0 * std::log10(255.0 * 255.0 / mean_squared_error));
}

double mse(const ImageBuffer& a, const ImageBuffer& b) {
  require_comparable(a, b);
  const auto sa = a.samples();
  const auto sb = b.samples();
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    const int d = int{sa[i]} - int{sb[i]};
    sum += static_cast<std::uint64_t>(d * d);
  }
  return static_cast<double>(sum) / static_cast<double>(sa.size());
}

double psnr(const ImageBuffer& a, const ImageBuffer& b) { return energy_to_db(mse(a, b)); }

double ssim(const ImageBuffer& a, const ImageBuffer& b, const SsimParams& p) {
  p.validate();
  require_comparable(a, b);
  if (a.width() < p.window_size || a.height() < p.window_size) {
    throw Error(ErrorKind::kImageTooSmall, "SSIM needs at least " + std::to_string(p.window_size) + "x" +
                                               std::to_string(p.window_size) + " pixels");
  }
  const int w = a.width();
  const int h = a.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> x(n), y(n), xx(n), yy(n), xy(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = a.samples()[i];
    y[i] = b.samples()[i];
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto kernel = gaussian_kernel(p.window_size, p.gaussian_sigma);
  const auto mu_x = filter_valid(x, w, h, kernel);
  const auto mu_y = filter_valid(y, w, h, kernel);
  const auto e_xx = filter_valid(xx, w, h, kernel);
  const auto e_yy = filter_valid(yy, w, h, kernel);
  const auto e_xy = filter_valid(xy, w, h, kernel);

  const double c1 = p.c1();
  const double c2 = p.c2();
  double total = 0.0;
  for (std::size_t i = 0; i < mu_x.size(); ++i) {
    const double mxy = mu_x[i] * mu_y[i];
    const double mxx = mu_x[i] * mu_x[i];
    const double myy = mu_y[i] * mu_y[i];
    const double var_x = e_xx[i] - mxx;
    const double var_y = e_yy[i] - myy;
    const double cov = e_xy[i] - mxy;
    total += ((2.0 * mxy + c1) * (2.0 * cov + c2)) / ((mxx + myy + c1) * (var_x + var_y + c2));
  }
  return total / static_cast<double>(mu_x.size());
}

HvsScores psnr_hvs_m(const ImageBuffer& a, const ImageBuffer& b, const HvsTables& t, MaskingSource masking) {
  require_comparable(a, b);
  if (a.width() < 8 || a.height() < 8) {
    throw Error(ErrorKind::kImageTooSmall, "PSNR-HVS-M needs at least one 8x8 block");
  }
  const int bw = a.width() / 8;
  const int bh = a.height() / 8;
  double masked_sum = 0.0;
  double plain_sum = 0.0;
  for (int by = 0; by < bh; ++by) {
    for (int bx = 0; bx < bw; ++bx) {
      const Block8x8 pa = load_block(a, bx * 8, by * 8);
      const Block8x8 pb = load_block(b, bx * 8, by * 8);
      const DctBlock da = dct8x8(pa);
      const DctBlock db = dct8x8(pb);
      double mask = masking_strength(pa, da, t);
      if (masking == MaskingSource::kMaxOfBoth) mask = std::max(mask, masking_strength(pb, db, t));
      for (int k = 0; k < 8; ++k) {
        for (int l = 0; l < 8; ++l) {
          double u = std::abs(da.at(k, l) - db.at(k, l));
          const double csf = t.csf_weights[k][l];
          plain_sum += (u * csf) * (u * csf);
          if (k != 0 || l != 0) {
            const double threshold = mask / t.masking_weights[k][l];
            u = u < threshold ? 0.0 : u - threshold;
          }
          masked_sum += (u * csf) * (u * csf);
        }
      }
    }
  }
  const double count = 64.0 * bw * bh;
  return {energy_to_db(masked_sum / count), energy_to_db(plain_sum / count)};
}

}  // namespace rainbench
