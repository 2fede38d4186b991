#include "ihqs/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <string>

namespace ihqs {

namespace {

constexpr std::size_t kWindow = 11;
constexpr double kWindowSigma = 1.5;

void same_dims(const Image& x, const Image& ref) {
  if (!x.same_shape(ref))
    throw DimensionError("metric operands differ in size: " + std::to_string(x.width()) + "x" +
                         std::to_string(x.height()) + " vs " + std::to_string(ref.width()) + "x" +
                         std::to_string(ref.height()));
}

std::array<double, kWindow> gaussian_window() {
  std::array<double, kWindow> w{};
  double sum = 0.0;
  const double c = 0.5 * static_cast<double>(kWindow - 1);
  for (std::size_t i = 0; i < kWindow; ++i) {
    const double d = static_cast<double>(i) - c;
    w[i] = std::exp(-d * d / (2.0 * kWindowSigma * kWindowSigma));
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Separable "valid" filtering with the 1D window along both axes.
std::vector<double> blur_valid(const std::vector<double>& in, std::size_t w, std::size_t h,
                               const std::array<double, kWindow>& win) {
  const std::size_t ow = w - kWindow + 1, oh = h - kWindow + 1;
  std::vector<double> rows(ow * h);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < ow; ++x) {
      double s = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) s += win[k] * in[y * w + x + k];
      rows[y * ow + x] = s;
    }
  std::vector<double> out(ow * oh);
  for (std::size_t y = 0; y < oh; ++y)
    for (std::size_t x = 0; x < ow; ++x) {
      double s = 0.0;
      for (std::size_t k = 0; k < kWindow; ++k) s += win[k] * rows[(y + k) * ow + x];
      out[y * ow + x] = s;
    }
  return out;
}

}  // namespace

double psnr(const Image& x, const Image& ref, double peak) {
  same_dims(x, ref);
  if (!(peak > 0.0)) throw InvalidArgument("psnr peak must be positive");
  double mse = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x.values()[i] - ref.values()[i];
    mse += d * d;
  }
  mse /= static_cast<double>(x.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Image& x, const Image& ref, double peak) {
  same_dims(x, ref);
  if (!(peak > 0.0)) throw InvalidArgument("ssim peak must be positive");
  const std::size_t w = x.width(), h = x.height();
  if (w < kWindow || h < kWindow)
    throw InvalidArgument("ssim needs images of at least 11x11");

  const auto win = gaussian_window();
  const auto& a = x.values();
  const auto& b = ref.values();
  std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto mu_a = blur_valid(a, w, h, win);
  const auto mu_b = blur_valid(b, w, h, win);
  const auto e_aa = blur_valid(aa, w, h, win);
  const auto e_bb = blur_valid(bb, w, h, win);
  const auto e_ab = blur_valid(ab, w, h, win);

  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double va = e_aa[i] - mu_a[i] * mu_a[i];
    const double vb = e_bb[i] - mu_b[i] * mu_b[i];
    const double cov = e_ab[i] - mu_a[i] * mu_b[i];
    total += ((2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2)) /
             ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2));
  }
  return total / static_cast<double>(mu_a.size());
}

std::pair<double, double> mae_rmse(const Image& x, const Image& ref) {
  same_dims(x, ref);
  double abs_sum = 0.0, sq_sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x.values()[i] - ref.values()[i];
    abs_sum += std::abs(d);
    sq_sum += d * d;
  }
  const double n = static_cast<double>(x.size());
  return {abs_sum / n, std::sqrt(sq_sum / n)};
}

}  // namespace ihqs
