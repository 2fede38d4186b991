#include "ihqs/fbp.hpp"

#include <fftw3.h>

#include <complex>
#include <memory>
#include <mutex>
#include <numbers>

namespace ihqs {

namespace {

constexpr double kPi = std::numbers::pi;

// fftw planning is not thread-safe; execution on distinct arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

std::size_t padded_length(std::size_t n) {
  std::size_t len = 1;
  while (len < 2 * n) len <<= 1;
  return len;
}

/// Linear convolution of each view with a symmetric kernel given by taps[|n|]
/// for |n| < num_bins, computed through zero-padded real FFTs.
void convolve_views(std::span<double> data, std::size_t views, std::size_t bins,
                    std::span<const double> taps, FilterWindow window) {
  const std::size_t len = padded_length(bins);
  const std::size_t half = len / 2 + 1;
  FftwBuffer<double> real(static_cast<double*>(fftw_malloc(sizeof(double) * len)));
  FftwBuffer<fftw_complex> spec(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * half)));
  fftw_plan fwd, inv;
  {
    std::lock_guard lock(planner_mutex());
    fwd = fftw_plan_dft_r2c_1d(static_cast<int>(len), real.get(), spec.get(), FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(len), spec.get(), real.get(), FFTW_ESTIMATE);
  }

  // Kernel spectrum. The kernel is even, so its transform is real.
  std::fill(real.get(), real.get() + len, 0.0);
  real[0] = taps[0];
  for (std::size_t n = 1; n < bins; ++n) {
    real[n] = taps[n];
    real[len - n] = taps[n];
  }
  fftw_execute(fwd);
  std::vector<double> response(half);
  for (std::size_t k = 0; k < half; ++k) {
    double w = 1.0;
    if (window == FilterWindow::Hann)
      w = 0.5 * (1.0 + std::cos(kPi * static_cast<double>(k) / static_cast<double>(half - 1)));
    response[k] = spec[k][0] * w / static_cast<double>(len);
  }

  for (std::size_t v = 0; v < views; ++v) {
    auto row = data.subspan(v * bins, bins);
    std::copy(row.begin(), row.end(), real.get());
    std::fill(real.get() + bins, real.get() + len, 0.0);
    fftw_execute(fwd);
    for (std::size_t k = 0; k < half; ++k) {
      spec[k][0] *= response[k];
      spec[k][1] *= response[k];
    }
    fftw_execute(inv);
    std::copy(real.get(), real.get() + bins, row.begin());
  }

  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(fwd);
  fftw_destroy_plan(inv);
}

void check_dims(const Sinogram& sino, const ScanGeometry& geom) {
  validate(geom);
  if (sino.num_views() != geom.num_views || sino.num_bins() != geom.num_bins)
    throw DimensionError("sinogram " + std::to_string(sino.num_views()) + "x" +
                         std::to_string(sino.num_bins()) + " does not match geometry " +
                         std::to_string(geom.num_views) + "x" + std::to_string(geom.num_bins));
}

/// Linear interpolation of a filtered view at fractional bin index u.
double sample(std::span<const double> row, double u) {
  if (!(u >= 0.0) || u > static_cast<double>(row.size() - 1)) return 0.0;
  const auto i = static_cast<std::size_t>(u);
  if (i + 1 == row.size()) return row[i];
  const double w = u - static_cast<double>(i);
  return (1.0 - w) * row[i] + w * row[i + 1];
}

Image backproject_parallel(const Sinogram& filtered, const ScanGeometry& g) {
  Image img(g.width, g.height, g.pixel_size);
  const auto angles = g.view_angles();
  const double center = 0.5 * static_cast<double>(g.num_bins - 1);
  const double weight = kPi / static_cast<double>(g.num_views);
  for (std::size_t v = 0; v < g.num_views; ++v) {
    const double c = std::cos(angles[v]), s = std::sin(angles[v]);
    const auto row = filtered.view(v);
    for (std::size_t r = 0; r < g.height; ++r) {
      const double y = (0.5 * static_cast<double>(g.height - 1) - static_cast<double>(r)) * g.pixel_size;
      for (std::size_t col = 0; col < g.width; ++col) {
        const double x = (static_cast<double>(col) - 0.5 * static_cast<double>(g.width - 1)) * g.pixel_size;
        const double u = (x * c + y * s) / g.detector_spacing + center;
        img(col, r) += weight * sample(row, u);
      }
    }
  }
  return img;
}

Image backproject_fan(const Sinogram& filtered, const ScanGeometry& g) {
  Image img(g.width, g.height, g.pixel_size);
  const auto angles = g.view_angles();
  const double center = 0.5 * static_cast<double>(g.num_bins - 1);
  const double weight = 2.0 * kPi / static_cast<double>(g.num_views);
  const double radius = g.source_to_center;
  for (std::size_t v = 0; v < g.num_views; ++v) {
    const double c = std::cos(angles[v]), s = std::sin(angles[v]);
    const double sx = radius * c, sy = radius * s;
    const auto row = filtered.view(v);
    for (std::size_t r = 0; r < g.height; ++r) {
      const double y = (0.5 * static_cast<double>(g.height - 1) - static_cast<double>(r)) * g.pixel_size;
      for (std::size_t col = 0; col < g.width; ++col) {
        const double x = (static_cast<double>(col) - 0.5 * static_cast<double>(g.width - 1)) * g.pixel_size;
        const double px = x - sx, py = y - sy;
        // Central direction is (-c, -s); the fan angle is measured from it.
        const double along = -c * px - s * py;
        const double across = -c * py + s * px;
        const double fan = std::atan2(across, along);
        const double dist2 = px * px + py * py;
        img(col, r) += weight * sample(row, fan / g.detector_spacing + center) / dist2;
      }
    }
  }
  return img;
}

}  // namespace

double ramlak_tap(long n, double spacing) {
  if (n == 0) return 1.0 / (4.0 * spacing * spacing);
  if (n % 2 == 0) return 0.0;
  const double d = kPi * static_cast<double>(n) * spacing;
  return -1.0 / (d * d);
}

Sinogram ramp_filter(const Sinogram& sino, const ScanGeometry& geom, FilterWindow window) {
  check_dims(sino, geom);
  std::vector<double> taps(geom.num_bins);
  for (std::size_t n = 0; n < taps.size(); ++n)
    taps[n] = ramlak_tap(static_cast<long>(n), geom.detector_spacing);
  Sinogram out = sino;
  convolve_views(out.data(), geom.num_views, geom.num_bins, taps, window);
  return out;
}

Image fbp_reconstruct(const Sinogram& sino, const ScanGeometry& geom, FilterWindow window) {
  check_dims(sino, geom);
  const double ds = geom.detector_spacing;
  if (geom.beam == BeamType::Parallel) {
    Sinogram q = ramp_filter(sino, geom, window);
    for (double& x : q.values()) x *= ds;
    return backproject_parallel(q, geom);
  }

  Sinogram q = sino;
  for (std::size_t v = 0; v < geom.num_views; ++v) {
    auto row = q.view(v);
    for (std::size_t b = 0; b < geom.num_bins; ++b)
      row[b] *= geom.source_to_center * std::cos(geom.bin_position(b));
  }
  std::vector<double> taps(geom.num_bins);
  taps[0] = 0.5 * ramlak_tap(0, ds);
  for (std::size_t n = 1; n < taps.size(); ++n) {
    const double gamma = static_cast<double>(n) * ds;
    const double ratio = gamma / std::sin(gamma);
    taps[n] = 0.5 * ratio * ratio * ramlak_tap(static_cast<long>(n), ds);
  }
  convolve_views(q.data(), geom.num_views, geom.num_bins, taps, window);
  for (double& x : q.values()) x *= ds;
  return backproject_fan(q, geom);
}

Image fbp_initial_guess(const Sinogram& sino, const ScanGeometry& geom, FilterWindow window) {
  Image img = fbp_reconstruct(sino, geom, window);
  for (double& x : img.values()) x = std::max(x, 0.0);
  return img;
}

}  // namespace ihqs
