#include "ihqs/phantom.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace ihqs {

const std::array<Ellipse, 10>& modified_shepp_logan_ellipses() {
  static const std::array<Ellipse, 10> table{{
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
      {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
      {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},
      {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
      {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},
      {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
      {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},
      {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
      {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},
      {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
  }};
  return table;
}

double shepp_logan_value(double x, double y) {
  double v = 0.0;
  for (const auto& e : modified_shepp_logan_ellipses()) {
    const double phi = e.angle_deg * std::numbers::pi / 180.0;
    const double c = std::cos(phi), s = std::sin(phi);
    const double dx = x - e.center_x, dy = y - e.center_y;
    const double xr = dx * c + dy * s;
    const double yr = -dx * s + dy * c;
    if ((xr * xr) / (e.semi_x * e.semi_x) + (yr * yr) / (e.semi_y * e.semi_y) <= 1.0)
      v += e.intensity;
  }
  return v;
}

Image shepp_logan(std::size_t n, double pixel_size) {
  if (n < 16) throw InvalidArgument("phantom size must be >= 16, got " + std::to_string(n));
  Image img(n, n, pixel_size);
  const double half = 0.5 * static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double y = (half - 0.5 - static_cast<double>(r)) / half;
    for (std::size_t c = 0; c < n; ++c) {
      const double x = (static_cast<double>(c) + 0.5 - half) / half;
      img(c, r) = shepp_logan_value(x, y);
    }
  }
  return img;
}

void validate(const NoiseSpec& spec) {
  if (!(spec.gaussian_sigma >= 0.0) || !std::isfinite(spec.gaussian_sigma))
    throw InvalidArgument("gaussian_sigma must be >= 0");
  if (spec.poisson_i0 && !(*spec.poisson_i0 > 0.0 && std::isfinite(*spec.poisson_i0)))
    throw InvalidArgument("poisson_i0 must be positive");
}

Sinogram add_noise(const Sinogram& sino, const NoiseSpec& spec) {
  validate(spec);
  Sinogram out = sino;
  auto& data = out.values();

  if (spec.poisson_i0) {
    const double i0 = *spec.poisson_i0;
    for (double s : data)
      if (s < 0.0) throw DomainError("Poisson noise needs nonnegative line integrals");
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                      static_cast<std::uint32_t>(spec.seed >> 32), 1u};
    std::mt19937_64 rng(seq);
    for (double& s : data) {
      std::poisson_distribution<long long> counts(i0 * std::exp(-s));
      const auto c = counts(rng);
      s = -std::log(static_cast<double>(std::max<long long>(c, 1)) / i0);
    }
  }

  if (spec.gaussian_sigma > 0.0) {
    std::seed_seq seq{static_cast<std::uint32_t>(spec.seed),
                      static_cast<std::uint32_t>(spec.seed >> 32), 2u};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> noise(0.0, spec.gaussian_sigma);
    for (double& s : data) s += noise(rng);
  }
  return out;
}

}  // namespace ihqs
