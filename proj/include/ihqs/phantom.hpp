#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "ihqs/types.hpp"

namespace ihqs {

/// One ellipse of an additive phantom, in normalized [-1, 1]^2 coordinates.
struct Ellipse {
  double intensity;
  double semi_x, semi_y;
  double center_x, center_y;
  double angle_deg;
};

/// The 10-ellipse modified Shepp-Logan table (Toft contrast).
const std::array<Ellipse, 10>& modified_shepp_logan_ellipses();

/// Phantom value at a normalized point: sum of intensities of all ellipses
/// containing it.
double shepp_logan_value(double x, double y);

/// n x n modified Shepp-Logan, sampled at pixel centers. The grid spans
/// [-1, 1]^2 in normalized units; pixel_size sets the physical scale.
/// Throws InvalidArgument for n < 16.
Image shepp_logan(std::size_t n, double pixel_size = 1.0);

/// Sinogram noise model. Poisson stage (when poisson_i0 is set) first:
/// c ~ Poisson(I0 exp(-s)), s' = -ln(max(c, 1) / I0); then additive
/// N(0, sigma^2).
struct NoiseSpec {
  double gaussian_sigma = 0.0;
  std::optional<double> poisson_i0;
  std::uint64_t seed = 0;
};

void validate(const NoiseSpec& spec);

/// Generator identity recorded in run manifests.
inline constexpr const char* kNoiseRngName =
    "std::mt19937_64 (per-stage seed_seq{seed, stage}); libstdc++ normal/poisson distributions";

/// Deterministic for a given seed. Throws DomainError on negative line
/// integrals when Poisson noise is enabled.
Sinogram add_noise(const Sinogram& sino, const NoiseSpec& spec);

}  // namespace ihqs
