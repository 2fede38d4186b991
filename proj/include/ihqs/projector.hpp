#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "ihqs/types.hpp"

namespace ihqs {

enum class BeamType { Parallel, FanEquiangular };

/// Everything needed to define the measurement operator A.
///
/// The image grid is centered on the rotation axis. Zero-valued optional
/// lengths are filled in by make_geometry():
///   fov_radius           half-diagonal of the grid
///   detector_spacing     pixel_size (parallel) or the angle that makes the
///                        outermost bins tangent to the FOV circle (fan)
///   source_to_center     2x the grid physical half-width (fan)
///   source_to_detector   4x the grid physical half-width (fan)
/// Parallel views sample [0, pi), fan views sample [0, 2pi), uniformly.
struct ScanGeometry {
  BeamType beam = BeamType::Parallel;
  std::size_t num_views = 0;
  std::size_t num_bins = 0;
  double detector_spacing = 0.0;
  double source_to_center = 0.0;
  double source_to_detector = 0.0;
  std::size_t width = 0;
  std::size_t height = 0;
  double pixel_size = 1.0;
  double fov_radius = 0.0;

  std::vector<double> view_angles() const;
  double half_width() const { return 0.5 * static_cast<double>(width) * pixel_size; }
  double half_height() const { return 0.5 * static_cast<double>(height) * pixel_size; }
  /// Detector coordinate of bin b (signed offset for parallel, fan angle for fan).
  double bin_position(std::size_t b) const {
    return (static_cast<double>(b) - 0.5 * static_cast<double>(num_bins - 1)) * detector_spacing;
  }
};

/// Resolves defaults and validates; throws GeometryError on degenerate input.
ScanGeometry make_geometry(ScanGeometry g);

/// Odd bin count covering the grid diagonal at pixel_size spacing.
std::size_t default_num_bins(std::size_t width, std::size_t height);

void validate(const ScanGeometry& g);

struct Ray {
  double ox, oy;  // a point on the ray
  double dx, dy;  // unit direction
};

Ray ray_for(const ScanGeometry& g, double view_angle, std::size_t bin);

/// Visits every pixel crossed by the ray with its exact intersection length.
/// Pixels are half-open boxes, so a ray along a grid line is attributed to
/// the pixel on the positive side.
template <class Visit>
void trace_ray(const ScanGeometry& g, const Ray& ray, Visit&& visit);

Sinogram forward_project(const Image& image, const ScanGeometry& geom);
Image back_project(const Sinogram& sino, const ScanGeometry& geom);

/// Raw in-place variants used on hot paths; spans must be image/sinogram sized.
void forward_project_into(std::span<const double> image, const ScanGeometry& geom,
                          std::span<double> sino);
void back_project_into(std::span<const double> sino, const ScanGeometry& geom,
                       std::span<double> image);

// ---------------------------------------------------------------------------

template <class Visit>
void trace_ray(const ScanGeometry& g, const Ray& ray, Visit&& visit) {
  const double d = g.pixel_size;
  const double x0 = -g.half_width();
  const double y0 = -g.half_height();
  const auto nx = static_cast<long>(g.width);
  const auto ny = static_cast<long>(g.height);
  constexpr double kTiny = 1e-15;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Parametric extent of the grid box along each axis.
  double tmin = -kInf, tmax = kInf;
  const bool move_x = std::abs(ray.dx) > kTiny;
  const bool move_y = std::abs(ray.dy) > kTiny;
  if (move_x) {
    double a = (x0 - ray.ox) / ray.dx;
    double b = (x0 + nx * d - ray.ox) / ray.dx;
    if (a > b) std::swap(a, b);
    tmin = std::max(tmin, a);
    tmax = std::min(tmax, b);
  } else if (ray.ox < x0 || ray.ox >= x0 + nx * d) {
    return;
  }
  if (move_y) {
    double a = (y0 - ray.oy) / ray.dy;
    double b = (y0 + ny * d - ray.oy) / ray.dy;
    if (a > b) std::swap(a, b);
    tmin = std::max(tmin, a);
    tmax = std::min(tmax, b);
  } else if (ray.oy < y0 || ray.oy >= y0 + ny * d) {
    return;
  }
  if (!(tmax > tmin)) return;

  // Entry cell. Rounding follows the direction of travel so an entry point
  // sitting on a grid line lands in the cell the ray moves into.
  auto cell_of = [&](double pos, double origin, double dir, long n) {
    double f = (pos - origin) / d;
    long i;
    if (dir > 0 || std::abs(dir) <= kTiny)
      i = static_cast<long>(std::floor(f));
    else
      i = static_cast<long>(std::ceil(f)) - 1;
    return std::clamp(i, 0L, n - 1);
  };
  long ix = cell_of(ray.ox + tmin * ray.dx, x0, ray.dx, nx);
  long iy = cell_of(ray.oy + tmin * ray.dy, y0, ray.dy, ny);
  const long sx = ray.dx > 0 ? 1 : -1;
  const long sy = ray.dy > 0 ? 1 : -1;

  auto next_x = [&](long i) {
    if (!move_x) return kInf;
    const double plane = x0 + static_cast<double>(sx > 0 ? i + 1 : i) * d;
    return (plane - ray.ox) / ray.dx;
  };
  auto next_y = [&](long i) {
    if (!move_y) return kInf;
    const double plane = y0 + static_cast<double>(sy > 0 ? i + 1 : i) * d;
    return (plane - ray.oy) / ray.dy;
  };

  double t = tmin;
  double tx = next_x(ix);
  double ty = next_y(iy);
  while (t < tmax) {
    const double tn = std::min({tx, ty, tmax});
    const double len = tn - t;
    if (len > 0.0) {
      // Grid rows run top to bottom while y grows upward.
      const std::size_t row = static_cast<std::size_t>(ny - 1 - iy);
      visit(row * g.width + static_cast<std::size_t>(ix), len);
    }
    t = tn;
    if (tn >= tmax) break;
    if (tx <= tn) {
      ix += sx;
      if (ix < 0 || ix >= nx) break;
      tx = next_x(ix);
    }
    if (ty <= tn) {
      iy += sy;
      if (iy < 0 || iy >= ny) break;
      ty = next_y(iy);
    }
  }
}

}  // namespace ihqs
