#include "ihqs/projector.hpp"

#include <numbers>
#include <string>

namespace ihqs {

namespace {

constexpr double kPi = std::numbers::pi;

// Backprojection accumulates per view block into private buffers which are
// summed in block order, so the result does not depend on thread count.
constexpr std::size_t kBackprojectBlocks = 8;

}  // namespace

std::size_t default_num_bins(std::size_t width, std::size_t height) {
  const double diag = std::hypot(static_cast<double>(width), static_cast<double>(height));
  auto n = static_cast<std::size_t>(std::ceil(diag)) + 2;
  return n | 1u;
}

std::vector<double> ScanGeometry::view_angles() const {
  const double span = beam == BeamType::Parallel ? kPi : 2.0 * kPi;
  std::vector<double> a(num_views);
  for (std::size_t v = 0; v < num_views; ++v)
    a[v] = span * static_cast<double>(v) / static_cast<double>(num_views);
  return a;
}

void validate(const ScanGeometry& g) {
  if (g.width == 0 || g.height == 0) throw GeometryError("image grid must be non-empty");
  if (!(g.pixel_size > 0.0) || !std::isfinite(g.pixel_size))
    throw GeometryError("pixel_size must be positive");
  if (g.num_views < 1) throw GeometryError("num_views must be >= 1");
  if (g.num_bins < 1) throw GeometryError("num_bins must be >= 1");
  if (!(g.detector_spacing > 0.0)) throw GeometryError("detector_spacing must be positive");
  if (!(g.fov_radius > 0.0)) throw GeometryError("fov_radius must be positive");
  if (g.beam == BeamType::FanEquiangular) {
    if (!(g.source_to_center > g.fov_radius))
      throw GeometryError("fan beam source lies inside the field of view (source_to_center " +
                          std::to_string(g.source_to_center) + " <= fov_radius " +
                          std::to_string(g.fov_radius) + ")");
    if (!(g.source_to_detector > g.source_to_center))
      throw GeometryError("source_to_detector must exceed source_to_center");
    const double half_fan = 0.5 * static_cast<double>(g.num_bins - 1) * g.detector_spacing;
    if (!(half_fan < 0.5 * kPi)) throw GeometryError("fan angle must be below 180 degrees");
  }
}

ScanGeometry make_geometry(ScanGeometry g) {
  if (g.width == 0 || g.height == 0) throw GeometryError("image grid must be non-empty");
  if (!(g.pixel_size > 0.0)) throw GeometryError("pixel_size must be positive");
  const double half = std::max(g.half_width(), g.half_height());
  if (g.num_bins == 0) g.num_bins = default_num_bins(g.width, g.height);
  if (g.fov_radius == 0.0) g.fov_radius = std::hypot(g.half_width(), g.half_height());
  if (g.beam == BeamType::FanEquiangular) {
    if (g.source_to_center == 0.0) g.source_to_center = 2.0 * half;
    if (g.source_to_detector == 0.0) g.source_to_detector = 4.0 * half;
    if (g.detector_spacing == 0.0 && g.source_to_center > g.fov_radius) {
      const double half_fan = std::asin(g.fov_radius / g.source_to_center);
      g.detector_spacing =
          g.num_bins > 1 ? 2.0 * half_fan / static_cast<double>(g.num_bins - 1) : half_fan;
    }
  } else if (g.detector_spacing == 0.0) {
    g.detector_spacing = g.pixel_size;
  }
  validate(g);
  return g;
}

Ray ray_for(const ScanGeometry& g, double angle, std::size_t bin) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double pos = g.bin_position(bin);
  if (g.beam == BeamType::Parallel) {
    // Ray {x cos + y sin = pos}, travelling along (-sin, cos).
    return {pos * c, pos * s, -s, c};
  }
  // Source on the circle of radius source_to_center; central ray points at
  // the origin and bin rays are rotated from it by the fan angle.
  const double cg = std::cos(pos);
  const double sg = std::sin(pos);
  const double cx = -c, cy = -s;
  return {g.source_to_center * c, g.source_to_center * s, cx * cg - cy * sg, cx * sg + cy * cg};
}

namespace {

void check_image(std::size_t n, const ScanGeometry& g) {
  if (n != g.width * g.height)
    throw DimensionError("image has " + std::to_string(n) + " pixels, geometry expects " +
                         std::to_string(g.width) + "x" + std::to_string(g.height));
}

void check_sino(std::size_t n, const ScanGeometry& g) {
  if (n != g.num_views * g.num_bins)
    throw DimensionError("sinogram has " + std::to_string(n) + " entries, geometry expects " +
                         std::to_string(g.num_views) + " views x " + std::to_string(g.num_bins) +
                         " bins");
}

}  // namespace

void forward_project_into(std::span<const double> image, const ScanGeometry& geom,
                          std::span<double> sino) {
  validate(geom);
  check_image(image.size(), geom);
  check_sino(sino.size(), geom);
  const auto angles = geom.view_angles();
  const auto views = static_cast<long>(geom.num_views);
#pragma omp parallel for schedule(static)
  for (long v = 0; v < views; ++v) {
    for (std::size_t b = 0; b < geom.num_bins; ++b) {
      double acc = 0.0;
      trace_ray(geom, ray_for(geom, angles[v], b),
                [&](std::size_t idx, double len) { acc += len * image[idx]; });
      sino[static_cast<std::size_t>(v) * geom.num_bins + b] = acc;
    }
  }
}

void back_project_into(std::span<const double> sino, const ScanGeometry& geom,
                       std::span<double> image) {
  validate(geom);
  check_image(image.size(), geom);
  check_sino(sino.size(), geom);
  const auto angles = geom.view_angles();
  const std::size_t blocks = std::min(kBackprojectBlocks, geom.num_views);
  std::vector<std::vector<double>> partial(blocks);
#pragma omp parallel for schedule(static)
  for (long blk = 0; blk < static_cast<long>(blocks); ++blk) {
    auto& acc = partial[blk];
    acc.assign(image.size(), 0.0);
    const std::size_t lo = geom.num_views * blk / blocks;
    const std::size_t hi = geom.num_views * (blk + 1) / blocks;
    for (std::size_t v = lo; v < hi; ++v) {
      for (std::size_t b = 0; b < geom.num_bins; ++b) {
        const double val = sino[v * geom.num_bins + b];
        trace_ray(geom, ray_for(geom, angles[v], b),
                  [&](std::size_t idx, double len) { acc[idx] += len * val; });
      }
    }
  }
  std::copy(partial[0].begin(), partial[0].end(), image.begin());
  for (std::size_t blk = 1; blk < blocks; ++blk)
    for (std::size_t i = 0; i < image.size(); ++i) image[i] += partial[blk][i];
}

Sinogram forward_project(const Image& image, const ScanGeometry& geom) {
  validate(geom);
  if (image.width() != geom.width || image.height() != geom.height)
    throw DimensionError("image grid " + std::to_string(image.width()) + "x" +
                         std::to_string(image.height()) + " does not match geometry grid " +
                         std::to_string(geom.width) + "x" + std::to_string(geom.height));
  Sinogram sino(geom.view_angles(), geom.num_bins);
  forward_project_into(image.data(), geom, sino.data());
  return sino;
}

Image back_project(const Sinogram& sino, const ScanGeometry& geom) {
  validate(geom);
  if (sino.num_views() != geom.num_views || sino.num_bins() != geom.num_bins)
    throw DimensionError("sinogram " + std::to_string(sino.num_views()) + "x" +
                         std::to_string(sino.num_bins()) + " does not match geometry " +
                         std::to_string(geom.num_views) + "x" + std::to_string(geom.num_bins));
  Image img(geom.width, geom.height, geom.pixel_size);
  back_project_into(sino.data(), geom, img.data());
  return img;
}

}  // namespace ihqs
