#include "ihqs/types.hpp"

#include <algorithm>
#include <numbers>

namespace ihqs {

Image::Image(std::size_t width, std::size_t height, double pixel_size)
    : Image(width, height, pixel_size, std::vector<double>(width * height, 0.0)) {}

Image::Image(std::size_t width, std::size_t height, double pixel_size, std::vector<double> data)
    : width_(width), height_(height), pixel_size_(pixel_size), data_(std::move(data)) {
  if (!(pixel_size > 0.0) || !std::isfinite(pixel_size))
    throw InvalidArgument("image pixel_size must be positive and finite");
  if (data_.size() != width * height)
    throw DimensionError("image data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(width) + "x" +
                         std::to_string(height));
}

bool Image::all_finite() const noexcept { return ihqs::all_finite(data_); }

double Image::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Sinogram::Sinogram(std::vector<double> view_angles, std::size_t num_bins)
    : Sinogram(std::move(view_angles), num_bins, {}) {}

Sinogram::Sinogram(std::vector<double> view_angles, std::size_t num_bins, std::vector<double> data)
    : angles_(std::move(view_angles)), num_bins_(num_bins), data_(std::move(data)) {
  if (data_.empty()) data_.assign(angles_.size() * num_bins_, 0.0);
  if (data_.size() != angles_.size() * num_bins_)
    throw DimensionError("sinogram data length " + std::to_string(data_.size()) +
                         " does not match " + std::to_string(angles_.size()) + " views x " +
                         std::to_string(num_bins_) + " bins");
  for (std::size_t i = 0; i < angles_.size(); ++i) {
    const double a = angles_[i];
    if (!(a >= 0.0 && a < 2.0 * std::numbers::pi))
      throw InvalidArgument("view angle outside [0, 2pi)");
    if (i > 0 && !(a > angles_[i - 1]))
      throw InvalidArgument("view angles must be strictly increasing");
  }
}

}  // namespace ihqs
