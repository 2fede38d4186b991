#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ihqs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not conform.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Scan geometry cannot describe a valid measurement operator.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Input outside the mathematical domain of an operation (e.g. negative line integrals under Poisson noise).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values or a failed numerical stage.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed file content; carries the byte offset where parsing stopped.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// 2D real image in row-major order. Row 0 is the top of the image.
class Image {
 public:
  Image() = default;
  Image(std::size_t width, std::size_t height, double pixel_size);
  Image(std::size_t width, std::size_t height, double pixel_size, std::vector<double> data);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  double pixel_size() const noexcept { return pixel_size_; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::vector<double>& values() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  double& operator()(std::size_t x, std::size_t y) { return data_[y * width_ + x]; }
  double operator()(std::size_t x, std::size_t y) const { return data_[y * width_ + x]; }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }
  bool all_finite() const noexcept;
  double max_abs() const noexcept;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  double pixel_size_ = 1.0;
  std::vector<double> data_;
};

/// Line integrals indexed (view, bin), view-major.
class Sinogram {
 public:
  Sinogram() = default;
  Sinogram(std::vector<double> view_angles, std::size_t num_bins);
  Sinogram(std::vector<double> view_angles, std::size_t num_bins, std::vector<double> data);

  std::size_t num_views() const noexcept { return angles_.size(); }
  std::size_t num_bins() const noexcept { return num_bins_; }
  std::size_t size() const noexcept { return data_.size(); }
  const std::vector<double>& view_angles() const noexcept { return angles_; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::vector<double>& values() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  std::span<double> view(std::size_t v) { return {data_.data() + v * num_bins_, num_bins_}; }
  std::span<const double> view(std::size_t v) const {
    return {data_.data() + v * num_bins_, num_bins_};
  }

  bool same_shape(const Sinogram& other) const noexcept {
    return num_bins_ == other.num_bins_ && angles_.size() == other.angles_.size();
  }

 private:
  std::vector<double> angles_;
  std::size_t num_bins_ = 0;
  std::vector<double> data_;
};

// Flat-vector helpers shared by the solvers.

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// y += a * x
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline bool all_finite(std::span<const double> a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace ihqs
