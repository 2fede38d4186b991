#include "ihqs/framelet.hpp"

#include <cmath>

namespace ihqs {

namespace {

using Taps = std::array<double, 3>;  // offsets -1, 0, +1

const std::array<Taps, 3>& filters() {
  static const double r = std::sqrt(2.0) / 4.0;
  static const std::array<Taps, 3> f{{
      {0.25, 0.5, 0.25},
      {r, 0.0, -r},
      {-0.25, 0.5, -0.25},
  }};
  return f;
}

inline std::size_t reflect(long m, long n) {
  if (m < 0) return static_cast<std::size_t>(-m - 1);
  if (m >= n) return static_cast<std::size_t>(2 * n - m - 1);
  return static_cast<std::size_t>(m);
}

// out(x, y) = sum_k taps[k] in(x + k - 1, y), reflected at the edges.
void filter_rows(std::span<const double> in, std::size_t w, std::size_t h, const Taps& taps,
                 std::span<double> out) {
  const long n = static_cast<long>(w);
  for (std::size_t y = 0; y < h; ++y) {
    const double* src = in.data() + y * w;
    double* dst = out.data() + y * w;
    for (long x = 0; x < n; ++x)
      dst[x] = taps[0] * src[reflect(x - 1, n)] + taps[1] * src[x] + taps[2] * src[reflect(x + 1, n)];
  }
}

// Transpose of filter_rows, accumulated into out.
void filter_rows_adjoint_add(std::span<const double> in, std::size_t w, std::size_t h,
                             const Taps& taps, std::span<double> out) {
  const long n = static_cast<long>(w);
  for (std::size_t y = 0; y < h; ++y) {
    const double* src = in.data() + y * w;
    double* dst = out.data() + y * w;
    for (long x = 0; x < n; ++x) {
      const double c = src[x];
      dst[reflect(x - 1, n)] += taps[0] * c;
      dst[x] += taps[1] * c;
      dst[reflect(x + 1, n)] += taps[2] * c;
    }
  }
}

// out(x, y) = sum_k taps[k] in(x, y + k - 1).
void filter_cols(std::span<const double> in, std::size_t w, std::size_t h, const Taps& taps,
                 std::span<double> out) {
  const long n = static_cast<long>(h);
  for (long y = 0; y < n; ++y) {
    const double* up = in.data() + reflect(y - 1, n) * w;
    const double* mid = in.data() + static_cast<std::size_t>(y) * w;
    const double* down = in.data() + reflect(y + 1, n) * w;
    double* dst = out.data() + static_cast<std::size_t>(y) * w;
    for (std::size_t x = 0; x < w; ++x)
      dst[x] = taps[0] * up[x] + taps[1] * mid[x] + taps[2] * down[x];
  }
}

void filter_cols_adjoint_add(std::span<const double> in, std::size_t w, std::size_t h,
                             const Taps& taps, std::span<double> out) {
  const long n = static_cast<long>(h);
  for (long y = 0; y < n; ++y) {
    const double* src = in.data() + static_cast<std::size_t>(y) * w;
    double* up = out.data() + reflect(y - 1, n) * w;
    double* mid = out.data() + static_cast<std::size_t>(y) * w;
    double* down = out.data() + reflect(y + 1, n) * w;
    for (std::size_t x = 0; x < w; ++x) {
      up[x] += taps[0] * src[x];
      mid[x] += taps[1] * src[x];
      down[x] += taps[2] * src[x];
    }
  }
}

void check_size(std::size_t w, std::size_t h) {
  if (w < 3 || h < 3)
    throw InvalidArgument("framelet transform needs an image of at least 3x3, got " +
                          std::to_string(w) + "x" + std::to_string(h));
}

}  // namespace

FrameCoeffs::FrameCoeffs(std::size_t width, std::size_t height, bool includes_lowpass)
    : width_(width),
      height_(height),
      includes_lowpass_(includes_lowpass),
      data_(width * height * (includes_lowpass ? kFullChannels : kHighpassChannels), 0.0) {}

std::string FrameCoeffs::label(std::size_t pos) const {
  const std::size_t c = frame_index(pos);
  return "a" + std::to_string(c / 3) + "a" + std::to_string(c % 3);
}

FrameCoeffs FrameCoeffs::highpass() const {
  if (!includes_lowpass_) return *this;
  FrameCoeffs out(width_, height_, false);
  std::copy(data_.begin() + static_cast<long>(pixels()), data_.end(), out.data_.begin());
  return out;
}

double FrameCoeffs::max_abs() const noexcept {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

void frame_decompose_into(std::span<const double> u, std::size_t w, std::size_t h,
                          std::span<double> coeffs) {
  check_size(w, h);
  const std::size_t n = w * h;
  if (u.size() != n || coeffs.size() != FrameCoeffs::kFullChannels * n)
    throw DimensionError("framelet buffer sizes do not match image");
  std::vector<double> tmp(n);
  const auto& f = filters();
  for (std::size_t j = 0; j < 3; ++j) {
    filter_rows(u, w, h, f[j], tmp);
    for (std::size_t i = 0; i < 3; ++i) filter_cols(tmp, w, h, f[i], coeffs.subspan((3 * i + j) * n, n));
  }
}

void frame_adjoint_into(std::span<const double> coeffs, std::size_t w, std::size_t h,
                        std::span<double> out) {
  check_size(w, h);
  const std::size_t n = w * h;
  if (out.size() != n || coeffs.size() != FrameCoeffs::kFullChannels * n)
    throw DimensionError("framelet buffer sizes do not match image");
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> tmp(n);
  const auto& f = filters();
  for (std::size_t j = 0; j < 3; ++j) {
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (std::size_t i = 0; i < 3; ++i)
      filter_cols_adjoint_add(coeffs.subspan((3 * i + j) * n, n), w, h, f[i], tmp);
    filter_rows_adjoint_add(tmp, w, h, f[j], out);
  }
}

FrameCoeffs frame_decompose(const Image& img) {
  check_size(img.width(), img.height());
  FrameCoeffs c(img.width(), img.height(), true);
  frame_decompose_into(img.data(), img.width(), img.height(), c.data());
  return c;
}

Image frame_adjoint(const FrameCoeffs& coeffs, double pixel_size) {
  Image out(coeffs.width(), coeffs.height(), pixel_size);
  if (coeffs.includes_lowpass()) {
    frame_adjoint_into(coeffs.data(), coeffs.width(), coeffs.height(), out.data());
  } else {
    std::vector<double> full(FrameCoeffs::kFullChannels * coeffs.pixels(), 0.0);
    std::copy(coeffs.values().begin(), coeffs.values().end(),
              full.begin() + static_cast<long>(coeffs.pixels()));
    frame_adjoint_into(full, coeffs.width(), coeffs.height(), out.data());
  }
  return out;
}

void frame_weighted_gram(std::span<const double> u, std::size_t w, std::size_t h,
                         std::span<const double> weights, std::span<double> out) {
  if (weights.size() != FrameCoeffs::kFullChannels)
    throw InvalidArgument("framelet gram needs 9 channel weights");
  const std::size_t n = w * h;
  std::vector<double> coeffs(FrameCoeffs::kFullChannels * n);
  frame_decompose_into(u, w, h, coeffs);
  for (std::size_t c = 0; c < FrameCoeffs::kFullChannels; ++c)
    for (std::size_t k = 0; k < n; ++k) coeffs[c * n + k] *= weights[c];
  frame_adjoint_into(coeffs, w, h, out);
}

}  // namespace ihqs
