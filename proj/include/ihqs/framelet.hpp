#pragma once

#include <array>
#include <string>
#include <vector>

#include "ihqs/types.hpp"

namespace ihqs {

/// One-level undecimated piecewise-linear framelet coefficients.
///
/// Channel c = 3*i + j is the tensor product of 1D filter a_i along rows
/// (vertical) and a_j along columns (horizontal), with
///   a0 = [1, 2, 1] / 4,  a1 = sqrt(2)/4 [1, 0, -1],  a2 = [-1, 2, -1] / 4.
/// Channel 0 is the lowpass. A highpass-only stack holds channels 1..8.
class FrameCoeffs {
 public:
  static constexpr std::size_t kFullChannels = 9;
  static constexpr std::size_t kHighpassChannels = 8;

  FrameCoeffs() = default;
  FrameCoeffs(std::size_t width, std::size_t height, bool includes_lowpass);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t pixels() const noexcept { return width_ * height_; }
  std::size_t num_channels() const noexcept {
    return includes_lowpass_ ? kFullChannels : kHighpassChannels;
  }
  bool includes_lowpass() const noexcept { return includes_lowpass_; }

  /// Channel by position in this stack (position 0 is the lowpass only when
  /// includes_lowpass()).
  std::span<double> channel(std::size_t pos) { return {data_.data() + pos * pixels(), pixels()}; }
  std::span<const double> channel(std::size_t pos) const {
    return {data_.data() + pos * pixels(), pixels()};
  }
  /// Filter-pair identifier of the channel at `pos`, e.g. "a0a1".
  std::string label(std::size_t pos) const;
  /// Index into the full 9-channel numbering for the channel at `pos`.
  std::size_t frame_index(std::size_t pos) const { return includes_lowpass_ ? pos : pos + 1; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::vector<double>& values() noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  bool same_shape(const FrameCoeffs& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_ && includes_lowpass_ == o.includes_lowpass_;
  }
  /// Drops the lowpass channel.
  FrameCoeffs highpass() const;
  double max_abs() const noexcept;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  bool includes_lowpass_ = true;
  std::vector<double> data_;
};

/// All 9 channels with half-sample symmetric boundary extension.
/// Throws InvalidArgument for images smaller than 3x3.
FrameCoeffs frame_decompose(const Image& img);

/// Exact adjoint: sum over the stack of W_c^T c. A highpass-only stack is
/// treated as having a zero lowpass channel.
Image frame_adjoint(const FrameCoeffs& coeffs, double pixel_size = 1.0);

/// sum_c weights[c] W_c^T W_c u over the 9 channels; weights has 9 entries.
void frame_weighted_gram(std::span<const double> u, std::size_t width, std::size_t height,
                         std::span<const double> weights, std::span<double> out);

/// Raw variants over flat buffers (channel-major, 9 channels).
void frame_decompose_into(std::span<const double> u, std::size_t width, std::size_t height,
                          std::span<double> coeffs);
void frame_adjoint_into(std::span<const double> coeffs, std::size_t width, std::size_t height,
                        std::span<double> out);

}  // namespace ihqs
