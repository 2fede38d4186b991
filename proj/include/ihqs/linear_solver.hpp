#pragma once

#include <array>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "ihqs/framelet.hpp"
#include "ihqs/projector.hpp"
#include "ihqs/types.hpp"

namespace ihqs {

struct CgSettings {
  int max_iter = 200;
  /// Relative residual ||b - Ax|| / ||b||.
  double tol = 1e-6;
};

struct CgReport {
  int iterations = 0;
  double final_residual_norm = 0.0;
  bool converged = false;
};

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;

/// Plain conjugate gradient on an SPD map, updating x in place from its
/// current value. The residual test runs before the first step, so an exact
/// x yields iterations == 0. Throws NumericalError on non-finite iterates.
CgReport conjugate_gradient(const LinearMap& apply, std::span<const double> rhs,
                            std::span<double> x, const CgSettings& settings);

/// A^T A + sum_c gamma_c W_c^T W_c over all 9 framelet channels, applied
/// matrix-free. gamma[0] weights the lowpass channel, gamma[1..8] the
/// highpass ones. Without a geometry the A^T A term is absent.
class NormalOperator {
 public:
  NormalOperator(const ScanGeometry& geom, const std::array<double, 9>& gamma);
  static NormalOperator regularization_only(std::size_t width, std::size_t height,
                                            double pixel_size, const std::array<double, 9>& gamma);

  void apply(std::span<const double> u, std::span<double> out) const;
  const std::optional<ScanGeometry>& geometry() const noexcept { return geom_; }
  const std::array<double, 9>& gamma() const noexcept { return gamma_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  double pixel_size() const noexcept { return pixel_size_; }

 private:
  NormalOperator(std::optional<ScanGeometry> geom, std::size_t width, std::size_t height,
                 double pixel_size, const std::array<double, 9>& gamma);

  std::optional<ScanGeometry> geom_;
  std::size_t width_;
  std::size_t height_;
  double pixel_size_;
  std::array<double, 9> gamma_;
  mutable std::vector<double> sino_scratch_;
  mutable std::vector<double> frame_scratch_;
};

Image apply_normal_operator(const NormalOperator& op, const Image& u);

std::pair<Image, CgReport> cg_solve(const NormalOperator& op, const Image& rhs, const Image& x0,
                                    const CgSettings& settings);

/// Supplies the CG starting point x0 = u + correction(u). The correction is a
/// stored k x k stencil (odd k, correlation with reflected edges) plus a
/// scalar bias. The identity initializer has no correction.
class Initializer {
 public:
  enum class Kind { Identity, CorrectionField };

  Initializer() = default;
  static Initializer identity() { return {}; }
  static Initializer correction_field(std::size_t k, std::vector<double> stencil, double bias);

  Kind kind() const noexcept { return kind_; }
  std::size_t stencil_size() const noexcept { return k_; }
  const std::vector<double>& stencil() const noexcept { return stencil_; }
  double bias() const noexcept { return bias_; }

  Image correction(const Image& u) const;
  Image start_point(const Image& u) const;

 private:
  Kind kind_ = Kind::Identity;
  std::size_t k_ = 0;
  std::vector<double> stencil_;
  double bias_ = 0.0;
};

/// A^T f + sum_c gamma_c W_c^T zbar_c, given precomputed A^T f.
Image u_update_rhs(const Image& atf, const FrameCoeffs& zbar, const std::array<double, 9>& gamma);

/// u-subproblem: solves op * u = A^T f + sum_c gamma_c W_c^T zbar_c by CG
/// starting from init.start_point(u_prev).
std::pair<Image, CgReport> solve_u_update(const Sinogram& f, const FrameCoeffs& zbar,
                                          const Image& u_prev, const Initializer& init,
                                          const NormalOperator& op, const CgSettings& settings);

}  // namespace ihqs
