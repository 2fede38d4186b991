#pragma once

#include <atomic>
#include <cstddef>
#include <span>

#include "ihqs/framelet.hpp"

namespace ihqs {

/// Parameters of prox_{p,eta}(t) = argmin_x |x|^p + (eta/2)(x - t)^2.
struct ProxParams {
  double p = 0.7;
  double eta = 1.0;
  /// Newton stops once |h(g)| <= newton_tol * max(1, eta*|t|).
  double newton_tol = 1e-12;
  int newton_max_iter = 50;
};

void validate(const ProxParams& params);

/// Counts Newton solves that had to fall back to bisection.
struct ProxStats {
  std::atomic<std::size_t> newton_solves{0};
  std::atomic<std::size_t> bisection_fallbacks{0};
};

/// Smallest nonzero magnitude the prox can return: (2(1-p)/eta)^(1/(2-p)).
double prox_rho(double p, double eta);
/// Threshold below which the prox is zero: rho + p rho^(p-1) / eta.
double prox_tau(double p, double eta);

/// Exact Lp proximal map. Zero for |t| <= tau (the two-point tie at tau
/// resolves to 0); otherwise sign(t) g with g the root of
/// p g^(p-1) + eta g - eta |t| on (rho, |t|). p == 1 is soft thresholding.
double prox_lp_scalar(double t, const ProxParams& params, ProxStats* stats = nullptr);

/// z-update: channel c of the penalized (highpass) channels gets
/// eta = gamma[c] / lambda, i.e. the minimizer of lambda|z|^p + gamma/2 (z-t)^2.
/// The lowpass channel, when present, is copied through.
FrameCoeffs prox_lp_coeffs(const FrameCoeffs& coeffs, double p, double lambda,
                           std::span<const double> gamma, ProxStats* stats = nullptr);

}  // namespace ihqs
