#include "ihqs/prox.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace ihqs {

void validate(const ProxParams& params) {
  if (!(params.p > 0.0 && params.p <= 1.0))
    throw InvalidArgument("prox exponent p must lie in (0, 1], got " + std::to_string(params.p));
  if (!(params.eta > 0.0) || !std::isfinite(params.eta))
    throw InvalidArgument("prox weight eta must be positive");
  if (!(params.newton_tol > 0.0)) throw InvalidArgument("newton_tol must be positive");
  if (params.newton_max_iter < 1) throw InvalidArgument("newton_max_iter must be >= 1");
}

double prox_rho(double p, double eta) { return std::pow(2.0 * (1.0 - p) / eta, 1.0 / (2.0 - p)); }

double prox_tau(double p, double eta) {
  const double rho = prox_rho(p, eta);
  return rho + p * std::pow(rho, p - 1.0) / eta;
}

namespace {

double shrink_root(double a, double p, double eta, double rho, const ProxParams& params,
                   ProxStats* stats) {
  auto h = [&](double g) { return p * std::pow(g, p - 1.0) + eta * g - eta * a; };
  const double scale = params.newton_tol * std::max(1.0, eta * a);
  if (stats) ++stats->newton_solves;

  // h is convex and increasing on (rho, a] with h(a) > 0, so Newton from the
  // right end decreases monotonically onto the root.
  double g = a;
  for (int it = 0; it < params.newton_max_iter; ++it) {
    const double hg = h(g);
    if (std::abs(hg) <= scale) return g;
    const double slope = p * (p - 1.0) * std::pow(g, p - 2.0) + eta;
    const double next = g - hg / slope;
    if (!(next > rho && next <= a)) break;
    if (next == g) return g;
    g = next;
  }

  if (stats) ++stats->bisection_fallbacks;
  double lo = rho, hi = a;
  for (int it = 0; it < 200 && hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (h(mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double prox_lp_scalar(double t, const ProxParams& params, ProxStats* stats) {
  const double a = std::abs(t);
  if (a == 0.0) return 0.0;
  const double sign = t < 0.0 ? -1.0 : 1.0;
  if (params.p == 1.0) return sign * std::max(a - 1.0 / params.eta, 0.0);

  const double rho = prox_rho(params.p, params.eta);
  const double tau = rho + params.p * std::pow(rho, params.p - 1.0) / params.eta;
  if (a <= tau) return 0.0;
  return sign * shrink_root(a, params.p, params.eta, rho, params, stats);
}

FrameCoeffs prox_lp_coeffs(const FrameCoeffs& coeffs, double p, double lambda,
                           std::span<const double> gamma, ProxStats* stats) {
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  if (gamma.size() != FrameCoeffs::kHighpassChannels)
    throw InvalidArgument("gamma needs one weight per highpass channel (8), got " +
                          std::to_string(gamma.size()));
  for (double g : gamma)
    if (!(g > 0.0)) throw InvalidArgument("gamma weights must be positive");

  FrameCoeffs out = coeffs;
  const std::size_t first = coeffs.includes_lowpass() ? 1 : 0;
  for (std::size_t pos = first; pos < coeffs.num_channels(); ++pos) {
    ProxParams params{p, gamma[pos - first] / lambda};
    validate(params);
    const auto src = coeffs.channel(pos);
    auto dst = out.channel(pos);
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = prox_lp_scalar(src[k], params, stats);
  }
  return out;
}

}  // namespace ihqs
