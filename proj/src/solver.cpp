#include "ihqs/solver.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "ihqs/metrics.hpp"

namespace ihqs {

namespace {

const double kBetaMax = (std::sqrt(5.0) - 1.0) / 2.0;

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument("solver config: " + what);
}

void check_finite(std::span<const double> v, const char* stage, int iter) {
  if (!all_finite(v))
    throw NumericalError(std::string("numerical divergence in ") + stage + " at iteration " +
                         std::to_string(iter));
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

std::array<double, 9> SolverConfig::channel_weights() const {
  std::array<double, 9> w{};
  w[0] = gamma_lowpass;
  for (std::size_t c = 0; c < gamma.size(); ++c) w[c + 1] = gamma[c];
  return w;
}

void validate(const SolverConfig& cfg) {
  require(cfg.p > 0.0 && cfg.p <= 1.0, "p must lie in (0, 1]");
  require(cfg.lambda > 0.0 && std::isfinite(cfg.lambda), "lambda must be positive");
  for (double g : cfg.gamma) require(g > 0.0 && std::isfinite(g), "gamma weights must be positive");
  require(cfg.gamma_lowpass > 0.0 && std::isfinite(cfg.gamma_lowpass),
          "gamma_lowpass must be positive");
  require(cfg.alpha >= 0.0 && cfg.alpha < 1.0, "alpha must lie in [0, 1)");
  require(cfg.beta >= 0.0 && cfg.beta < kBetaMax, "beta must lie in [0, (sqrt(5)-1)/2)");
  require(cfg.epsilon > 0.0, "epsilon must be positive");
  require(cfg.max_iter >= 1, "max_iter must be >= 1");
  require(cfg.cg.max_iter >= 0, "cg max_iter must be >= 0");
  require(cfg.cg.tol > 0.0, "cg tol must be positive");
  require(cfg.psnr_peak > 0.0, "psnr_peak must be positive");
}

std::string trace_to_csv(const ConvergenceTrace& trace) {
  std::ostringstream out;
  out << "iter,rel_change,objective,cg_iters,psnr\n";
  char line[160];
  for (const auto& r : trace.records) {
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%d,%.17g\n", r.iter, r.rel_change, r.objective,
                  r.cg_iters, r.psnr);
    out << line;
  }
  return out.str();
}

IhqsSolver::IhqsSolver(ScanGeometry geom, Sinogram f, SolverConfig cfg)
    : geom_(std::move(geom)),
      f_(std::move(f)),
      cfg_(std::move(cfg)),
      op_(geom_, cfg_.channel_weights()),
      atf_(back_project(f_, geom_)) {
  validate(cfg_);
  if (!all_finite(f_.data())) throw DomainError("sinogram contains non-finite values");
}

SolverState IhqsSolver::initial_state(const Image& u0) const {
  if (u0.width() != geom_.width || u0.height() != geom_.height)
    throw DimensionError("initial image does not match the geometry grid");
  SolverState s;
  s.u = u0;
  s.u_bar = u0;
  s.z = frame_decompose(u0);
  s.z_bar = s.z;
  s.k = 0;
  return s;
}

SolverState IhqsSolver::step(const SolverState& state, StepInfo* info, ProxStats* stats) const {
  const int iter = state.k + 1;
  SolverState next;
  next.k = iter;

  // z^{k+1} = prox(W ubar^k), lowpass copied through.
  next.z = prox_lp_coeffs(frame_decompose(state.u_bar), cfg_.p, cfg_.lambda, cfg_.gamma, stats);
  check_finite(next.z.data(), "z-update (prox)", iter);

  // zbar^{k+1} = z^{k+1} + alpha (z^{k+1} - zbar^k)
  next.z_bar = next.z;
  {
    auto zb = next.z_bar.data();
    const auto z = next.z.data();
    const auto prev = state.z_bar.data();
    for (std::size_t i = 0; i < zb.size(); ++i) zb[i] = z[i] + cfg_.alpha * (z[i] - prev[i]);
  }
  check_finite(next.z_bar.data(), "z extrapolation", iter);

  const Image rhs = u_update_rhs(atf_, next.z_bar, op_.gamma());
  auto [u, report] = cg_solve(op_, rhs, cfg_.initializer.start_point(state.u_bar), cfg_.cg);
  next.u = std::move(u);
  check_finite(next.u.data(), "u-update (CG)", iter);

  // ubar^{k+1} = u^{k+1} + beta (u^{k+1} - ubar^k)
  next.u_bar = next.u;
  {
    auto ub = next.u_bar.data();
    const auto un = next.u.data();
    const auto prev = state.u_bar.data();
    for (std::size_t i = 0; i < ub.size(); ++i) ub[i] = un[i] + cfg_.beta * (un[i] - prev[i]);
  }
  check_finite(next.u_bar.data(), "u extrapolation", iter);

  if (info) {
    info->cg = report;
    const double prev_norm = norm2(state.u_bar.data());
    const double change = distance(next.u_bar.data(), state.u_bar.data());
    info->rel_change = prev_norm > 0.0 ? change / prev_norm
                                       : (change == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    const double un = norm2(next.u.data());
    const double du = distance(next.u.data(), state.u.data());
    info->sq_rel_change = un > 0.0 ? (du * du) / (un * un) : 0.0;
  }
  return next;
}

double IhqsSolver::objective(const SolverState& state) const {
  const Sinogram au = forward_project(state.u, geom_);
  double data = 0.0;
  for (std::size_t i = 0; i < au.size(); ++i) {
    const double r = au.values()[i] - f_.values()[i];
    data += r * r;
  }
  const FrameCoeffs wu = frame_decompose(state.u);
  const auto weights = op_.gamma();
  double penalty = 0.0;
  double coupling = 0.0;
  const std::size_t n = wu.pixels();
  for (std::size_t c = 0; c < FrameCoeffs::kFullChannels; ++c) {
    const auto w = wu.channel(c);
    const auto z = state.z.channel(c);
    double sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      sq += (w[k] - z[k]) * (w[k] - z[k]);
      if (c > 0) penalty += std::pow(std::abs(z[k]), cfg_.p);
    }
    coupling += weights[c] * sq;
  }
  return 0.5 * data + cfg_.lambda * penalty + 0.5 * coupling;
}

double IhqsSolver::u_residual(const Image& u, const FrameCoeffs& zbar) const {
  const Image lhs = apply_normal_operator(op_, u);
  const Image rhs = u_update_rhs(atf_, zbar, op_.gamma());
  const double denom = norm2(atf_.data());
  return distance(lhs.data(), rhs.data()) / (denom > 0.0 ? denom : 1.0);
}

double objective_value(const SolverState& state, const Sinogram& f, const ScanGeometry& geom,
                       const SolverConfig& cfg) {
  return IhqsSolver(geom, f, cfg).objective(state);
}

SolverState ihqs_step(const SolverState& state, const Sinogram& f, const ScanGeometry& geom,
                      const SolverConfig& cfg) {
  return IhqsSolver(geom, f, cfg).step(state);
}

Reconstruction reconstruct_from(const Sinogram& f, const ScanGeometry& geom,
                                const SolverConfig& cfg, const Image& u0,
                                const std::optional<Image>& ground_truth) {
  const IhqsSolver solver(geom, f, cfg);
  if (ground_truth && (ground_truth->width() != geom.width || ground_truth->height() != geom.height))
    throw DimensionError("ground truth does not match the geometry grid");

  ProxStats stats;
  SolverState state = solver.initial_state(u0);
  check_finite(state.u.data(), "initialization", 0);

  ConvergenceTrace trace;
  trace.initial_max_abs = u0.max_abs();
  for (int k = 0; k < cfg.max_iter; ++k) {
    StepInfo info;
    state = solver.step(state, &info, &stats);
    ++trace.iterations;
    if (cfg.record_trace) {
      TraceRecord rec;
      rec.iter = state.k;
      rec.rel_change = info.rel_change;
      rec.sq_rel_change = info.sq_rel_change;
      rec.objective = solver.objective(state);
      rec.cg_iters = info.cg.iterations;
      rec.cg_converged = info.cg.converged;
      rec.psnr = ground_truth ? psnr(state.u_bar, *ground_truth, cfg.psnr_peak)
                              : std::numeric_limits<double>::quiet_NaN();
      rec.state_max_abs = std::max({state.u.max_abs(), state.u_bar.max_abs(), state.z.max_abs(),
                                    state.z_bar.max_abs()});
      trace.records.push_back(rec);
    }
    if (info.rel_change <= cfg.epsilon) {
      trace.converged = true;
      break;
    }
  }
  trace.prox_bisection_fallbacks = stats.bisection_fallbacks;
  Reconstruction out{state.u_bar, std::move(state), std::move(trace)};
  return out;
}

Reconstruction reconstruct(const Sinogram& f, const ScanGeometry& geom, const SolverConfig& cfg,
                           const std::optional<Image>& ground_truth) {
  validate(cfg);
  return reconstruct_from(f, geom, cfg, fbp_initial_guess(f, geom, cfg.fbp_window), ground_truth);
}

}  // namespace ihqs
