#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ihqs/fbp.hpp"
#include "ihqs/framelet.hpp"
#include "ihqs/linear_solver.hpp"
#include "ihqs/projector.hpp"
#include "ihqs/prox.hpp"
#include "ihqs/types.hpp"

namespace ihqs {

/// Hyperparameters of the inertial Lp half-quadratic splitting loop.
struct SolverConfig {
  double p = 0.7;
  double lambda = 0.0006;
  /// Weights of the 8 penalized highpass channels.
  std::array<double, 8> gamma{0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.2};
  /// Quadratic coupling weight of the unpenalized lowpass channel.
  double gamma_lowpass = 0.2;
  double alpha = 0.5;  ///< z inertia, [0, 1)
  double beta = 0.6;   ///< u inertia, [0, (sqrt(5)-1)/2)
  double epsilon = 1e-4;
  int max_iter = 200;
  CgSettings cg{200, 1e-6};
  Initializer initializer;
  FilterWindow fbp_window = FilterWindow::RamLak;
  bool record_trace = true;
  /// Peak used for the optional per-iteration PSNR against ground truth.
  double psnr_peak = 1.0;

  void set_uniform_gamma(double g) {
    gamma.fill(g);
    gamma_lowpass = g;
  }
  /// Weights in full 9-channel order (lowpass first).
  std::array<double, 9> channel_weights() const;
};

/// Throws InvalidArgument naming the offending field.
void validate(const SolverConfig& cfg);

/// Iterate (u, ubar, z, zbar) after k completed steps.
struct SolverState {
  Image u;
  Image u_bar;
  FrameCoeffs z;
  FrameCoeffs z_bar;
  int k = 0;
};

struct TraceRecord {
  int iter = 0;
  /// ||ubar^{k+1} - ubar^k|| / ||ubar^k||, the stopping quantity.
  double rel_change = 0.0;
  /// ||u^{k+1} - u^k||^2 / ||u^{k+1}||^2.
  double sq_rel_change = 0.0;
  double objective = 0.0;
  int cg_iters = 0;
  bool cg_converged = false;
  /// NaN when no ground truth was supplied.
  double psnr = 0.0;
  /// Largest |value| over u, ubar, z, zbar after the step.
  double state_max_abs = 0.0;
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;
  bool converged = false;
  int iterations = 0;
  double initial_max_abs = 0.0;
  std::size_t prox_bisection_fallbacks = 0;
};

/// CSV with header "iter,rel_change,objective,cg_iters,psnr".
std::string trace_to_csv(const ConvergenceTrace& trace);

/// Per-step diagnostics returned alongside the new state.
struct StepInfo {
  CgReport cg;
  double rel_change = 0.0;
  double sq_rel_change = 0.0;
};

/// Binds a measurement and configuration; each step is a pure function of
/// the incoming state. A^T f is computed once at construction.
class IhqsSolver {
 public:
  IhqsSolver(ScanGeometry geom, Sinogram f, SolverConfig cfg);

  /// u = ubar = u0, z = zbar = W u0.
  SolverState initial_state(const Image& u0) const;

  /// z-prox, z inertia, u CG solve warm-started from the initializer applied
  /// to ubar, u inertia. Throws NumericalError naming the stage that produced
  /// non-finite values.
  SolverState step(const SolverState& state, StepInfo* info = nullptr,
                   ProxStats* stats = nullptr) const;

  /// 1/2||Au - f||^2 + lambda sum_highpass |z|^p + 1/2 sum_c gamma_c ||W_c u - z_c||^2.
  double objective(const SolverState& state) const;

  /// ||A^T(A u - f) + sum_c gamma_c W_c^T (W_c u - zbar_c)|| / ||A^T f||.
  double u_residual(const Image& u, const FrameCoeffs& zbar) const;

  const ScanGeometry& geometry() const noexcept { return geom_; }
  const Sinogram& data() const noexcept { return f_; }
  const SolverConfig& config() const noexcept { return cfg_; }
  const NormalOperator& normal_operator() const noexcept { return op_; }
  const Image& atf() const noexcept { return atf_; }

 private:
  ScanGeometry geom_;
  Sinogram f_;
  SolverConfig cfg_;
  NormalOperator op_;
  Image atf_;
};

double objective_value(const SolverState& state, const Sinogram& f, const ScanGeometry& geom,
                       const SolverConfig& cfg);

SolverState ihqs_step(const SolverState& state, const Sinogram& f, const ScanGeometry& geom,
                      const SolverConfig& cfg);

struct Reconstruction {
  /// ubar at termination.
  Image image;
  SolverState final_state;
  ConvergenceTrace trace;
};

/// Full loop from u0 = max(FBP, 0) until the relative change of ubar drops
/// to epsilon or max_iter steps ran.
Reconstruction reconstruct(const Sinogram& f, const ScanGeometry& geom, const SolverConfig& cfg,
                           const std::optional<Image>& ground_truth = std::nullopt);

/// Same loop from an explicit starting image.
Reconstruction reconstruct_from(const Sinogram& f, const ScanGeometry& geom,
                                const SolverConfig& cfg, const Image& u0,
                                const std::optional<Image>& ground_truth = std::nullopt);

}  // namespace ihqs
