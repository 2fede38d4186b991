#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "handles.hpp"

namespace cli {

// Building blocks shared by the sweep and the single-step subcommands, so a
// pipeline of subcommands runs exactly the same library calls.

Geometry make_geometry(const ExperimentConfig& cfg, std::size_t views);
Image make_phantom(const ExperimentConfig& cfg);
Sinogram simulate_noise(const ihqs_sinogram* clean, const ExperimentConfig& cfg, NoiseLevel level,
                        std::uint64_t seed);

struct MethodResult {
  Image image;
  Trace trace;  // null for FBP
  int iters = 0;
};

/// Runs one reconstruction method. `truth` may be null.
MethodResult run_method(Method method, double p, const ihqs_sinogram* sino, const ihqs_geometry* geom,
                        const ExperimentConfig& cfg, const ihqs_image* truth);

struct Quality {
  double psnr = 0, ssim = 0, mae = 0, rmse = 0;
};
Quality measure(const ihqs_image* x, const ihqs_image* ref, double peak);

/// %.9g, with "inf" for the PSNR sentinel.
std::string format_number(double v);

struct CaseSpec {
  std::size_t views;
  NoiseLevel noise;
  Method method;
  double p;  // unused by FBP
  std::string id;
};

std::vector<CaseSpec> enumerate_cases(const ExperimentConfig& cfg);

/// Full sweep; returns the process exit status (0, 1 or 2).
int run_experiment(const ExperimentConfig& cfg, unsigned jobs, std::ostream& log);

}  // namespace cli
