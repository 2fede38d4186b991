// ihqs-cli: phantom generation, projection, noise, reconstruction and
// experiment sweeps on top of libihqs.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "config.hpp"
#include "experiment.hpp"
#include "handles.hpp"

using namespace cli;

namespace {

struct Globals {
  std::string config_path;
  unsigned jobs = 1;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

ExperimentConfig load(const Globals& g) {
  ExperimentConfig cfg;
  if (!g.config_path.empty()) cfg = load_config(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  return cfg;
}

std::size_t views_or_default(const ExperimentConfig& cfg, std::size_t views) {
  return views ? views : cfg.views.front();
}

Image load_image(const std::string& path, const ExperimentConfig& cfg) {
  ihqs_image* img = nullptr;
  check(ihqs_image_load(path.c_str(), cfg.pixel_size, &img), path);
  return Image(img);
}

Sinogram load_sinogram(const std::string& path, const ihqs_geometry* geom) {
  ihqs_sinogram* s = nullptr;
  check(ihqs_sinogram_load(path.c_str(), geom, &s), path);
  return Sinogram(s);
}

void save_image(const ihqs_image* img, const std::string& path, const std::string& pgm,
                double peak) {
  check(ihqs_image_save(img, path.c_str()), path);
  if (!pgm.empty()) check(ihqs_image_save_pgm(img, pgm.c_str(), peak), pgm);
}

Method parse_method(const std::string& s) {
  if (s == "fbp") return Method::Fbp;
  if (s == "hqs") return Method::Hqs;
  if (s == "ihqs") return Method::Ihqs;
  if (s == "ihqs_init") return Method::IhqsInit;
  throw ConfigError("--method: unknown method '" + s + "'");
}

NoiseLevel parse_level(const std::string& s) {
  if (s == "none") return NoiseLevel::None;
  if (s == "gaussian") return NoiseLevel::Gaussian;
  if (s == "mixed") return NoiseLevel::Mixed;
  throw ConfigError("--level: unknown noise level '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse-view CT reconstruction with inertial Lp half-quadratic splitting"};
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "Experiment INI file")->check(CLI::ExistingFile);
  app.add_option("--jobs", g.jobs, "Parallel sweep cases")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Noise seed (overrides [experiment] seed)");
  app.add_option("--out", g.out_dir, "Sweep output directory (overrides [experiment] out)");

  std::string in, output, pgm, ref, truth, trace, method = "ihqs", level = "mixed";
  std::size_t views = 0, size = 0;
  double pixel_size = 0.0, peak = 0.0;
  std::optional<double> p;

  auto* phantom = app.add_subcommand("phantom", "Write a modified Shepp-Logan phantom");
  phantom->add_option("--size", size, "Image side length");
  phantom->add_option("--pixel-size", pixel_size, "Physical pixel size");
  phantom->add_option("-o,--output", output, "Output raw image")->required();
  phantom->add_option("--pgm", pgm, "Optional 16-bit PGM preview");

  auto* project = app.add_subcommand("project", "Forward project an image");
  project->add_option("-i,--input", in, "Input raw image")->required();
  project->add_option("-o,--output", output, "Output raw sinogram")->required();
  project->add_option("--views", views, "View count (default: first [sweep] views)");

  auto* addnoise = app.add_subcommand("addnoise", "Add Poisson and/or Gaussian noise");
  addnoise->add_option("-i,--input", in, "Input raw sinogram")->required();
  addnoise->add_option("-o,--output", output, "Output raw sinogram")->required();
  addnoise->add_option("--views", views, "View count of the sinogram");
  addnoise->add_option("--level", level, "none | gaussian | mixed");

  auto* fbp = app.add_subcommand("fbp", "Filtered backprojection");
  fbp->add_option("-i,--input", in, "Input raw sinogram")->required();
  fbp->add_option("-o,--output", output, "Output raw image")->required();
  fbp->add_option("--views", views, "View count of the sinogram");
  fbp->add_option("--pgm", pgm, "Optional 16-bit PGM preview");

  auto* recon = app.add_subcommand("reconstruct", "Iterative reconstruction");
  recon->add_option("-i,--input", in, "Input raw sinogram")->required();
  recon->add_option("-o,--output", output, "Output raw image")->required();
  recon->add_option("--views", views, "View count of the sinogram");
  recon->add_option("--method", method, "fbp | hqs | ihqs | ihqs_init");
  recon->add_option("--p", p, "Lp exponent (default: [solver] p)");
  recon->add_option("--truth", truth, "Ground truth image for the PSNR trace column");
  recon->add_option("--trace", trace, "Trace CSV output");
  recon->add_option("--pgm", pgm, "Optional 16-bit PGM preview");

  auto* metrics = app.add_subcommand("metrics", "Compare an image against a reference");
  metrics->add_option("-i,--input", in, "Raw image")->required();
  metrics->add_option("--ref", ref, "Reference raw image")->required();
  metrics->add_option("--peak", peak, "Peak value (default: [output] peak)");

  auto* sweep = app.add_subcommand("sweep", "Run the configured experiment grid");
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    ExperimentConfig cfg = load(g);

    if (*phantom) {
      if (size) cfg.phantom_size = size;
      if (pixel_size > 0) cfg.pixel_size = pixel_size;
      Image img = make_phantom(cfg);
      save_image(img.get(), output, pgm, cfg.peak);
    } else if (*project) {
      Image img = load_image(in, cfg);
      cfg.phantom_size = ihqs_image_width(img.get());
      Geometry geom = make_geometry(cfg, views_or_default(cfg, views));
      ihqs_sinogram* s = nullptr;
      check(ihqs_forward_project(img.get(), geom.get(), &s), "project");
      Sinogram sino(s);
      check(ihqs_sinogram_save(sino.get(), output.c_str()), output);
    } else if (*addnoise) {
      Geometry geom = make_geometry(cfg, views_or_default(cfg, views));
      Sinogram clean = load_sinogram(in, geom.get());
      Sinogram noisy = simulate_noise(clean.get(), cfg, parse_level(level), cfg.seed);
      check(ihqs_sinogram_save(noisy.get(), output.c_str()), output);
    } else if (*fbp) {
      Geometry geom = make_geometry(cfg, views_or_default(cfg, views));
      Sinogram sino = load_sinogram(in, geom.get());
      MethodResult r = run_method(Method::Fbp, 0.0, sino.get(), geom.get(), cfg, nullptr);
      save_image(r.image.get(), output, pgm, cfg.peak);
    } else if (*recon) {
      const Method m = parse_method(method);
      if (m == Method::IhqsInit && cfg.initializer_file.empty())
        throw ConfigError("[solver] initializer: required by method ihqs_init");
      Geometry geom = make_geometry(cfg, views_or_default(cfg, views));
      Sinogram sino = load_sinogram(in, geom.get());
      Image gt;
      if (!truth.empty()) gt = load_image(truth, cfg);
      const double pv = p.value_or(cfg.solver.p);
      ihqs_solver_config sc = cfg.solver;
      sc.p = pv;
      if (ihqs_solver_config_validate(&sc) != IHQS_OK)
        throw ConfigError(std::string("[solver]: ") + ihqs_last_error());
      MethodResult r = run_method(m, pv, sino.get(), geom.get(), cfg, gt.get());
      save_image(r.image.get(), output, pgm, cfg.peak);
      if (!trace.empty() && r.trace)
        check(ihqs_trace_write_csv(r.trace.get(), trace.c_str()), trace);
      if (r.trace)
        std::cerr << "iterations " << r.iters
                  << (ihqs_trace_converged(r.trace.get()) ? " (converged)" : " (max_iter reached)")
                  << "\n";
    } else if (*metrics) {
      Image x = load_image(in, cfg);
      Image y = load_image(ref, cfg);
      const Quality q = measure(x.get(), y.get(), peak > 0 ? peak : cfg.peak);
      std::cout << "psnr,ssim,mae,rmse\n"
                << format_number(q.psnr) << "," << format_number(q.ssim) << ","
                << format_number(q.mae) << "," << format_number(q.rmse) << "\n";
    } else {
      (void)sweep;
      if (g.config_path.empty()) throw ConfigError("--config is required to run a sweep");
      validate(cfg);
      return run_experiment(cfg, g.jobs, std::cerr);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const LibraryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.status == IHQS_ERR_NUMERICAL ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
