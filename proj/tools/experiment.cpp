#include "experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <thread>

namespace cli {

namespace fs = std::filesystem;

Geometry make_geometry(const ExperimentConfig& cfg, std::size_t views) {
  ihqs_geometry_desc desc = cfg.geometry;
  desc.width = desc.height = cfg.phantom_size;
  desc.pixel_size = cfg.pixel_size;
  desc.num_views = views;
  ihqs_geometry* g = nullptr;
  check(ihqs_geometry_create(&desc, &g), "geometry");
  return Geometry(g);
}

Image make_phantom(const ExperimentConfig& cfg) {
  ihqs_image* img = nullptr;
  check(ihqs_phantom_shepp_logan(cfg.phantom_size, cfg.pixel_size, &img), "phantom");
  return Image(img);
}

Sinogram simulate_noise(const ihqs_sinogram* clean, const ExperimentConfig& cfg, NoiseLevel level,
                        std::uint64_t seed) {
  double sigma = 0.0, i0 = 0.0;
  if (level != NoiseLevel::None) sigma = cfg.gaussian_sigma;
  if (level == NoiseLevel::Mixed) i0 = cfg.poisson_i0;
  ihqs_sinogram* out = nullptr;
  check(ihqs_add_noise(clean, sigma, i0, seed, &out), "noise");
  return Sinogram(out);
}

MethodResult run_method(Method method, double p, const ihqs_sinogram* sino, const ihqs_geometry* geom,
                        const ExperimentConfig& cfg, const ihqs_image* truth) {
  MethodResult r;
  if (method == Method::Fbp) {
    ihqs_image* img = nullptr;
    check(ihqs_fbp(sino, geom, cfg.solver.fbp_filter, &img), "fbp");
    r.image.reset(img);
    return r;
  }

  ihqs_solver_config sc = cfg.solver;
  sc.p = p;
  sc.record_trace = 1;
  sc.psnr_peak = cfg.peak;
  if (method == Method::Hqs) sc.alpha = sc.beta = 0.0;

  Initializer init;
  if (method == Method::IhqsInit) {
    ihqs_initializer* raw = nullptr;
    check(ihqs_initializer_load(cfg.initializer_file.string().c_str(), &raw), "initializer");
    init.reset(raw);
  }

  ihqs_image* img = nullptr;
  ihqs_trace* trace = nullptr;
  check(ihqs_reconstruct(sino, geom, &sc, init.get(), truth, &img, &trace), "reconstruct");
  r.image.reset(img);
  r.trace.reset(trace);
  r.iters = ihqs_trace_iterations(trace);
  return r;
}

Quality measure(const ihqs_image* x, const ihqs_image* ref, double peak) {
  Quality q;
  check(ihqs_psnr(x, ref, peak, &q.psnr), "psnr");
  check(ihqs_ssim(x, ref, peak, &q.ssim), "ssim");
  check(ihqs_mae_rmse(x, ref, &q.mae, &q.rmse), "mae/rmse");
  return q;
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

namespace {

std::string p_tag(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", p);
  return buf;
}

std::string sinogram_name(std::size_t views, NoiseLevel n) {
  return "sino_v" + std::to_string(views) + "_" + to_string(n) + ".raw";
}

constexpr const char* kMetricsHeader =
    "method,views,noise,p,alpha,beta,psnr,ssim,mae,rmse,iters,wall_seconds\n";

}  // namespace

std::vector<CaseSpec> enumerate_cases(const ExperimentConfig& cfg) {
  std::vector<CaseSpec> cases;
  for (std::size_t v : cfg.views)
    for (NoiseLevel n : cfg.noise)
      for (Method m : cfg.methods) {
        const std::string stem =
            std::string(to_string(m)) + "_v" + std::to_string(v) + "_" + to_string(n);
        if (m == Method::Fbp) {
          cases.push_back({v, n, m, 0.0, stem});
          continue;
        }
        for (double p : cfg.p_values) cases.push_back({v, n, m, p, stem + "_p" + p_tag(p)});
      }
  return cases;
}

int run_experiment(const ExperimentConfig& cfg, unsigned jobs, std::ostream& log) {
  const fs::path out = cfg.out_dir;
  fs::create_directories(out);
  const auto cases = enumerate_cases(cfg);

  nlohmann::ordered_json manifest;
  manifest["library_version"] = ihqs_version();
  manifest["rng"] = ihqs_noise_rng_name();
  manifest["noise_seed"] = cfg.seed;
  manifest["config"] = describe(cfg);
  manifest["phantom_file"] = "phantom.raw";
  auto& mc = manifest["cases"] = nlohmann::ordered_json::array();
  for (const auto& c : cases) {
    const bool iterative = c.method != Method::Fbp;
    nlohmann::ordered_json e = {{"id", c.id},
                                {"method", to_string(c.method)},
                                {"views", c.views},
                                {"noise", to_string(c.noise)},
                                {"sinogram", sinogram_name(c.views, c.noise)},
                                {"image", c.id + ".raw"},
                                {"preview", c.id + ".pgm"}};
    if (iterative) {
      e["p"] = c.p;
      e["alpha"] = c.method == Method::Hqs ? 0.0 : cfg.solver.alpha;
      e["beta"] = c.method == Method::Hqs ? 0.0 : cfg.solver.beta;
      e["trace"] = c.id + "_trace.csv";
    }
    mc.push_back(std::move(e));
  }
  {
    std::ofstream mf(out / "manifest.json");
    mf << manifest.dump(2) << "\n";
    if (!mf) throw LibraryError(IHQS_ERR_IO, "cannot write manifest.json");
  }

  Image phantom = make_phantom(cfg);
  check(ihqs_image_save(phantom.get(), (out / "phantom.raw").c_str()), "phantom.raw");
  check(ihqs_image_save_pgm(phantom.get(), (out / "phantom.pgm").c_str(), cfg.peak), "phantom.pgm");

  // One geometry and one noisy sinogram per (views, noise) pair, shared read-only by cases.
  std::vector<Geometry> geoms;
  std::vector<std::vector<Sinogram>> sinos;
  for (std::size_t v : cfg.views) {
    geoms.push_back(make_geometry(cfg, v));
    ihqs_sinogram* clean = nullptr;
    check(ihqs_forward_project(phantom.get(), geoms.back().get(), &clean), "project");
    Sinogram clean_h(clean);
    auto& row = sinos.emplace_back();
    for (NoiseLevel n : cfg.noise) {
      row.push_back(simulate_noise(clean_h.get(), cfg, n, cfg.seed));
      check(ihqs_sinogram_save(row.back().get(), (out / sinogram_name(v, n)).c_str()), "sinogram");
    }
  }
  auto index_of = [](const auto& list, const auto& value) {
    std::size_t i = 0;
    while (list[i] != value) ++i;
    return i;
  };

  std::ofstream metrics(out / "metrics.csv", std::ios::trunc);
  metrics << kMetricsHeader << std::flush;

  const std::size_t n = cases.size();
  std::vector<std::optional<std::string>> rows(n);
  std::vector<bool> finished(n, false);
  std::size_t committed = 0;
  std::mutex mu;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  int exit_status = 0;

  auto commit = [&](std::size_t i, std::optional<std::string> row) {
    std::lock_guard lock(mu);
    rows[i] = std::move(row);
    finished[i] = true;
    while (committed < n && finished[committed]) {
      if (rows[committed]) metrics << *rows[committed] << std::flush;
      ++committed;
    }
  };

  auto worker = [&] {
    for (;;) {
      if (stop.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      const CaseSpec& c = cases[i];
      const std::size_t vi = index_of(cfg.views, c.views);
      const std::size_t ni = index_of(cfg.noise, c.noise);
      try {
        const auto t0 = std::chrono::steady_clock::now();
        MethodResult r = run_method(c.method, c.p, sinos[vi][ni].get(), geoms[vi].get(), cfg,
                                    phantom.get());
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        check(ihqs_image_save(r.image.get(), (out / (c.id + ".raw")).c_str()), c.id);
        check(ihqs_image_save_pgm(r.image.get(), (out / (c.id + ".pgm")).c_str(), cfg.peak), c.id);
        if (r.trace)
          check(ihqs_trace_write_csv(r.trace.get(), (out / (c.id + "_trace.csv")).c_str()), c.id);
        const Quality q = measure(r.image.get(), phantom.get(), cfg.peak);

        std::string row = std::string(to_string(c.method)) + "," + std::to_string(c.views) + "," +
                          to_string(c.noise) + ",";
        if (c.method == Method::Fbp) {
          row += ",,,";
        } else {
          const bool hqs = c.method == Method::Hqs;
          row += format_number(c.p) + "," + format_number(hqs ? 0.0 : cfg.solver.alpha) + "," +
                 format_number(hqs ? 0.0 : cfg.solver.beta) + ",";
        }
        row += format_number(q.psnr) + "," + format_number(q.ssim) + "," + format_number(q.mae) +
               "," + format_number(q.rmse) + "," + std::to_string(r.iters) + "," +
               format_number(cfg.timing ? wall : 0.0) + "\n";
        commit(i, std::move(row));
      } catch (const LibraryError& e) {
        {
          std::lock_guard lock(mu);
          log << "case " << c.id << " failed: " << e.what() << "\n";
          const int code = e.status == IHQS_ERR_NUMERICAL ? 2 : 1;
          exit_status = std::max(exit_status, code);
        }
        stop.store(true);
        commit(i, std::nullopt);
      }
    }
  };

  const unsigned nthreads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  // Flush rows that completed after an earlier case aborted the sweep.
  for (std::size_t i = committed; i < n; ++i)
    if (finished[i] && rows[i]) metrics << *rows[i];
  metrics.flush();
  if (!metrics) {
    log << "failed writing metrics.csv\n";
    return std::max(exit_status, 1);
  }
  return exit_status;
}

}  // namespace cli
