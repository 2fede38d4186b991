#include "ihqs/ihqs.h"

#include <cmath>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "ihqs/fbp.hpp"
#include "ihqs/io.hpp"
#include "ihqs/metrics.hpp"
#include "ihqs/phantom.hpp"
#include "ihqs/projector.hpp"
#include "ihqs/solver.hpp"

struct ihqs_image {
  ihqs::Image value;
};
struct ihqs_sinogram {
  ihqs::Sinogram value;
};
struct ihqs_geometry {
  ihqs::ScanGeometry value;
};
struct ihqs_initializer {
  ihqs::Initializer value;
};
struct ihqs_trace {
  ihqs::ConvergenceTrace value;
};

namespace {

thread_local std::string g_last_error;
thread_local int64_t g_parse_offset = -1;

ihqs_status fail(ihqs_status status, const std::string& msg) {
  g_last_error = msg;
  return status;
}

/// Runs fn, translating library exceptions into status codes.
template <class Fn>
ihqs_status guarded(Fn&& fn) {
  try {
    fn();
    return IHQS_OK;
  } catch (const ihqs::ParseError& e) {
    g_parse_offset = static_cast<int64_t>(e.offset());
    return fail(IHQS_ERR_PARSE, e.what());
  } catch (const ihqs::DimensionError& e) {
    return fail(IHQS_ERR_DIMENSION, e.what());
  } catch (const ihqs::GeometryError& e) {
    return fail(IHQS_ERR_GEOMETRY, e.what());
  } catch (const ihqs::DomainError& e) {
    return fail(IHQS_ERR_DOMAIN, e.what());
  } catch (const ihqs::NumericalError& e) {
    return fail(IHQS_ERR_NUMERICAL, e.what());
  } catch (const ihqs::IoError& e) {
    return fail(IHQS_ERR_IO, e.what());
  } catch (const ihqs::InvalidArgument& e) {
    return fail(IHQS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(IHQS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(IHQS_ERR_INTERNAL, e.what());
  }
}

#define IHQS_REQUIRE(cond, msg) \
  if (!(cond)) return fail(IHQS_ERR_INVALID_ARGUMENT, msg)

ihqs::ScanGeometry to_geometry(const ihqs_geometry_desc& d) {
  ihqs::ScanGeometry g;
  g.beam = d.beam == IHQS_BEAM_FAN_EQUIANGULAR ? ihqs::BeamType::FanEquiangular
                                               : ihqs::BeamType::Parallel;
  g.width = d.width;
  g.height = d.height;
  g.pixel_size = d.pixel_size;
  g.num_views = d.num_views;
  g.num_bins = d.num_bins;
  g.detector_spacing = d.detector_spacing;
  g.source_to_center = d.source_to_center;
  g.source_to_detector = d.source_to_detector;
  g.fov_radius = d.fov_radius;
  return g;
}

ihqs::FilterWindow to_window(ihqs_filter f) {
  return f == IHQS_FILTER_HANN ? ihqs::FilterWindow::Hann : ihqs::FilterWindow::RamLak;
}

ihqs::SolverConfig to_config(const ihqs_solver_config& c) {
  ihqs::SolverConfig cfg;
  cfg.p = c.p;
  cfg.lambda = c.lambda;
  for (std::size_t i = 0; i < 8; ++i) cfg.gamma[i] = c.gamma[i];
  cfg.gamma_lowpass = c.gamma_lowpass;
  cfg.alpha = c.alpha;
  cfg.beta = c.beta;
  cfg.epsilon = c.epsilon;
  cfg.max_iter = c.max_iter;
  cfg.cg.max_iter = c.cg_max_iter;
  cfg.cg.tol = c.cg_tol;
  cfg.fbp_window = to_window(c.fbp_filter);
  cfg.record_trace = c.record_trace != 0;
  cfg.psnr_peak = c.psnr_peak;
  return cfg;
}

}  // namespace

extern "C" {

const char* ihqs_last_error(void) { return g_last_error.c_str(); }

int64_t ihqs_last_parse_offset(void) { return g_parse_offset; }

const char* ihqs_version(void) { return "1.0.0"; }

const char* ihqs_status_name(ihqs_status status) {
  switch (status) {
    case IHQS_OK: return "ok";
    case IHQS_ERR_INVALID_ARGUMENT: return "invalid argument";
    case IHQS_ERR_DIMENSION: return "dimension mismatch";
    case IHQS_ERR_GEOMETRY: return "invalid geometry";
    case IHQS_ERR_DOMAIN: return "domain error";
    case IHQS_ERR_NUMERICAL: return "numerical divergence";
    case IHQS_ERR_IO: return "i/o error";
    case IHQS_ERR_PARSE: return "parse error";
    case IHQS_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

void ihqs_geometry_desc_init(ihqs_geometry_desc* desc) {
  if (!desc) return;
  *desc = ihqs_geometry_desc{};
  desc->beam = IHQS_BEAM_FAN_EQUIANGULAR;
  desc->pixel_size = 1.0;
}

ihqs_status ihqs_geometry_create(const ihqs_geometry_desc* desc, ihqs_geometry** out) {
  IHQS_REQUIRE(desc && out, "null argument");
  return guarded([&] { *out = new ihqs_geometry{ihqs::make_geometry(to_geometry(*desc))}; });
}

ihqs_status ihqs_geometry_describe(const ihqs_geometry* geom, ihqs_geometry_desc* out) {
  IHQS_REQUIRE(geom && out, "null argument");
  const auto& g = geom->value;
  out->beam = g.beam == ihqs::BeamType::FanEquiangular ? IHQS_BEAM_FAN_EQUIANGULAR
                                                       : IHQS_BEAM_PARALLEL;
  out->width = g.width;
  out->height = g.height;
  out->pixel_size = g.pixel_size;
  out->num_views = g.num_views;
  out->num_bins = g.num_bins;
  out->detector_spacing = g.detector_spacing;
  out->source_to_center = g.source_to_center;
  out->source_to_detector = g.source_to_detector;
  out->fov_radius = g.fov_radius;
  return IHQS_OK;
}

void ihqs_geometry_destroy(ihqs_geometry* geom) { delete geom; }

ihqs_status ihqs_image_create(size_t width, size_t height, double pixel_size, const double* data,
                              ihqs_image** out) {
  IHQS_REQUIRE(out, "null argument");
  IHQS_REQUIRE(width > 0 && height > 0, "image dimensions must be positive");
  return guarded([&] {
    std::vector<double> values(width * height, 0.0);
    if (data) values.assign(data, data + width * height);
    *out = new ihqs_image{ihqs::Image(width, height, pixel_size, std::move(values))};
  });
}

ihqs_status ihqs_image_load(const char* path, double pixel_size, ihqs_image** out) {
  IHQS_REQUIRE(path && out, "null argument");
  return guarded([&] { *out = new ihqs_image{ihqs::load_image(path, pixel_size)}; });
}

ihqs_status ihqs_image_save(const ihqs_image* img, const char* path) {
  IHQS_REQUIRE(img && path, "null argument");
  return guarded([&] { ihqs::save_image(path, img->value); });
}

ihqs_status ihqs_image_save_pgm(const ihqs_image* img, const char* path, double peak) {
  IHQS_REQUIRE(img && path, "null argument");
  return guarded([&] { ihqs::save_pgm16(path, img->value, peak); });
}

void ihqs_image_destroy(ihqs_image* img) { delete img; }
size_t ihqs_image_width(const ihqs_image* img) { return img ? img->value.width() : 0; }
size_t ihqs_image_height(const ihqs_image* img) { return img ? img->value.height() : 0; }
double ihqs_image_pixel_size(const ihqs_image* img) { return img ? img->value.pixel_size() : 0.0; }
const double* ihqs_image_data(const ihqs_image* img) {
  return img ? img->value.values().data() : nullptr;
}

ihqs_status ihqs_sinogram_create(const ihqs_geometry* geom, const double* data,
                                 ihqs_sinogram** out) {
  IHQS_REQUIRE(geom && out, "null argument");
  return guarded([&] {
    const auto& g = geom->value;
    std::vector<double> values(g.num_views * g.num_bins, 0.0);
    if (data) values.assign(data, data + values.size());
    *out = new ihqs_sinogram{ihqs::Sinogram(g.view_angles(), g.num_bins, std::move(values))};
  });
}

ihqs_status ihqs_sinogram_load(const char* path, const ihqs_geometry* geom, ihqs_sinogram** out) {
  IHQS_REQUIRE(path && geom && out, "null argument");
  return guarded([&] { *out = new ihqs_sinogram{ihqs::load_sinogram(path, geom->value)}; });
}

ihqs_status ihqs_sinogram_save(const ihqs_sinogram* sino, const char* path) {
  IHQS_REQUIRE(sino && path, "null argument");
  return guarded([&] { ihqs::save_sinogram(path, sino->value); });
}

void ihqs_sinogram_destroy(ihqs_sinogram* sino) { delete sino; }
size_t ihqs_sinogram_num_views(const ihqs_sinogram* s) { return s ? s->value.num_views() : 0; }
size_t ihqs_sinogram_num_bins(const ihqs_sinogram* s) { return s ? s->value.num_bins() : 0; }
const double* ihqs_sinogram_data(const ihqs_sinogram* s) {
  return s ? s->value.values().data() : nullptr;
}

ihqs_status ihqs_phantom_shepp_logan(size_t n, double pixel_size, ihqs_image** out) {
  IHQS_REQUIRE(out, "null argument");
  return guarded([&] { *out = new ihqs_image{ihqs::shepp_logan(n, pixel_size)}; });
}

ihqs_status ihqs_forward_project(const ihqs_image* img, const ihqs_geometry* geom,
                                 ihqs_sinogram** out) {
  IHQS_REQUIRE(img && geom && out, "null argument");
  return guarded([&] { *out = new ihqs_sinogram{ihqs::forward_project(img->value, geom->value)}; });
}

ihqs_status ihqs_back_project(const ihqs_sinogram* sino, const ihqs_geometry* geom,
                              ihqs_image** out) {
  IHQS_REQUIRE(sino && geom && out, "null argument");
  return guarded([&] { *out = new ihqs_image{ihqs::back_project(sino->value, geom->value)}; });
}

ihqs_status ihqs_ramp_filter(const ihqs_sinogram* sino, const ihqs_geometry* geom,
                             ihqs_filter filter, ihqs_sinogram** out) {
  IHQS_REQUIRE(sino && geom && out, "null argument");
  return guarded([&] {
    *out = new ihqs_sinogram{ihqs::ramp_filter(sino->value, geom->value, to_window(filter))};
  });
}

ihqs_status ihqs_fbp(const ihqs_sinogram* sino, const ihqs_geometry* geom, ihqs_filter filter,
                     ihqs_image** out) {
  IHQS_REQUIRE(sino && geom && out, "null argument");
  return guarded([&] {
    *out = new ihqs_image{ihqs::fbp_reconstruct(sino->value, geom->value, to_window(filter))};
  });
}

ihqs_status ihqs_add_noise(const ihqs_sinogram* sino, double gaussian_sigma, double poisson_i0,
                           uint64_t seed, ihqs_sinogram** out) {
  IHQS_REQUIRE(sino && out, "null argument");
  return guarded([&] {
    ihqs::NoiseSpec spec;
    spec.gaussian_sigma = gaussian_sigma;
    if (poisson_i0 > 0.0) spec.poisson_i0 = poisson_i0;
    spec.seed = seed;
    *out = new ihqs_sinogram{ihqs::add_noise(sino->value, spec)};
  });
}

const char* ihqs_noise_rng_name(void) { return ihqs::kNoiseRngName; }

ihqs_status ihqs_psnr(const ihqs_image* x, const ihqs_image* ref, double peak, double* out) {
  IHQS_REQUIRE(x && ref && out, "null argument");
  return guarded([&] { *out = ihqs::psnr(x->value, ref->value, peak); });
}

ihqs_status ihqs_ssim(const ihqs_image* x, const ihqs_image* ref, double peak, double* out) {
  IHQS_REQUIRE(x && ref && out, "null argument");
  return guarded([&] { *out = ihqs::ssim(x->value, ref->value, peak); });
}

ihqs_status ihqs_mae_rmse(const ihqs_image* x, const ihqs_image* ref, double* mae, double* rmse) {
  IHQS_REQUIRE(x && ref && mae && rmse, "null argument");
  return guarded([&] {
    const auto [m, r] = ihqs::mae_rmse(x->value, ref->value);
    *mae = m;
    *rmse = r;
  });
}

void ihqs_solver_config_init(ihqs_solver_config* cfg) {
  if (!cfg) return;
  const ihqs::SolverConfig d;
  cfg->p = d.p;
  cfg->lambda = d.lambda;
  for (std::size_t i = 0; i < 8; ++i) cfg->gamma[i] = d.gamma[i];
  cfg->gamma_lowpass = d.gamma_lowpass;
  cfg->alpha = d.alpha;
  cfg->beta = d.beta;
  cfg->epsilon = d.epsilon;
  cfg->max_iter = d.max_iter;
  cfg->cg_max_iter = d.cg.max_iter;
  cfg->cg_tol = d.cg.tol;
  cfg->fbp_filter = IHQS_FILTER_RAMLAK;
  cfg->record_trace = 1;
  cfg->psnr_peak = d.psnr_peak;
}

ihqs_status ihqs_solver_config_validate(const ihqs_solver_config* cfg) {
  IHQS_REQUIRE(cfg, "null argument");
  return guarded([&] { ihqs::validate(to_config(*cfg)); });
}

ihqs_status ihqs_initializer_load(const char* path, ihqs_initializer** out) {
  IHQS_REQUIRE(path && out, "null argument");
  return guarded([&] { *out = new ihqs_initializer{ihqs::load_initializer(path)}; });
}

ihqs_status ihqs_initializer_create(size_t k, const double* stencil, double bias,
                                    ihqs_initializer** out) {
  IHQS_REQUIRE(stencil && out, "null argument");
  return guarded([&] {
    *out = new ihqs_initializer{
        ihqs::Initializer::correction_field(k, std::vector<double>(stencil, stencil + k * k), bias)};
  });
}

void ihqs_initializer_destroy(ihqs_initializer* init) { delete init; }

ihqs_status ihqs_reconstruct(const ihqs_sinogram* sino, const ihqs_geometry* geom,
                             const ihqs_solver_config* cfg, const ihqs_initializer* init,
                             const ihqs_image* ground_truth, ihqs_image** out_image,
                             ihqs_trace** out_trace) {
  IHQS_REQUIRE(sino && geom && cfg && out_image, "null argument");
  return guarded([&] {
    ihqs::SolverConfig config = to_config(*cfg);
    if (init) config.initializer = init->value;
    std::optional<ihqs::Image> truth;
    if (ground_truth) truth = ground_truth->value;
    auto result = ihqs::reconstruct(sino->value, geom->value, config, truth);
    auto image = std::make_unique<ihqs_image>(ihqs_image{std::move(result.image)});
    if (out_trace) *out_trace = new ihqs_trace{std::move(result.trace)};
    *out_image = image.release();
  });
}

size_t ihqs_trace_length(const ihqs_trace* t) { return t ? t->value.records.size() : 0; }
int ihqs_trace_iterations(const ihqs_trace* t) { return t ? t->value.iterations : 0; }
int ihqs_trace_converged(const ihqs_trace* t) { return t && t->value.converged ? 1 : 0; }
double ihqs_trace_initial_max_abs(const ihqs_trace* t) { return t ? t->value.initial_max_abs : 0.0; }

ihqs_status ihqs_trace_record_at(const ihqs_trace* trace, size_t index, ihqs_trace_record* out) {
  IHQS_REQUIRE(trace && out, "null argument");
  if (index >= trace->value.records.size())
    return fail(IHQS_ERR_INVALID_ARGUMENT, "trace index out of range");
  const auto& r = trace->value.records[index];
  *out = ihqs_trace_record{r.iter,     r.rel_change,      r.sq_rel_change, r.objective,
                           r.cg_iters, r.cg_converged ? 1 : 0, r.psnr,  r.state_max_abs};
  return IHQS_OK;
}

ihqs_status ihqs_trace_write_csv(const ihqs_trace* trace, const char* path) {
  IHQS_REQUIRE(trace && path, "null argument");
  return guarded([&] { ihqs::write_file(path, ihqs::trace_to_csv(trace->value)); });
}

void ihqs_trace_destroy(ihqs_trace* trace) { delete trace; }

}  // extern "C"
