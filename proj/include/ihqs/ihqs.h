/*
 * C interface to the IHQS sparse-view CT reconstruction library.
 *
 * All objects are opaque handles created by *_create / *_load functions and
 * released with the matching *_destroy. Every fallible call returns an
 * ihqs_status; on failure ihqs_last_error() describes the problem (the
 * message is thread-local and valid until the next failing call on the same
 * thread). Output handles are only written on success.
 */
#ifndef IHQS_IHQS_H
#define IHQS_IHQS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  ifdef IHQS_BUILDING_LIBRARY
#    define IHQS_API __declspec(dllexport)
#  else
#    define IHQS_API __declspec(dllimport)
#  endif
#else
#  define IHQS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ihqs_status {
  IHQS_OK = 0,
  IHQS_ERR_INVALID_ARGUMENT = 1,
  IHQS_ERR_DIMENSION = 2,
  IHQS_ERR_GEOMETRY = 3,
  IHQS_ERR_DOMAIN = 4,
  IHQS_ERR_NUMERICAL = 5,
  IHQS_ERR_IO = 6,
  IHQS_ERR_PARSE = 7,
  IHQS_ERR_INTERNAL = 8
} ihqs_status;

typedef enum ihqs_beam { IHQS_BEAM_PARALLEL = 0, IHQS_BEAM_FAN_EQUIANGULAR = 1 } ihqs_beam;
typedef enum ihqs_filter { IHQS_FILTER_RAMLAK = 0, IHQS_FILTER_HANN = 1 } ihqs_filter;

typedef struct ihqs_image ihqs_image;
typedef struct ihqs_sinogram ihqs_sinogram;
typedef struct ihqs_geometry ihqs_geometry;
typedef struct ihqs_initializer ihqs_initializer;
typedef struct ihqs_trace ihqs_trace;

IHQS_API const char* ihqs_last_error(void);
IHQS_API const char* ihqs_status_name(ihqs_status status);
IHQS_API const char* ihqs_version(void);
/* Byte offset of the last IHQS_ERR_PARSE on this thread, or -1. */
IHQS_API int64_t ihqs_last_parse_offset(void);

/* ---- geometry --------------------------------------------------------- */

/* Zero-valued lengths/counts are resolved to defaults (see README). */
typedef struct ihqs_geometry_desc {
  ihqs_beam beam;
  size_t width;
  size_t height;
  double pixel_size;
  size_t num_views;
  size_t num_bins;
  double detector_spacing;
  double source_to_center;
  double source_to_detector;
  double fov_radius;
} ihqs_geometry_desc;

IHQS_API void ihqs_geometry_desc_init(ihqs_geometry_desc* desc);
IHQS_API ihqs_status ihqs_geometry_create(const ihqs_geometry_desc* desc, ihqs_geometry** out);
/* Copies the resolved description (defaults filled in). */
IHQS_API ihqs_status ihqs_geometry_describe(const ihqs_geometry* geom, ihqs_geometry_desc* out);
IHQS_API void ihqs_geometry_destroy(ihqs_geometry* geom);

/* ---- images ----------------------------------------------------------- */

/* data may be NULL for a zero image; otherwise width*height row-major values. */
IHQS_API ihqs_status ihqs_image_create(size_t width, size_t height, double pixel_size,
                                       const double* data, ihqs_image** out);
IHQS_API ihqs_status ihqs_image_load(const char* path, double pixel_size, ihqs_image** out);
IHQS_API ihqs_status ihqs_image_save(const ihqs_image* img, const char* path);
IHQS_API ihqs_status ihqs_image_save_pgm(const ihqs_image* img, const char* path, double peak);
IHQS_API void ihqs_image_destroy(ihqs_image* img);
IHQS_API size_t ihqs_image_width(const ihqs_image* img);
IHQS_API size_t ihqs_image_height(const ihqs_image* img);
IHQS_API double ihqs_image_pixel_size(const ihqs_image* img);
IHQS_API const double* ihqs_image_data(const ihqs_image* img);

/* ---- sinograms -------------------------------------------------------- */

IHQS_API ihqs_status ihqs_sinogram_create(const ihqs_geometry* geom, const double* data,
                                          ihqs_sinogram** out);
IHQS_API ihqs_status ihqs_sinogram_load(const char* path, const ihqs_geometry* geom,
                                        ihqs_sinogram** out);
IHQS_API ihqs_status ihqs_sinogram_save(const ihqs_sinogram* sino, const char* path);
IHQS_API void ihqs_sinogram_destroy(ihqs_sinogram* sino);
IHQS_API size_t ihqs_sinogram_num_views(const ihqs_sinogram* sino);
IHQS_API size_t ihqs_sinogram_num_bins(const ihqs_sinogram* sino);
IHQS_API const double* ihqs_sinogram_data(const ihqs_sinogram* sino);

/* ---- operators -------------------------------------------------------- */

IHQS_API ihqs_status ihqs_phantom_shepp_logan(size_t n, double pixel_size, ihqs_image** out);
IHQS_API ihqs_status ihqs_forward_project(const ihqs_image* img, const ihqs_geometry* geom,
                                          ihqs_sinogram** out);
IHQS_API ihqs_status ihqs_back_project(const ihqs_sinogram* sino, const ihqs_geometry* geom,
                                       ihqs_image** out);
IHQS_API ihqs_status ihqs_ramp_filter(const ihqs_sinogram* sino, const ihqs_geometry* geom,
                                      ihqs_filter filter, ihqs_sinogram** out);
IHQS_API ihqs_status ihqs_fbp(const ihqs_sinogram* sino, const ihqs_geometry* geom,
                              ihqs_filter filter, ihqs_image** out);

/* poisson_i0 <= 0 disables the Poisson stage. */
IHQS_API ihqs_status ihqs_add_noise(const ihqs_sinogram* sino, double gaussian_sigma,
                                    double poisson_i0, uint64_t seed, ihqs_sinogram** out);
IHQS_API const char* ihqs_noise_rng_name(void);

/* ---- metrics ---------------------------------------------------------- */

/* PSNR is +infinity for identical images. */
IHQS_API ihqs_status ihqs_psnr(const ihqs_image* x, const ihqs_image* ref, double peak,
                               double* out);
IHQS_API ihqs_status ihqs_ssim(const ihqs_image* x, const ihqs_image* ref, double peak,
                               double* out);
IHQS_API ihqs_status ihqs_mae_rmse(const ihqs_image* x, const ihqs_image* ref, double* mae,
                                   double* rmse);

/* ---- solver ----------------------------------------------------------- */

typedef struct ihqs_solver_config {
  double p;
  double lambda;
  double gamma[8];      /* highpass channel weights */
  double gamma_lowpass; /* quadratic weight of the unpenalized lowpass channel */
  double alpha;
  double beta;
  double epsilon;
  int max_iter;
  int cg_max_iter;
  double cg_tol;
  ihqs_filter fbp_filter;
  int record_trace;
  double psnr_peak;
} ihqs_solver_config;

IHQS_API void ihqs_solver_config_init(ihqs_solver_config* cfg);
IHQS_API ihqs_status ihqs_solver_config_validate(const ihqs_solver_config* cfg);

/* CTINIT file: "CTINIT <k>\n", k*k stencil values, bias. */
IHQS_API ihqs_status ihqs_initializer_load(const char* path, ihqs_initializer** out);
IHQS_API ihqs_status ihqs_initializer_create(size_t k, const double* stencil, double bias,
                                             ihqs_initializer** out);
IHQS_API void ihqs_initializer_destroy(ihqs_initializer* init);

/* init may be NULL (identity). ground_truth may be NULL. out_trace may be NULL. */
IHQS_API ihqs_status ihqs_reconstruct(const ihqs_sinogram* sino, const ihqs_geometry* geom,
                                      const ihqs_solver_config* cfg,
                                      const ihqs_initializer* init,
                                      const ihqs_image* ground_truth, ihqs_image** out_image,
                                      ihqs_trace** out_trace);

typedef struct ihqs_trace_record {
  int iter;
  double rel_change;
  double sq_rel_change;
  double objective;
  int cg_iters;
  int cg_converged;
  double psnr;
  double state_max_abs;
} ihqs_trace_record;

IHQS_API size_t ihqs_trace_length(const ihqs_trace* trace);
IHQS_API int ihqs_trace_iterations(const ihqs_trace* trace);
IHQS_API int ihqs_trace_converged(const ihqs_trace* trace);
IHQS_API double ihqs_trace_initial_max_abs(const ihqs_trace* trace);
IHQS_API ihqs_status ihqs_trace_record_at(const ihqs_trace* trace, size_t index,
                                          ihqs_trace_record* out);
/* Header "iter,rel_change,objective,cg_iters,psnr". */
IHQS_API ihqs_status ihqs_trace_write_csv(const ihqs_trace* trace, const char* path);
IHQS_API void ihqs_trace_destroy(ihqs_trace* trace);

#ifdef __cplusplus
}
#endif

#endif /* IHQS_IHQS_H */
