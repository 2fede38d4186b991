#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "ihqs/ihqs.h"
#include "json.hpp"

namespace cli {

/// Invalid or unreadable experiment configuration (exit status 1).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class NoiseLevel { None, Gaussian, Mixed };
enum class Method { Fbp, Hqs, Ihqs, IhqsInit };

const char* to_string(NoiseLevel n);
const char* to_string(Method m);

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "results";

  std::size_t phantom_size = 128;
  double pixel_size = 1.0;

  /// num_views is filled in per case from `views`.
  ihqs_geometry_desc geometry{};
  std::vector<std::size_t> views{90};

  double gaussian_sigma = 0.3;
  double poisson_i0 = 5e5;
  std::vector<NoiseLevel> noise{NoiseLevel::Mixed};

  ihqs_solver_config solver{};
  std::vector<Method> methods{Method::Ihqs};
  std::vector<double> p_values{0.7};
  std::filesystem::path initializer_file;

  double peak = 1.0;
  bool timing = false;

  ExperimentConfig();
};

/// Parses an INI file. Relative paths resolve against the file's directory.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks every block by building it through the library; throws ConfigError.
void validate(const ExperimentConfig& cfg);

/// Fully resolved configuration, as written to the run manifest.
nlohmann::ordered_json describe(const ExperimentConfig& cfg);

}  // namespace cli
