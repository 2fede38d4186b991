#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

namespace cli {

namespace pt = boost::property_tree;

const char* to_string(NoiseLevel n) {
  switch (n) {
    case NoiseLevel::None: return "none";
    case NoiseLevel::Gaussian: return "gaussian";
    case NoiseLevel::Mixed: return "mixed";
  }
  return "?";
}

const char* to_string(Method m) {
  switch (m) {
    case Method::Fbp: return "fbp";
    case Method::Hqs: return "hqs";
    case Method::Ihqs: return "ihqs";
    case Method::IhqsInit: return "ihqs_init";
  }
  return "?";
}

ExperimentConfig::ExperimentConfig() {
  ihqs_geometry_desc_init(&geometry);
  ihqs_solver_config_init(&solver);
}

namespace {

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"experiment", {"seed", "out"}},
    {"phantom", {"size", "pixel_size"}},
    {"geometry",
     {"beam", "bins", "detector_spacing", "source_to_center", "source_to_detector", "fov_radius"}},
    {"noise", {"gaussian_sigma", "poisson_i0"}},
    {"solver",
     {"p", "lambda", "gamma", "gamma_lowpass", "alpha", "beta", "epsilon", "max_iter",
      "cg_max_iter", "cg_tol", "filter", "initializer"}},
    {"sweep", {"views", "p", "methods", "noise"}},
    {"output", {"peak", "timing"}},
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    const auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    const auto v = sec->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return trim(*v);
  }

  void real(const std::string& section, const std::string& key, double& dst) const {
    if (auto v = raw(section, key)) dst = parse_real(field(section, key), *v);
  }

  template <class Int>
  void integer(const std::string& section, const std::string& key, Int& dst) const {
    if (auto v = raw(section, key)) dst = parse_int<Int>(field(section, key), *v);
  }

  static std::string field(const std::string& section, const std::string& key) {
    return "[" + section + "] " + key;
  }

  static double parse_real(const std::string& name, const std::string& v) {
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(d))
      throw ConfigError(name + ": expected a finite number, got '" + v + "'");
    return d;
  }

  template <class Int>
  static Int parse_int(const std::string& name, const std::string& v) {
    Int out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size())
      throw ConfigError(name + ": expected a non-negative integer, got '" + v + "'");
    return out;
  }

 private:
  const pt::ptree& tree_;
};

void check_known_keys(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    const auto it = kKnownKeys.find(section);
    if (it == kKnownKeys.end()) {
      if (body.empty()) throw ConfigError("key '" + section + "' must sit inside a section");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, unused] : body)
      if (!it->second.count(key)) throw ConfigError("unknown key " + Reader::field(section, key));
  }
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  check_known_keys(tree);

  ExperimentConfig cfg;
  const Reader r(tree);
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) {
    std::filesystem::path q(p);
    return q.is_absolute() ? q : base / q;
  };

  r.integer("experiment", "seed", cfg.seed);
  if (auto v = r.raw("experiment", "out")) cfg.out_dir = resolve(*v);

  r.integer("phantom", "size", cfg.phantom_size);
  r.real("phantom", "pixel_size", cfg.pixel_size);

  if (auto v = r.raw("geometry", "beam")) {
    if (*v == "parallel")
      cfg.geometry.beam = IHQS_BEAM_PARALLEL;
    else if (*v == "fan")
      cfg.geometry.beam = IHQS_BEAM_FAN_EQUIANGULAR;
    else
      throw ConfigError("[geometry] beam: expected 'parallel' or 'fan', got '" + *v + "'");
  }
  r.integer("geometry", "bins", cfg.geometry.num_bins);
  r.real("geometry", "detector_spacing", cfg.geometry.detector_spacing);
  r.real("geometry", "source_to_center", cfg.geometry.source_to_center);
  r.real("geometry", "source_to_detector", cfg.geometry.source_to_detector);
  r.real("geometry", "fov_radius", cfg.geometry.fov_radius);

  r.real("noise", "gaussian_sigma", cfg.gaussian_sigma);
  r.real("noise", "poisson_i0", cfg.poisson_i0);

  auto& s = cfg.solver;
  r.real("solver", "p", s.p);
  r.real("solver", "lambda", s.lambda);
  if (auto v = r.raw("solver", "gamma")) {
    const auto items = split_list(*v);
    if (items.size() == 1) {
      const double g = Reader::parse_real("[solver] gamma", items[0]);
      for (double& x : s.gamma) x = g;
      s.gamma_lowpass = g;
    } else if (items.size() == 8) {
      for (std::size_t i = 0; i < 8; ++i) s.gamma[i] = Reader::parse_real("[solver] gamma", items[i]);
    } else {
      throw ConfigError("[solver] gamma: expected 1 or 8 values, got " +
                        std::to_string(items.size()));
    }
  }
  r.real("solver", "gamma_lowpass", s.gamma_lowpass);
  r.real("solver", "alpha", s.alpha);
  r.real("solver", "beta", s.beta);
  r.real("solver", "epsilon", s.epsilon);
  r.integer("solver", "max_iter", s.max_iter);
  r.integer("solver", "cg_max_iter", s.cg_max_iter);
  r.real("solver", "cg_tol", s.cg_tol);
  if (auto v = r.raw("solver", "filter")) {
    if (*v == "ramlak")
      s.fbp_filter = IHQS_FILTER_RAMLAK;
    else if (*v == "hann")
      s.fbp_filter = IHQS_FILTER_HANN;
    else
      throw ConfigError("[solver] filter: expected 'ramlak' or 'hann', got '" + *v + "'");
  }
  if (auto v = r.raw("solver", "initializer"); v && !v->empty()) cfg.initializer_file = resolve(*v);
  cfg.p_values = {s.p};

  if (auto v = r.raw("sweep", "views")) {
    cfg.views.clear();
    for (const auto& item : split_list(*v))
      cfg.views.push_back(Reader::parse_int<std::size_t>("[sweep] views", item));
  }
  if (auto v = r.raw("sweep", "p")) {
    cfg.p_values.clear();
    for (const auto& item : split_list(*v)) cfg.p_values.push_back(Reader::parse_real("[sweep] p", item));
  }
  if (auto v = r.raw("sweep", "methods")) {
    cfg.methods.clear();
    for (const auto& item : split_list(*v)) {
      if (item == "fbp") cfg.methods.push_back(Method::Fbp);
      else if (item == "hqs") cfg.methods.push_back(Method::Hqs);
      else if (item == "ihqs") cfg.methods.push_back(Method::Ihqs);
      else if (item == "ihqs_init") cfg.methods.push_back(Method::IhqsInit);
      else throw ConfigError("[sweep] methods: unknown method '" + item + "'");
    }
  }
  if (auto v = r.raw("sweep", "noise")) {
    cfg.noise.clear();
    for (const auto& item : split_list(*v)) {
      if (item == "none") cfg.noise.push_back(NoiseLevel::None);
      else if (item == "gaussian") cfg.noise.push_back(NoiseLevel::Gaussian);
      else if (item == "mixed") cfg.noise.push_back(NoiseLevel::Mixed);
      else throw ConfigError("[sweep] noise: unknown level '" + item + "'");
    }
  }

  r.real("output", "peak", cfg.peak);
  if (auto v = r.raw("output", "timing")) {
    if (*v == "true" || *v == "1") cfg.timing = true;
    else if (*v == "false" || *v == "0") cfg.timing = false;
    else throw ConfigError("[output] timing: expected true or false, got '" + *v + "'");
  }
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.phantom_size < 16) throw ConfigError("[phantom] size: must be at least 16");
  if (!(cfg.pixel_size > 0.0)) throw ConfigError("[phantom] pixel_size: must be positive");
  if (cfg.views.empty()) throw ConfigError("[sweep] views: list is empty");
  if (cfg.methods.empty()) throw ConfigError("[sweep] methods: list is empty");
  if (cfg.noise.empty()) throw ConfigError("[sweep] noise: list is empty");
  if (cfg.p_values.empty()) throw ConfigError("[sweep] p: list is empty");
  if (cfg.gaussian_sigma < 0.0) throw ConfigError("[noise] gaussian_sigma: must be non-negative");
  if (!(cfg.poisson_i0 > 0.0)) throw ConfigError("[noise] poisson_i0: must be positive");
  if (!(cfg.peak > 0.0)) throw ConfigError("[output] peak: must be positive");

  for (std::size_t v : cfg.views) {
    if (v == 0) throw ConfigError("[sweep] views: view counts must be positive");
    ihqs_geometry_desc desc = cfg.geometry;
    desc.width = desc.height = cfg.phantom_size;
    desc.pixel_size = cfg.pixel_size;
    desc.num_views = v;
    ihqs_geometry* g = nullptr;
    if (ihqs_geometry_create(&desc, &g) != IHQS_OK)
      throw ConfigError(std::string("[geometry]: ") + ihqs_last_error());
    ihqs_geometry_destroy(g);
  }

  for (double p : cfg.p_values) {
    ihqs_solver_config s = cfg.solver;
    s.p = p;
    if (ihqs_solver_config_validate(&s) != IHQS_OK)
      throw ConfigError(std::string("[solver]: ") + ihqs_last_error());
  }

  for (Method m : cfg.methods) {
    if (m != Method::IhqsInit) continue;
    if (cfg.initializer_file.empty())
      throw ConfigError("[solver] initializer: required by method ihqs_init");
    ihqs_initializer* init = nullptr;
    if (ihqs_initializer_load(cfg.initializer_file.string().c_str(), &init) != IHQS_OK)
      throw ConfigError(std::string("[solver] initializer: ") + ihqs_last_error());
    ihqs_initializer_destroy(init);
  }
}

nlohmann::ordered_json describe(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["experiment"] = {{"seed", cfg.seed}, {"out", cfg.out_dir.string()}};
  j["phantom"] = {{"kind", "modified_shepp_logan"},
                  {"size", cfg.phantom_size},
                  {"pixel_size", cfg.pixel_size}};
  const auto& g = cfg.geometry;
  j["geometry"] = {{"beam", g.beam == IHQS_BEAM_PARALLEL ? "parallel" : "fan"},
                   {"bins", g.num_bins},
                   {"detector_spacing", g.detector_spacing},
                   {"source_to_center", g.source_to_center},
                   {"source_to_detector", g.source_to_detector},
                   {"fov_radius", g.fov_radius}};
  j["noise"] = {{"gaussian_sigma", cfg.gaussian_sigma}, {"poisson_i0", cfg.poisson_i0}};
  const auto& s = cfg.solver;
  j["solver"] = {{"lambda", s.lambda},
                 {"gamma", std::vector<double>(s.gamma, s.gamma + 8)},
                 {"gamma_lowpass", s.gamma_lowpass},
                 {"alpha", s.alpha},
                 {"beta", s.beta},
                 {"epsilon", s.epsilon},
                 {"max_iter", s.max_iter},
                 {"cg_max_iter", s.cg_max_iter},
                 {"cg_tol", s.cg_tol},
                 {"filter", s.fbp_filter == IHQS_FILTER_HANN ? "hann" : "ramlak"},
                 {"initializer", cfg.initializer_file.string()}};
  std::vector<std::string> methods, noise;
  for (Method m : cfg.methods) methods.emplace_back(to_string(m));
  for (NoiseLevel n : cfg.noise) noise.emplace_back(to_string(n));
  j["sweep"] = {{"views", cfg.views}, {"p", cfg.p_values}, {"methods", methods}, {"noise", noise}};
  j["output"] = {{"peak", cfg.peak}, {"timing", cfg.timing}};
  return j;
}

}  // namespace cli
