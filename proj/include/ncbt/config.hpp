#pragma once

#include <fstream>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "ncbt/models.hpp"

namespace ncbt {

using Json = nlohmann::ordered_json;

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

/// Strip a trailing comment that is not inside a quoted string.
inline std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

inline Json parse_toml_scalar(const std::string& raw) {
  const std::string v = trim(raw);
  if (v.empty()) throw ConfigError("toml: empty value");
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') throw ConfigError("toml: unterminated string: " + v);
    return Json(v.substr(1, v.size() - 2));
  }
  if (v == "true") return Json(true);
  if (v == "false") return Json(false);
  try {
    size_t used = 0;
    if (v.find_first_of(".eE") == std::string::npos) {
      const long long i = std::stoll(v, &used);
      if (used == v.size()) return Json(i);
    } else {
      const double d = std::stod(v, &used);
      if (used == v.size()) return Json(d);
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("toml: cannot parse value: " + v);
}

inline Json parse_toml_value(const std::string& raw) {
  const std::string v = trim(raw);
  if (!v.empty() && v.front() == '[') {
    if (v.back() != ']') throw ConfigError("toml: unterminated array: " + v);
    Json arr = Json::array();
    std::string inner = v.substr(1, v.size() - 2);
    std::string cur;
    bool quoted = false;
    int depth = 0;
    for (char c : inner) {
      if (c == '"') quoted = !quoted;
      if (!quoted && c == '[') ++depth;
      if (!quoted && c == ']') --depth;
      if (c == ',' && !quoted && depth == 0) {
        if (!trim(cur).empty()) arr.push_back(parse_toml_value(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!trim(cur).empty()) arr.push_back(parse_toml_value(cur));
    return arr;
  }
  return parse_toml_scalar(v);
}

}  // namespace detail

/// Minimal TOML reader covering the config schema: [section] headers and
/// key = value lines with string / integer / float / bool / flat-array
/// values. The JSON mirror carries the same keys one-to-one.
inline Json parse_toml_subset(const std::string& text) {
  Json root = Json::object();
  Json* section = &root;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string s = detail::trim(detail::strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError("toml:" + std::to_string(lineno) + ": bad section");
      const std::string name = detail::trim(s.substr(1, s.size() - 2));
      if (name.empty() || name.find('.') != std::string::npos)
        throw ConfigError("toml:" + std::to_string(lineno) + ": unsupported section name");
      if (root.contains(name))
        throw ConfigError("toml:" + std::to_string(lineno) + ": duplicate section " + name);
      root[name] = Json::object();
      section = &root[name];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("toml:" + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(s.substr(0, eq));
    if (key.empty()) throw ConfigError("toml:" + std::to_string(lineno) + ": empty key");
    if (section->contains(key))
      throw ConfigError("toml:" + std::to_string(lineno) + ": duplicate key " + key);
    (*section)[key] = detail::parse_toml_value(s.substr(eq + 1));
  }
  return root;
}

/// "p/q" (a rational multiple of 2*pi) -> angle in radians.
inline double parse_angle_fraction(const std::string& text) {
  const auto slash = text.find('/');
  if (slash == std::string::npos) throw ConfigError("expected angle as \"p/q\": " + text);
  try {
    const long p = std::stol(detail::trim(text.substr(0, slash)));
    const long q = std::stol(detail::trim(text.substr(slash + 1)));
    if (q < 1) throw ConfigError("angle denominator must be >= 1: " + text);
    double angle = 2.0 * kPi * static_cast<double>(p) / static_cast<double>(q);
    angle -= 2.0 * kPi * std::floor(angle / (2.0 * kPi));
    return angle;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("cannot parse angle fraction: " + text);
  }
}

struct ModelConfig {
  std::string type;  // hofstadter | ssh | hoppings
  int p = 0, q = 1;
  double disorder = 0.0;
  uint64_t seed = 0;
  double t_intra = 0.5, t_inter = 1.0;
  // hoppings model
  int dim = 0;
  int orbitals = 1;
  std::vector<std::vector<std::string>> theta;  // entries as "p/q" of 2*pi
  struct Hop {
    IntVec y;
    Matrix w;
  };
  std::vector<Hop> hops;
  std::optional<std::pair<int, int>> chiral_split;
};

struct WindowConfig {
  IntVec sizes;
  std::string boundary = "periodic";
  int margin = 2;
};

struct SpectralConfig {
  std::optional<double> fermi;
  int gap_index = 0;
  double gap_min_width = 0.2;
  int contour_points = 64;
};

struct InvariantConfig {
  std::vector<int> axes;
  int samples = 1;
};

struct ButterflyConfig {
  std::vector<std::pair<int, int>> fluxes;
};

struct RunConfig {
  ModelConfig model;
  WindowConfig window;
  SpectralConfig spectral;
  InvariantConfig invariant;
  ButterflyConfig butterfly;
  std::string output_dir = ".";
};

namespace detail {

inline void require_keys(const Json& obj, const std::string& where,
                         std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) ok = true;
    if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

template <typename T>
T get_or(const Json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const std::exception&) {
    throw ConfigError(std::string("bad value for '") + key + "'");
  }
}

inline Matrix parse_matrix(const Json& re, const Json& im, const std::string& where) {
  if (!re.is_array() || re.empty()) throw ConfigError(where + ": 're' must be a matrix");
  const long rows = static_cast<long>(re.size());
  const long cols = static_cast<long>(re.at(0).size());
  Matrix m(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c)
      m(r, c) = Complex(re.at(r).at(c).get<double>(),
                        im.is_null() ? 0.0 : im.at(r).at(c).get<double>());
  return m;
}

}  // namespace detail

/// Validate and load the mirrored schema; unknown keys are rejected.
inline RunConfig load_config_json(const Json& root) {
  detail::require_keys(root, "config",
                       {"model", "window", "spectral", "invariant", "butterfly", "output"});
  if (!root.contains("model") || !root.contains("window"))
    throw ConfigError("config: [model] and [window] sections are required");
  RunConfig cfg;

  {
    const Json& m = root.at("model");
    detail::require_keys(m, "[model]",
                         {"type", "p", "q", "disorder", "seed", "t_intra", "t_inter", "dim",
                          "orbitals", "theta", "hops", "chiral_split"});
    cfg.model.type = detail::get_or<std::string>(m, "type", "");
    if (cfg.model.type != "hofstadter" && cfg.model.type != "ssh" &&
        cfg.model.type != "hoppings")
      throw ConfigError("[model] type must be hofstadter | ssh | hoppings");
    cfg.model.p = detail::get_or<int>(m, "p", 0);
    cfg.model.q = detail::get_or<int>(m, "q", 1);
    cfg.model.disorder = detail::get_or<double>(m, "disorder", 0.0);
    cfg.model.seed = detail::get_or<uint64_t>(m, "seed", 0);
    cfg.model.t_intra = detail::get_or<double>(m, "t_intra", 0.5);
    cfg.model.t_inter = detail::get_or<double>(m, "t_inter", 1.0);
    cfg.model.dim = detail::get_or<int>(m, "dim", 0);
    cfg.model.orbitals = detail::get_or<int>(m, "orbitals", 1);
    if (m.contains("theta"))
      cfg.model.theta = m.at("theta").get<std::vector<std::vector<std::string>>>();
    if (m.contains("chiral_split")) {
      const auto split = m.at("chiral_split").get<std::vector<int>>();
      if (split.size() != 2) throw ConfigError("[model] chiral_split must have two entries");
      cfg.model.chiral_split = std::make_pair(split[0], split[1]);
    }
    if (m.contains("hops")) {
      for (const Json& hop : m.at("hops")) {
        detail::require_keys(hop, "[model] hop", {"y", "re", "im"});
        ModelConfig::Hop h;
        h.y = hop.at("y").get<IntVec>();
        h.w = detail::parse_matrix(hop.at("re"), hop.contains("im") ? hop.at("im") : Json(),
                                   "[model] hop");
        cfg.model.hops.push_back(std::move(h));
      }
    }
  }

  {
    const Json& w = root.at("window");
    detail::require_keys(w, "[window]", {"sizes", "boundary", "margin"});
    if (!w.contains("sizes")) throw ConfigError("[window] sizes is required");
    cfg.window.sizes = w.at("sizes").get<IntVec>();
    cfg.window.boundary = detail::get_or<std::string>(w, "boundary", "periodic");
    if (cfg.window.boundary != "periodic" && cfg.window.boundary != "open")
      throw ConfigError("[window] boundary must be periodic | open");
    cfg.window.margin = detail::get_or<int>(w, "margin", 2);
  }

  if (root.contains("spectral")) {
    const Json& s = root.at("spectral");
    detail::require_keys(s, "[spectral]",
                         {"fermi", "gap_index", "gap_min_width", "contour_points"});
    if (s.contains("fermi")) cfg.spectral.fermi = s.at("fermi").get<double>();
    cfg.spectral.gap_index = detail::get_or<int>(s, "gap_index", 0);
    cfg.spectral.gap_min_width = detail::get_or<double>(s, "gap_min_width", 0.2);
    cfg.spectral.contour_points = detail::get_or<int>(s, "contour_points", 64);
  }

  if (root.contains("invariant")) {
    const Json& i = root.at("invariant");
    detail::require_keys(i, "[invariant]", {"axes", "samples"});
    if (i.contains("axes")) cfg.invariant.axes = i.at("axes").get<std::vector<int>>();
    cfg.invariant.samples = detail::get_or<int>(i, "samples", 1);
    if (cfg.invariant.samples < 1) throw ConfigError("[invariant] samples must be >= 1");
  }

  if (root.contains("butterfly")) {
    const Json& b = root.at("butterfly");
    detail::require_keys(b, "[butterfly]", {"fluxes"});
    for (const auto& f : b.at("fluxes").get<std::vector<std::string>>()) {
      const auto slash = f.find('/');
      if (slash == std::string::npos) throw ConfigError("[butterfly] flux must be \"p/q\"");
      cfg.butterfly.fluxes.emplace_back(std::stoi(f.substr(0, slash)),
                                        std::stoi(f.substr(slash + 1)));
    }
  }

  if (root.contains("output")) {
    const Json& o = root.at("output");
    detail::require_keys(o, "[output]", {"dir"});
    cfg.output_dir = detail::get_or<std::string>(o, "dir", ".");
  }
  return cfg;
}

inline RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  const bool looks_json = first != std::string::npos && text[first] == '{';
  const bool named_json = path.size() > 5 && path.substr(path.size() - 5) == ".json";
  try {
    if (looks_json || named_json) return load_config_json(Json::parse(text));
    return load_config_json(parse_toml_subset(text));
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("json: ") + e.what());
  }
}

/// Instantiate the model described by the config; `seed_override` replaces
/// the config seed when present (the CLI --seed flag).
inline ModelSpec make_model(const ModelConfig& mc, std::optional<uint64_t> seed_override = {}) {
  const uint64_t seed = seed_override.value_or(mc.seed);
  if (mc.type == "hofstadter") return hofstadter(mc.p, mc.q, mc.disorder, seed);
  if (mc.type == "ssh") return ssh(mc.t_intra, mc.t_inter, mc.disorder, seed);
  if (mc.type == "hoppings") {
    if (mc.dim < 1) throw ConfigError("[model] hoppings: dim >= 1 required");
    RealMatrix theta = RealMatrix::Zero(mc.dim, mc.dim);
    if (!mc.theta.empty()) {
      if (static_cast<int>(mc.theta.size()) != mc.dim)
        throw ConfigError("[model] theta must be a d x d matrix of \"p/q\" strings");
      for (int r = 0; r < mc.dim; ++r) {
        if (static_cast<int>(mc.theta[static_cast<size_t>(r)].size()) != mc.dim)
          throw ConfigError("[model] theta must be a d x d matrix of \"p/q\" strings");
        for (int c = 0; c < mc.dim; ++c)
          theta(r, c) = parse_angle_fraction(mc.theta[static_cast<size_t>(r)][static_cast<size_t>(c)]);
      }
    }
    std::vector<std::pair<IntVec, Coefficient>> pairs;
    for (const auto& hop : mc.hops) {
      if (static_cast<int>(hop.y.size()) != mc.dim)
        throw ConfigError("[model] hop vector of wrong dimension");
      if (hop.w.rows() != mc.orbitals || hop.w.cols() != mc.orbitals)
        throw ConfigError("[model] hop matrix of wrong shape");
      pairs.emplace_back(hop.y, Coefficient(hop.w));
    }
    DisorderSpec disorder;
    disorder.dim = mc.dim;
    disorder.seed = seed;
    try {
      return from_hoppings(mc.dim, mc.orbitals, TwistMatrix(theta), std::move(pairs), disorder,
                           mc.chiral_split);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("[model] ") + e.what());
    }
  }
  throw ConfigError("unknown model type: " + mc.type);
}

}  // namespace ncbt
