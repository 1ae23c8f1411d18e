#include "expweb/cli/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace expweb::cli {
namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ConfigError, path + ": " + what);
}

double get_number(const json& j, const std::string& path) {
  if (!j.is_number()) bad(path, "expected a number, got " + j.dump());
  return j.get<double>();
}

long long get_integer(const json& j, const std::string& path, long long lo) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) bad(path, "expected an integer, got " + j.dump());
  const long long v = j.get<long long>();
  if (v < lo) bad(path, "must be at least " + std::to_string(lo));
  return v;
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) bad(path, "expected a string, got " + j.dump());
  return j.get<std::string>();
}

std::vector<cplx> coeffs_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) bad(path, "expected a non-empty array of [re, im] pairs");
  std::vector<cplx> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string at = path + "[" + std::to_string(i) + "]";
    const json& e = j[i];
    if (!e.is_array() || e.size() != 2) bad(at, "expected [re, im], got " + e.dump());
    const cplx a(get_number(e[0], at + "[0]"), get_number(e[1], at + "[1]"));
    if (a == 0.0) bad(at, "coefficients must be nonzero");
    out.push_back(a);
  }
  return out;
}

Window window_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 4) bad(path, "expected [re_min, re_max, im_min, im_max]");
  Window w{get_number(j[0], path + "[0]"), get_number(j[1], path + "[1]"), get_number(j[2], path + "[2]"),
           get_number(j[3], path + "[3]")};
  if (!(w.re_max > w.re_min) || !(w.im_max > w.im_min)) bad(path, "window must have positive extent");
  return w;
}

}  // namespace

std::vector<cplx> family_coeffs(const std::string& name) {
  if (name == "exp") return {1.0};
  if (name == "cosine") return {0.5, 0.5};
  if (name == "cosx") return {0.5, 0.5, 0.5, 0.5};
  if (name.rfind("en:", 0) == 0) {
    int k = 0;
    std::istringstream is(name.substr(3));
    if (!(is >> k) || !is.eof() || k < 1 || k > 64) bad("family", "en:k needs an integer k in [1, 64]");
    return std::vector<cplx>(static_cast<std::size_t>(k), 1.0);
  }
  bad("family", "unknown family '" + name + "' (known: exp, cosine, cosx, en:k)");
}

ExpSum resolve_function(const RunConfig& cfg) {
  if (!cfg.coeffs.empty()) return ExpSum(cfg.coeffs);
  if (cfg.family) return ExpSum(family_coeffs(*cfg.family));
  throw Error(ErrorCode::ConfigError, "family: no family or coeffs given");
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  j["family"] = cfg.family ? json(*cfg.family) : json(nullptr);
  json coeffs = json::array();
  for (const cplx& a : cfg.coeffs) coeffs.push_back(complex_json(a));
  j["coeffs"] = std::move(coeffs);
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  j["nu"] = opt(cfg.nu);
  j["sigma"] = opt(cfg.sigma);
  j["eta"] = opt(cfg.eta);
  j["tau"] = opt(cfg.tau);
  j["eps0"] = opt(cfg.eps0);
  j["window"] = cfg.window ? json::array({cfg.window->re_min, cfg.window->re_max, cfg.window->im_min,
                                          cfg.window->im_max})
                           : json(nullptr);
  j["res"] = json::array({cfg.width, cfg.height});
  j["samples"] = cfg.samples ? json(*cfg.samples) : json(nullptr);
  j["depth"] = cfg.depth ? json(*cfg.depth) : json(nullptr);
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["out"] = cfg.out;
  j["radius"] = cfg.radius;
  j["levels"] = cfg.levels;
  j["boundary_samples"] = cfg.boundary_samples;
  j["dump_survivors"] = cfg.dump_survivors;
  return j;
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) bad("<root>", "expected a JSON object");
  static const std::set<std::string> known = {
      "command", "family", "coeffs",  "nu",     "sigma",  "eta",    "tau",    "eps0",           "window",
      "res",     "samples", "depth",  "seed",   "workers", "out",   "radius", "levels",         "boundary_samples",
      "dump_survivors"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) bad(key, "unknown field");
  }
  RunConfig c;
  auto has = [&](const char* k) { return j.contains(k) && !j.at(k).is_null(); };
  auto real = [&](const char* k, std::optional<double>& dst) {
    if (has(k)) dst = get_number(j.at(k), k);
  };
  if (has("command")) c.command = get_string(j.at("command"), "command");
  if (has("family")) {
    c.family = get_string(j.at("family"), "family");
    family_coeffs(*c.family);
  }
  if (has("coeffs") && !j.at("coeffs").empty()) c.coeffs = coeffs_from_json(j.at("coeffs"), "coeffs");
  real("nu", c.nu);
  real("sigma", c.sigma);
  real("eta", c.eta);
  real("tau", c.tau);
  real("eps0", c.eps0);
  if (has("window")) c.window = window_from_json(j.at("window"), "window");
  if (has("res")) {
    const json& r = j.at("res");
    if (!r.is_array() || r.size() != 2) bad("res", "expected [width, height]");
    c.width = static_cast<int>(get_integer(r[0], "res[0]", 2));
    c.height = static_cast<int>(get_integer(r[1], "res[1]", 2));
  }
  if (has("samples")) c.samples = static_cast<std::size_t>(get_integer(j.at("samples"), "samples", 1));
  if (has("depth")) c.depth = static_cast<int>(get_integer(j.at("depth"), "depth", 0));
  if (has("seed")) c.seed = static_cast<std::uint64_t>(get_integer(j.at("seed"), "seed", 0));
  if (has("workers")) c.workers = static_cast<unsigned>(get_integer(j.at("workers"), "workers", 1));
  if (has("out")) c.out = get_string(j.at("out"), "out");
  if (has("radius")) c.radius = get_number(j.at("radius"), "radius");
  if (has("levels")) c.levels = static_cast<int>(get_integer(j.at("levels"), "levels", 1));
  if (has("boundary_samples")) {
    c.boundary_samples = static_cast<int>(get_integer(j.at("boundary_samples"), "boundary_samples", 16));
  }
  if (has("dump_survivors")) c.dump_survivors = get_string(j.at("dump_survivors"), "dump_survivors");
  return c;
}

RunConfig config_from_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw Error(ErrorCode::ConfigError,
                "line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed JSON");
  }
  return config_from_json(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::ConfigError, "cannot read config file " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return config_from_text(ss.str());
}

Window parse_window(const std::string& text) {
  std::vector<double> v;
  std::istringstream is(text);
  std::string part;
  while (std::getline(is, part, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      bad("window", "not a number: '" + part + "'");
    }
  }
  if (v.size() != 4) bad("window", "expected re_min,re_max,im_min,im_max");
  return window_from_json(json(v), "window");
}

std::pair<int, int> parse_resolution(const std::string& text) {
  int w = 0, h = 0;
  char x = 0;
  std::istringstream is(text);
  if (!(is >> w)) bad("res", "expected N or WxH");
  if (is >> x) {
    if (x != 'x' || !(is >> h)) bad("res", "expected N or WxH");
  } else {
    h = w;
  }
  if (w < 2 || h < 2) bad("res", "each side must be at least 2");
  return {w, h};
}

std::vector<cplx> parse_coeffs(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    bad("coeffs", "expected a JSON array of [re, im] pairs");
  }
  return coeffs_from_json(j, "coeffs");
}

}  // namespace expweb::cli
