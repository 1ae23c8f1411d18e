#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "expweb/dynamics.hpp"
#include "expweb/expsum.hpp"
#include "expweb/report_json.hpp"

namespace expweb::cli {

/// Everything a command needs.  Unset optionals fall back to per-command
/// defaults; the resolved values are embedded in every report.
struct RunConfig {
  std::string command;
  std::optional<std::string> family;  // exp, cosine, cosx, en:k
  std::vector<cplx> coeffs;           // explicit coefficients win over family
  std::optional<double> nu;
  std::optional<double> sigma;
  std::optional<double> eta;
  std::optional<double> tau;
  std::optional<double> eps0;
  std::optional<Window> window;
  int width = 256;
  int height = 256;
  std::optional<std::size_t> samples;
  std::optional<int> depth;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  std::string out;
  double radius = 1.0;     // R for escape classification
  int levels = 2;          // refinement levels in the area bound
  int boundary_samples = 4096;
  std::string dump_survivors;

  bool operator==(const RunConfig&) const = default;
};

// Coefficients of a built-in family; throws ConfigError for unknown names.
std::vector<cplx> family_coeffs(const std::string& name);

// The function selected by the config (coeffs, else family).
ExpSum resolve_function(const RunConfig& cfg);

json config_to_json(const RunConfig& cfg);
// Throws ConfigError naming the offending field path.
RunConfig config_from_json(const json& j);
// Parses a JSON document; syntax errors report line and column.
RunConfig config_from_text(const std::string& text);
RunConfig load_config(const std::string& path);

Window parse_window(const std::string& text);
std::pair<int, int> parse_resolution(const std::string& text);
std::vector<cplx> parse_coeffs(const std::string& text);

}  // namespace expweb::cli
