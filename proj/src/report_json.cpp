#include "expweb/report_json.hpp"

#include <cmath>
#include <fstream>

namespace expweb {
namespace {

// JSON has no infinities; those become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json complex_json(const cplx& z) { return json::array({number(z.real()), number(z.imag())}); }

cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorCode::ConfigError, "expected [re, im], got " + j.dump());
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

void to_json(json& j, const TowerReal& t) {
  j = json{{"height", t.height()}, {"top", t.top()}};
  if (const auto v = t.to_double()) j["value"] = number(*v);
}

void to_json(json& j, const InequalityResult& r) {
  j = json{{"inequality_id", inequality_id(r.id)},
           {"pass", r.pass},
           {"worst_margin", number(r.worst_margin)},
           {"witness", complex_json(r.witness)},
           {"witness_sector", r.witness_sector},
           {"samples", r.samples}};
}

void to_json(json& j, const EstimateReport& r) {
  json results = json::array();
  for (const auto& q : r.results) {
    json e = q;
    e["seed"] = r.seed;
    results.push_back(std::move(e));
  }
  j = json{{"function", r.function},
           {"nu", r.nu},
           {"eta", r.eta},
           {"tau", r.tau},
           {"eps0", r.eps0},
           {"seed", r.seed},
           {"samples_per_sector", r.samples_per_sector},
           {"window_depth", r.window_depth},
           {"window_clipped", r.window_clipped},
           {"all_pass", r.all_pass()},
           {"results", std::move(results)}};
}

void to_json(json& j, const ClosedPolyline& p) {
  j = json::array();
  for (const cplx& z : p.vertices) j.push_back(complex_json(z));
}

void to_json(json& j, const ParamCheck& c) {
  j = json{{"name", c.name}, {"pass", c.pass}, {"value", number(c.value)}, {"threshold", number(c.threshold)}};
}

void to_json(json& j, const RefinementParams& p) {
  j = json{{"sigma", p.sigma()},     {"eta", p.eta()},           {"tau", p.tau()},
           {"eps0", p.eps0()},       {"nu0", p.nu0()},           {"nu_prime", p.nu_prime()},
           {"large_multiple", p.large_multiple()}, {"seed", p.seed()}, {"checked", p.checked()},
           {"checks", p.checks()}};
}

void to_json(json& j, const BoxId& b) { j = json{{"m", b.m}, {"m_prime", b.m_prime}}; }

void to_json(json& j, const SurvivalReport& r) {
  json kept = json::array();
  for (const cplx& z : r.survivor_sample) kept.push_back(complex_json(z));
  j = json{{"level", r.level},
           {"samples", r.samples},
           {"survivors", r.survivors},
           {"fraction", r.fraction},
           {"wilson_lo", r.wilson_lo},
           {"wilson_hi", r.wilson_hi},
           {"lost_strip", r.lost_strip},
           {"lost_polygon", r.lost_polygon},
           {"lost_frame", r.lost_frame},
           {"seed_box", r.seed},
           {"seed", r.seed_value},
           {"survivor_sample", std::move(kept)}};
}

void to_json(json& j, const AreaBound& a) {
  json schedule = json::array();
  for (double v : a.schedule) schedule.push_back(number(v));
  j = json{{"product", a.product}, {"tail", number(a.tail)}, {"delta", a.delta}, {"schedule", std::move(schedule)}};
}

void to_json(json& j, const Classification& c) {
  j = json{{"label", to_string(c.label)}, {"depth", c.depth},       {"ell", c.ell},
           {"witness_level", c.witness_level}, {"no_mcfc", c.no_mcfc}, {"detail", c.detail}};
}

void to_json(json& j, const EpsilonPrime& e) {
  j = json{{"value", e.value},
           {"floor", e.floor},
           {"log_min_side", number(e.log_min_side)},
           {"log_min_chord", number(e.log_min_chord)},
           {"chord_log_min", e.chord_log_min},
           {"side_bound", e.side_bound},
           {"chord_bound", e.chord_bound},
           {"witness", complex_json(e.witness)},
           {"samples", e.samples}};
}

void to_json(json& j, const WebParams& p) {
  j = json{{"nu", p.nu},
           {"R", p.R},
           {"delta", p.delta},
           {"epsilon_prime", p.epsilon_prime},
           {"tau", p.tau},
           {"eta", p.eta},
           {"nu_floor", p.nu_floor},
           {"fixed_point_rounds", p.fixed_point_rounds},
           {"gates_pass", p.gates_pass()},
           {"checks", p.checks}};
}

void to_json(json& j, const InclusionResult& r) {
  j = json{{"n", r.n}, {"verdict", to_string(r.verdict)}, {"beta_lower", r.beta_lo}, {"M_upper", r.m_hi}};
}

void to_json(json& j, const WebStepReport& r) {
  j = json{{"n", r.n},
           {"min_mod_boundary", r.min_mod_boundary},
           {"sup_next_radius", r.sup_next_radius},
           {"winding", r.winding ? json(*r.winding) : json(nullptr)},
           {"winding_nonzero", r.winding_nonzero},
           {"pass_a", r.pass_a},
           {"pass_b", r.pass_b},
           {"samples", r.samples},
           {"mode", r.mode},
           {"note", r.note}};
}

void to_json(json& j, const WebCertificate& c) {
  j = json{{"params", c.params},
           {"depth_requested", c.depth_requested},
           {"depth_certified", c.depth_certified},
           {"certified", c.certified},
           {"inclusion", c.inclusion},
           {"steps", c.steps}};
}

void to_json(json& j, const ConformalityResult& c) {
  j = json{{"lhs", c.lhs},         {"rhs", c.rhs},           {"margin", c.margin},
           {"criterion", c.criterion}, {"injective", c.injective}, {"pass", c.pass}};
}

void to_json(json& j, const DistortionEstimate& d) { j = json{{"c", d.c}, {"C", d.C}, {"L", d.L}}; }

void to_json(json& j, const GrowthCheck& g) { j = json{{"A", g.A}, {"B", g.B}, {"pass", g.pass}}; }

json grid_sidecar(const LabelGrid& grid, const GridParams& params) {
  json hist = json::object();
  for (int l = 0; l < kLabelCount; ++l) {
    hist[to_string(static_cast<Label>(l))] = grid.histogram[static_cast<std::size_t>(l)];
  }
  json palette = json::object();
  for (int l = 0; l < kLabelCount; ++l) {
    const auto c = label_color(static_cast<Label>(l));
    palette[to_string(static_cast<Label>(l))] = {c[0], c[1], c[2]};
  }
  return json{{"window",
               {{"re_min", grid.window.re_min},
                {"re_max", grid.window.re_max},
                {"im_min", grid.window.im_min},
                {"im_max", grid.window.im_max}}},
              {"resolution", {grid.width, grid.height}},
              {"params", {{"R", params.R}, {"depth", params.depth}, {"workers", params.workers}}},
              {"histogram", std::move(hist)},
              {"palette", std::move(palette)}};
}

void write_json(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::InvalidArgument, "cannot open " + path + " for writing");
  os << j.dump(2) << "\n";
  if (!os) throw Error(ErrorCode::InvalidArgument, "failed writing " + path);
}

}  // namespace expweb
