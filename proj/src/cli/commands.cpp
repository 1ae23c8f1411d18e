#include "expweb/cli/commands.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "expweb/estimates.hpp"
#include "expweb/mcmullen.hpp"
#include "expweb/spiderweb.hpp"

namespace expweb::cli {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

json base_report(const RunConfig& cfg, const ExpSum& f) {
  return json{{"command", cfg.command}, {"config", config_to_json(cfg)}, {"function", f.describe()}};
}

// Loss of the seed box per level is dominated by the frame: a strip of width
// sigma sqrt(2)/|f'| along the box edge, i.e. a fraction 4 sqrt(2)/(|a| e^nu).
double frame_loss_constant(const ExpSum& f) { return 4.0 * std::numbers::sqrt2 / f.min_abs_coeff(); }

}  // namespace

std::string sidecar_path(const std::string& image_path) {
  const std::string ext = ".ppm";
  if (image_path.size() > ext.size() && image_path.compare(image_path.size() - ext.size(), ext.size(), ext) == 0) {
    return image_path.substr(0, image_path.size() - ext.size()) + ".json";
  }
  return image_path + ".json";
}

CommandResult cmd_verify(const RunConfig& cfg) {
  const ExpSum f = resolve_function(cfg);
  CommandResult res;
  res.report = base_report(cfg, f);
  try {
    require_web_order(f);
  } catch (const Error& e) {
    res.exit_code = kExitFail;
    res.report["pass"] = false;
    res.report["gate"] = e.what();
    res.summary = std::string("gate failed: ") + e.what() + "\n";
    return res;
  }
  const double eta = cfg.eta.value_or(kDefaultEta);
  const double sigma = cfg.sigma.value_or(kDefaultSigma);
  EstimateOptions eo;
  eo.eta = eta;
  eo.tau = cfg.tau;
  eo.eps0 = cfg.eps0;
  eo.samples = cfg.samples.value_or(10000);
  eo.seed = cfg.seed;
  eo.workers = cfg.workers;

  NuPrimeOptions search;
  search.estimates = eo;
  search.estimates.samples = std::min<std::size_t>(eo.samples, 2000);
  const double nu_prime = find_nu_prime(f, search);
  const double nu = cfg.nu.value_or(nu_prime);
  const EstimateReport est = verify_component_estimates(f, nu, eo);

  const Square box{cplx(nu + 2.0, 0.0), sigma};
  const ConformalityResult conf = conformality_check(f, box);
  // One step on the box itself, two steps on the pullback whose image is a
  // box of the same side.
  const double n_box = nonlinearity(f, box);
  const DistortionEstimate one = distortion_estimate(f, 1, box, 2000, cfg.seed);
  const double one_bound = 1.0 + 8.0 * n_box;
  const Square pulled{box.center, sigma / std::abs(derivative(f, box.center, 1))};
  const DistortionEstimate dist = distortion_estimate(f, 2, pulled, 2000, cfg.seed);
  const double dist_bound = distortion_product_bound(2.0, sigma, 2.0);
  const double r_hi = std::min(300.0, evaluable_radius(f) / 2.0);
  const GrowthCheck growth = bk_condition_check(f, 2.0, std::max(1.0, std::min(nu, r_hi / 2.0)), r_hi, 64);

  const bool dist_pass = one.L <= one_bound && dist.L <= dist_bound;
  const bool pass = est.all_pass() && conf.pass && dist_pass && growth.pass;
  res.report["nu_prime"] = nu_prime;
  res.report["estimates"] = est;
  res.report["conformality"] = conf;
  res.report["distortion"] = {{"one_step", one},      {"one_step_bound", one_bound}, {"two_step", dist},
                              {"two_step_bound", dist_bound}, {"pass", dist_pass}};
  res.report["growth"] = growth;
  res.report["pass"] = pass;
  res.exit_code = pass ? kExitPass : kExitFail;

  std::ostringstream os;
  os << "function " << f.describe() << "\n";
  os << "nu' = " << fmt(nu_prime) << ", estimates at nu = " << fmt(nu) << "\n";
  for (const auto& r : est.results) {
    os << "  " << inequality_id(r.id) << ": " << (r.pass ? "pass" : "FAIL") << " (margin " << fmt(r.worst_margin)
       << ")\n";
  }
  os << "  conformality: " << (conf.pass ? "pass" : "FAIL") << "\n";
  os << "  distortion L(f) = " << fmt(one.L) << " <= " << fmt(one_bound) << ", L(f^2) = " << fmt(dist.L)
     << " <= " << fmt(dist_bound) << ": " << (dist_pass ? "pass" : "FAIL") << "\n";
  os << "  growth A = " << fmt(growth.A) << ", B = " << fmt(growth.B) << ": " << (growth.pass ? "pass" : "FAIL")
     << "\n";
  os << (pass ? "verification passed" : "verification FAILED") << "\n";
  res.summary = os.str();
  return res;
}

CommandResult cmd_render(const RunConfig& cfg) {
  const ExpSum f = resolve_function(cfg);
  const Window window = cfg.window.value_or(Window{-6.0, 6.0, -6.0, 6.0});
  GridParams gp;
  gp.R = cfg.radius;
  gp.depth = cfg.depth.value_or(4);
  gp.workers = cfg.workers;
  if (gp.depth < 1) throw Error(ErrorCode::ConfigError, "depth: render needs depth >= 1");
  if (!(gp.R > 0.0)) throw Error(ErrorCode::ConfigError, "radius: must be positive");
  const LabelGrid grid = classify_grid(f, window, cfg.width, cfg.height, gp);
  const std::string image = cfg.out.empty() ? "render.ppm" : cfg.out;
  write_ppm(image, grid);
  CommandResult res;
  res.report = base_report(cfg, f);
  res.report.update(grid_sidecar(grid, gp));
  res.report["image"] = image;
  res.summary = "wrote " + image + " (" + std::to_string(cfg.width) + "x" + std::to_string(cfg.height) + ")\n";
  return res;
}

CommandResult cmd_area(const RunConfig& cfg) {
  const ExpSum f = resolve_function(cfg);
  CommandResult res;
  res.report = base_report(cfg, f);
  ParamOverrides ov;
  ov.sigma = cfg.sigma;
  ov.eta = cfg.eta;
  ov.tau = cfg.tau;
  ov.eps0 = cfg.eps0;
  ov.nu0 = cfg.nu;
  ov.seed = cfg.seed;
  ov.workers = cfg.workers;
  const RefinementParams params = make_params(f, ov);
  if (cfg.levels < 1) throw Error(ErrorCode::ConfigError, "levels: must be >= 1");

  SurvivalOptions so;
  so.samples = cfg.samples.value_or(100000);
  so.seed = cfg.seed;
  so.workers = cfg.workers;
  if (!cfg.dump_survivors.empty()) {
    so.keep_survivors = 1000;
    so.dump_csv = cfg.dump_survivors;
  }
  const double model = frame_loss_constant(f);
  const std::vector<double> nu = params.schedule(3);
  std::vector<SurvivalReport> levels;
  levels.push_back(survival_fraction(f, params, 1, so));
  if (cfg.levels >= 2) {
    so.dump_csv.clear();
    levels.push_back(survival_fraction(f, params, 2, so));
  }
  // Loss constant: the model, raised if the measured level-1 loss (upper
  // Wilson bound) calls for more.
  const double measured = (1.0 - levels[0].wilson_lo) * std::exp(params.nu0());
  const double loss_constant = std::max(model, measured);
  const AreaBound area = area_lower_bound(params, loss_constant, cfg.levels);

  bool in_band = true;
  json bands = json::array();
  for (std::size_t k = 0; k < levels.size(); ++k) {
    const double expected = 2.0 * model * std::exp(-nu[k]);
    const double loss_lo = 1.0 - levels[k].wilson_hi;
    const bool ok = loss_lo <= expected;
    in_band = in_band && ok;
    bands.push_back({{"level", k + 1}, {"loss_lower", loss_lo}, {"expected_max", expected}, {"pass", ok}});
  }
  const bool pass = area.delta > 0.0 && in_band;
  res.report["params"] = params;
  res.report["survival"] = levels;
  res.report["loss_model"] = model;
  res.report["loss_constant"] = loss_constant;
  res.report["bands"] = std::move(bands);
  res.report["area"] = area;
  res.report["pass"] = pass;
  res.exit_code = pass ? kExitPass : kExitFail;

  std::ostringstream os;
  os << "function " << f.describe() << "\n";
  os << "nu0 = " << fmt(params.nu0()) << ", sigma = " << fmt(params.sigma()) << ", tau = " << fmt(params.tau())
     << "\n";
  for (const auto& r : levels) {
    os << "  level " << r.level << ": " << r.survivors << "/" << r.samples << " survive (" << fmt(r.fraction)
       << ", 95% [" << fmt(r.wilson_lo) << ", " << fmt(r.wilson_hi) << "])\n";
  }
  os.precision(9);
  os << "Delta >= " << area.delta << "\n";
  os << (pass ? "area bound passed" : "area bound FAILED") << "\n";
  res.summary = os.str();
  return res;
}

CommandResult cmd_web(const RunConfig& cfg) {
  const ExpSum f = resolve_function(cfg);
  CommandResult res;
  res.report = base_report(cfg, f);
  try {
    require_web_order(f);
  } catch (const Error& e) {
    res.exit_code = kExitFail;
    res.report["certified"] = false;
    res.report["gate"] = e.what();
    res.summary = std::string("gate failed: ") + e.what() + "\n";
    return res;
  }
  WebOptions wo;
  wo.eta = cfg.eta.value_or(kDefaultEta);
  wo.nu_floor = cfg.nu;
  wo.boundary_samples = cfg.boundary_samples;
  wo.seed = cfg.seed;
  wo.workers = cfg.workers;
  const int depth = cfg.depth.value_or(3);
  const WebParams params = make_web_params(f, wo);
  const WebCertificate cert = certify_web(f, params, depth, cfg.boundary_samples);
  res.report["certificate"] = cert;
  res.report["certified"] = cert.certified;
  res.exit_code = cert.certified ? kExitPass : kExitFail;

  std::ostringstream os;
  os << "function " << f.describe() << "\n";
  os << "nu = " << fmt(params.nu) << ", R = " << fmt(params.R) << ", delta = " << fmt(params.delta)
     << ", eps' = " << fmt(params.epsilon_prime) << "\n";
  for (const auto& s : cert.steps) {
    os << "  step " << s.n << " (" << s.mode << "): a " << (s.pass_a ? "pass" : "FAIL") << ", b "
       << (s.pass_b ? "pass" : "FAIL");
    if (s.winding) os << ", winding " << *s.winding;
    os << "\n";
  }
  if (cert.certified) {
    os << "A_R spider's web certified to depth " << depth
       << "; consequently A(f) and I(f) are also spiders' webs\n";
  } else {
    os << "spider's web NOT certified (reached depth " << cert.depth_certified << " of " << depth << ")\n";
  }
  res.summary = os.str();
  return res;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    CommandResult r;
    if (cfg.command == "verify") {
      r = cmd_verify(cfg);
    } else if (cfg.command == "render") {
      r = cmd_render(cfg);
    } else if (cfg.command == "area") {
      r = cmd_area(cfg);
    } else if (cfg.command == "web") {
      r = cmd_web(cfg);
    } else {
      throw Error(ErrorCode::ConfigError, "command: unknown command '" + cfg.command + "'");
    }
    if (cfg.command == "render") {
      write_json(sidecar_path(r.report["image"].get<std::string>()), r.report);
    } else if (!cfg.out.empty()) {
      write_json(cfg.out, r.report);
    }
    out << r.summary;
    return r.exit_code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::ConfigError ? kExitConfig : kExitFail;
  }
}

}  // namespace expweb::cli
