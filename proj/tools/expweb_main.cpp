#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "expweb/cli/commands.hpp"

using namespace expweb;

namespace {

// Flag values as given; only those actually passed override the config file.
struct Flags {
  std::string config;
  std::string family, coeffs, window, res, out, dump;
  double nu = 0, sigma = 0, eta = 0, tau = 0, eps0 = 0, radius = 0;
  std::size_t samples = 0;
  int depth = 0, levels = 0, boundary = 0;
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file (flags override it)");
  sub->add_option("--family", f.family, "exp | cosine | cosx | en:k");
  sub->add_option("--coeffs", f.coeffs, "coefficients as a JSON array of [re, im] pairs");
  sub->add_option("--nu", f.nu, "nu (verify: estimate radius; area: nu0; web: lower bound for nu)");
  sub->add_option("--sigma", f.sigma, "box side");
  sub->add_option("--eta", f.eta, "dominance constant");
  sub->add_option("--tau", f.tau, "strip half-width");
  sub->add_option("--eps0", f.eps0, "epsilon_0");
  sub->add_option("--window", f.window, "re_min,re_max,im_min,im_max");
  sub->add_option("--res", f.res, "N or WxH");
  sub->add_option("--samples", f.samples, "Monte Carlo samples");
  sub->add_option("--depth", f.depth, "iteration / certificate depth");
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_option("--workers", f.workers, "worker threads");
  sub->add_option("--out", f.out, "output path");
  sub->add_option("--radius", f.radius, "R for escape classification");
  sub->add_option("--levels", f.levels, "refinement levels in the area bound");
  sub->add_option("--boundary-samples", f.boundary, "boundary samples per web domain");
  sub->add_option("--dump-survivors", f.dump, "CSV path for surviving sample points");
}

cli::RunConfig resolve(const CLI::App* sub, const Flags& f) {
  cli::RunConfig c = f.config.empty() ? cli::RunConfig{} : cli::load_config(f.config);
  c.command = sub->get_name();
  auto given = [&](const char* name) { return sub->count(name) > 0; };
  if (given("--family")) {
    cli::family_coeffs(f.family);
    c.family = f.family;
    c.coeffs.clear();
  }
  if (given("--coeffs")) c.coeffs = cli::parse_coeffs(f.coeffs);
  if (given("--nu")) c.nu = f.nu;
  if (given("--sigma")) c.sigma = f.sigma;
  if (given("--eta")) c.eta = f.eta;
  if (given("--tau")) c.tau = f.tau;
  if (given("--eps0")) c.eps0 = f.eps0;
  if (given("--window")) c.window = cli::parse_window(f.window);
  if (given("--res")) std::tie(c.width, c.height) = cli::parse_resolution(f.res);
  if (given("--samples")) c.samples = f.samples;
  if (given("--depth")) c.depth = f.depth;
  if (given("--seed")) c.seed = f.seed;
  if (given("--workers")) c.workers = f.workers;
  if (given("--out")) c.out = f.out;
  if (given("--radius")) c.radius = f.radius;
  if (given("--levels")) c.levels = f.levels;
  if (given("--boundary-samples")) c.boundary_samples = f.boundary;
  if (given("--dump-survivors")) c.dump_survivors = f.dump;
  if (c.workers == 0) throw Error(ErrorCode::ConfigError, "workers: must be at least 1");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exponential-sum dynamics: estimates, escape renders, area and spider's-web certificates"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<CLI::App*> subs = {
      app.add_subcommand("verify", "check the sector inequalities and distortion estimates"),
      app.add_subcommand("render", "classify a window and write a PPM image with a JSON sidecar"),
      app.add_subcommand("area", "box-refinement survival and the area lower bound"),
      app.add_subcommand("web", "certify the spider's-web domain sequence")};
  for (CLI::App* s : subs) add_flags(s, flags);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfig;
  }
  for (CLI::App* s : subs) {
    if (!s->parsed()) continue;
    try {
      return cli::run(resolve(s, flags), std::cout, std::cerr);
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return e.code() == ErrorCode::ConfigError ? cli::kExitConfig : cli::kExitFail;
    }
  }
  return cli::kExitConfig;
}
