#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "expweb/cli/commands.hpp"

using namespace expweb;
using namespace expweb::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "expweb_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

// Runs the built executable and returns its exit status.
int run_cli(const std::string& args) {
  const std::string cmd = std::string(EXPWEB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string config_error(const std::string& text) {
  try {
    config_from_text(text);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config round trip") {
  RunConfig c;
  c.command = "render";
  c.family = "en:5";
  c.coeffs = {cplx(1.0, 0.5), cplx(-0.25, 2.0), cplx(3.0, 0.0)};
  c.nu = 12.5;
  c.sigma = 0.07;
  c.eta = 60.0;
  c.tau = 5.5;
  c.eps0 = 0.3;
  c.window = Window{-2.0, 3.0, -1.0, 4.0};
  c.width = 33;
  c.height = 17;
  c.samples = 12345;
  c.depth = 5;
  c.seed = 99;
  c.workers = 3;
  c.out = "x.ppm";
  c.radius = 2.5;
  c.levels = 1;
  c.boundary_samples = 512;
  c.dump_survivors = "s.csv";
  CHECK(config_from_json(config_to_json(c)) == c);
  CHECK(config_from_text(config_to_json(c).dump()) == c);
  RunConfig d;
  d.command = "verify";
  d.family = "cosx";
  CHECK(config_from_json(config_to_json(d)) == d);
}

TEST_CASE("config errors name the field") {
  CHECK(config_error(R"({"coeffs": [[1, 0], [1, "a"]]})").find("coeffs[1][1]") != std::string::npos);
  CHECK(config_error(R"({"coeffs": [[0, 0]]})").find("coeffs[0]") != std::string::npos);
  CHECK(config_error(R"({"colour": 3})").find("colour: unknown field") != std::string::npos);
  CHECK(config_error(R"({"window": [1, 0, 0, 1]})").find("window") != std::string::npos);
  CHECK(config_error(R"({"res": [1, 8]})").find("res[0]") != std::string::npos);
  CHECK(config_error(R"({"family": "sine"})").find("family") != std::string::npos);
  CHECK(config_error(R"({"workers": 0})").find("workers") != std::string::npos);
  CHECK(config_error("{\n  \"nu\": 3,\n  \"eta\": ]\n}").find("line 3") != std::string::npos);
  CHECK_THROWS_AS(parse_window("1,2,3"), Error);
  CHECK_THROWS_AS(parse_resolution("8y9"), Error);
  CHECK(parse_resolution("64") == std::pair{64, 64});
  CHECK(parse_resolution("64x32") == std::pair{64, 32});
  CHECK(parse_window("-1,2,-3,4") == Window{-1, 2, -3, 4});
  CHECK(family_coeffs("en:3").size() == 3);
  CHECK(family_coeffs("cosx") == std::vector<cplx>(4, 0.5));
  CHECK(family_coeffs("cosine") == std::vector<cplx>(2, 0.5));
}

TEST_CASE("exit codes") {
  CHECK(run_cli("verify --family cosx --samples 2000") == kExitPass);
  CHECK(run_cli("verify --family cosine") == kExitFail);
  CHECK(run_cli("web --family exp") == kExitFail);
  CHECK(run_cli("verify --family cosx --bogus 1") == kExitConfig);
  CHECK(run_cli("verify --coeffs '[[1,0],[1,\"a\"]]'") == kExitConfig);
  CHECK(run_cli("render --family cosx --res 1") == kExitConfig);
  CHECK(run_cli("verify --config /nonexistent/config.json") == kExitConfig);
  spit(scratch() / "broken.json", "{\"family\": ");
  CHECK(run_cli("verify --config " + (scratch() / "broken.json").string()) == kExitConfig);
  CHECK(run_cli("area --family cosx --sigma 0.2") == kExitFail);
}

TEST_CASE("render outputs are deterministic") {
  const fs::path cfg = scratch() / "render.json";
  spit(cfg, R"({"family": "cosx", "res": [24, 16], "depth": 3, "window": [-8, 8, -5, 5]})");
  const fs::path a = scratch() / "a.ppm", b = scratch() / "b.ppm";
  REQUIRE(run_cli("render --config " + cfg.string() + " --out " + a.string()) == kExitPass);
  REQUIRE(run_cli("render --config " + cfg.string() + " --out " + b.string()) == kExitPass);
  CHECK(slurp(a) == slurp(b));
  json ja = json::parse(slurp(scratch() / "a.json")), jb = json::parse(slurp(scratch() / "b.json"));
  ja["config"]["out"] = jb["config"]["out"];
  ja["image"] = jb["image"];
  CHECK(ja == jb);
  std::size_t total = 0;
  for (const auto& [k, v] : jb["histogram"].items()) total += v.get<std::size_t>();
  CHECK(total == 24u * 16u);
  CHECK(jb["resolution"] == json::array({24, 16}));
  // Flags override the file.
  REQUIRE(run_cli("render --config " + cfg.string() + " --res 8x4 --out " + a.string()) == kExitPass);
  CHECK(json::parse(slurp(scratch() / "a.json"))["resolution"] == json::array({8, 4}));
  CHECK(slurp(a).substr(0, 11) == "P6\n8 4\n255\n");
}

TEST_CASE("reports are deterministic") {
  for (const std::string cmd : {"verify --family en:3 --samples 2000", "area --family cosx --nu 12 --samples 20000",
                                "web --family en:5 --depth 2"}) {
    const fs::path a = scratch() / "r1.json", b = scratch() / "r2.json";
    REQUIRE(run_cli(cmd + " --out " + a.string()) == kExitPass);
    REQUIRE(run_cli(cmd + " --out " + b.string()) == kExitPass);
    json ja = json::parse(slurp(a)), jb = json::parse(slurp(b));
    ja["config"]["out"] = jb["config"]["out"];
    CHECK_MESSAGE(ja == jb, cmd);
  }
}

TEST_CASE("small render is fast") {
  RunConfig c;
  c.command = "render";
  c.family = "cosx";
  c.width = c.height = 16;
  c.out = (scratch() / "small.ppm").string();
  const auto t0 = std::chrono::steady_clock::now();
  std::ostringstream out, err;
  CHECK(run(c, out, err) == kExitPass);
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(s < 1.0);
  CHECK(fs::exists(scratch() / "small.json"));
  CHECK(sidecar_path("x/y.ppm") == "x/y.json");
  CHECK(sidecar_path("img") == "img.json");
}

TEST_CASE("area with one level") {
  RunConfig c;
  c.command = "area";
  c.family = "cosx";
  c.nu = 12.0;
  c.samples = 20000;
  c.levels = 1;
  const CommandResult r = cmd_area(c);
  CHECK(r.exit_code == kExitPass);
  CHECK(r.report["survival"].size() == 1);
  CHECK(r.report["area"]["delta"].get<double>() > 0.99);
}

TEST_CASE("web at depth 0 and the certificate message") {
  RunConfig c;
  c.command = "web";
  c.family = "en:5";
  c.depth = 0;
  const CommandResult r0 = cmd_web(c);
  CHECK(r0.exit_code == kExitPass);
  CHECK(r0.report["certificate"]["steps"].empty());
  c.depth = 3;
  const CommandResult r3 = cmd_web(c);
  CHECK(r3.exit_code == kExitPass);
  CHECK(r3.summary.find("A_R spider's web certified to depth 3; consequently A(f) and I(f) are also spiders' webs") !=
        std::string::npos);
  c.family = "cosine";
  const CommandResult bad = cmd_web(c);
  CHECK(bad.exit_code == kExitFail);
  CHECK(bad.summary.find("gate failed") != std::string::npos);
}
