// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "wapat/io.hpp"

using namespace wapat;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

/// Runs the CLI with `args`, capturing stdout and stderr together.
Run cli(const std::string& args) {
  const std::string cmd = std::string(WAPAT_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path cli_dir() {
  struct Root {
    fs::path path = fs::temp_directory_path() / ("wapat-cli-" + std::to_string(::getpid()));
    Root() { fs::create_directories(path); }
    ~Root() { fs::remove_all(path); }
  };
  static const Root root;
  return root.path;
}

const char* kSmallConfig = R"({
  "name": "cli-small",
  "model": {"type": "nsw", "tau": 0.11, "tau_tilde": 0.1},
  "geometry": {"kind": "circle", "radius": 1.7},
  "forward": {"times": 200, "sensors": 200, "taylor_order": 6, "nodes": 3000},
  "inverse": {"times": 180, "sensors": 190, "taylor_order": 5, "nodes": 2500},
  "phantom": {"kind": "shepp-logan", "grid": 96},
  "image": {"size": 32}
})";

}  // namespace

TEST_CASE("cli: validate-model prints a JSON report") {
  const Run r = cli("validate-model --law constant --k-inf 0.45");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("classification") == "weak");
  CHECK(j.at("growth_bound_min_exact").get<double>() == doctest::Approx(1.45).epsilon(1e-12));
  CHECK(j.at("model").at("k_inf").get<double>() == 0.45);

  const Run p = cli("validate-model --law power --amplitude 0.005 --exponent 2");
  REQUIRE(p.code == 0);
  CHECK(nlohmann::json::parse(p.out).at("classification") == "strong");
}

TEST_CASE("cli: compare and exit codes") {
  const fs::path dir = cli_dir();
  Image2D img(ImageGrid::square(8, 1.0));
  for (std::size_t i = 0; i < img.values.size(); ++i) img.values[i] = 1.0 + static_cast<double>(i % 5);
  write_image(dir / "img.atwv", img);
  const Run same = cli("compare " + (dir / "img.atwv").string() + " " + (dir / "img.atwv").string());
  REQUIRE(same.code == 0);
  CHECK(nlohmann::json::parse(same.out).at("rel_l2_error") == 0.0);

  CHECK(cli("--no-such-flag").code == 1);
  CHECK(cli("compare").code == 1);
  CHECK(cli("compare " + (dir / "missing.atwv").string() + " " + (dir / "img.atwv").string()).code == 1);
  write_text(dir / "typo.json", R"({"model": {"type": "constant", "k_inf": 0.45}, "nosie": 0.2})");
  const Run bad = cli("run-scenario --config " + (dir / "typo.json").string() + " -o " + (dir / "typo").string());
  CHECK(bad.code == 1);
  CHECK(bad.out.find("nosie") != std::string::npos);

  write_text(dir / "power.json", R"({"model": {"type": "power", "amplitude": 0.005, "exponent": 2}})");
  const Run strong = cli("run-scenario --config " + (dir / "power.json").string() + " -o " + (dir / "power").string());
  CHECK(strong.code == 2);
  CHECK(strong.out.find("build_system") != std::string::npos);
}

TEST_CASE("cli: run-scenario, simulate and reconstruct") {
  const fs::path dir = cli_dir();
  write_text(dir / "small.json", kSmallConfig);
  const Run run = cli("run-scenario --config " + (dir / "small.json").string() + " -o " + (dir / "run").string());
  REQUIRE_MESSAGE(run.code == 0, run.out);
  for (const char* f : {"naive.pgm", "compensated.pgm", "full.pgm", "metrics.json", "cross_section.csv"}) {
    CHECK_MESSAGE(fs::exists(dir / "run" / f), f);
  }
  const auto metrics = nlohmann::json::parse(read_text(dir / "run" / "metrics.json"));
  CHECK(metrics.at("rel_l2_error").size() == 3);

  const Run sim = cli("simulate --config " + (dir / "small.json").string() + " -o " + (dir / "sim").string());
  REQUIRE_MESSAGE(sim.code == 0, sim.out);
  const std::string data = (dir / "sim" / "data.atwv").string();
  const std::string sys = (dir / "sys.atwv").string();
  const std::string base = "reconstruct --config " + (dir / "small.json").string() + " --data " + data +
                           " --truth " + (dir / "sim" / "truth.atwv").string() + " --system " + sys;
  REQUIRE(cli(base + " -o " + (dir / "rec1").string()).code == 0);
  CHECK(fs::exists(sys));
  REQUIRE(cli(base + " -o " + (dir / "rec2").string()).code == 0);
  const Image2D a = read_image(dir / "rec1" / "full.atwv");
  const Image2D b = read_image(dir / "rec2" / "full.atwv");
  const Image2D c = read_image(dir / "run" / "full.atwv");
  CHECK(a.values == b.values);
  CHECK(a.values == c.values);
}
