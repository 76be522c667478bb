// SPDX-License-Identifier: Apache-2.0
//
// wapat: simulate attenuated photoacoustic data and reconstruct from it.
// Exit codes: 0 success, 1 usage or input error, 2 numerical failure.

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "wapat/attenuation_models.hpp"
#include "wapat/experiments.hpp"
#include "wapat/io.hpp"

namespace {

using namespace wapat;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

void add_common(CLI::App* cmd, Common& c, bool config_required) {
  auto* opt = cmd->add_option("--config", c.config, "JSON configuration file");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Override the noise seed");
  cmd->add_option("--threads", c.threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);
}

void apply_threads(const Common& c) {
  if (c.threads > 0) omp_set_num_threads(c.threads);
}

fs::path default_output() {
  const char* env = std::getenv("WAPAT_OUTPUT_DIR");
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path("wapat-out");
}

ScenarioConfig scenario(const Common& c) {
  ScenarioConfig cfg = load_scenario_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

void print_metrics(const ScenarioResult& r) {
  for (const auto& [name, m] : r.methods) {
    std::printf("%-12s rel_l2_error=%.6f  (%.2f s)\n", name.c_str(), m.error, m.seconds);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photoacoustic reconstruction in weakly attenuating media"};
  app.require_subcommand(1);

  Common sim_c, rec_c, val_c, run_c, cmp_c;
  std::string sim_out, rec_out, run_out, rec_data, rec_truth, rec_system;
  std::string law, a_path, b_path;
  double k_inf = 0.0, tau = 0.0, tau_tilde = 0.0, amplitude = 0.0, exponent = 2.0;
  double omega_max = 100.0, fd_step = 1e-4, omega0 = 1.0;
  std::size_t points = 2001;
  bool support_mask = false;

  auto* sim = app.add_subcommand("simulate", "Generate attenuated pressure data from a scenario config");
  add_common(sim, sim_c, true);
  sim->add_option("-o,--output", sim_out, "Output directory (default: $WAPAT_OUTPUT_DIR or wapat-out)");

  auto* rec = app.add_subcommand("reconstruct", "Reconstruct images from measured data");
  add_common(rec, rec_c, true);
  rec->add_option("--data", rec_data, "ATWV1 attenuated pressure file")->required()->check(CLI::ExistingFile);
  rec->add_option("--truth", rec_truth, "ATWV1 ground-truth image (default: rasterized from the config)")
      ->check(CLI::ExistingFile);
  rec->add_option("--system", rec_system, "ATWV1 system cache; built and written there if missing");
  rec->add_option("-o,--output", rec_out, "Output directory");

  auto* val = app.add_subcommand("validate-model", "Audit an attenuation law and print a JSON report");
  add_common(val, val_c, false);
  val->add_option("--law", law, "constant, nsw or power (ignored with --config)");
  val->add_option("--k-inf", k_inf, "constant law k_inf");
  val->add_option("--tau", tau, "NSW tau");
  val->add_option("--tau-tilde", tau_tilde, "NSW tau_tilde");
  val->add_option("--amplitude", amplitude, "power law amplitude");
  val->add_option("--exponent", exponent, "power law exponent");
  val->add_option("--omega-max", omega_max, "grid half-width")->check(CLI::PositiveNumber);
  val->add_option("--points", points, "grid points")->check(CLI::Range(3, 10000000));
  val->add_option("--fd-step", fd_step, "relative finite-difference step")->check(CLI::PositiveNumber);
  val->add_option("--omega0", omega0, "lower bound of the strong-law fit")->check(CLI::PositiveNumber);

  auto* run = app.add_subcommand("run-scenario", "Simulate, reconstruct and score one experiment");
  add_common(run, run_c, true);
  run->add_option("-o,--output", run_out, "Output directory");

  auto* cmp = app.add_subcommand("compare", "Relative L2 error between two ATWV1 images");
  add_common(cmp, cmp_c, false);
  cmp->add_option("image", a_path, "Image")->required()->check(CLI::ExistingFile);
  cmp->add_option("reference", b_path, "Reference image")->required()->check(CLI::ExistingFile);
  cmp->add_flag("--support", support_mask, "Restrict to the reference's non-zero pixels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*sim) {
      apply_threads(sim_c);
      const ScenarioConfig cfg = scenario(sim_c);
      const fs::path out = sim_out.empty() ? default_output() : fs::path(sim_out);
      const ForwardProducts fwd = simulate_scenario(cfg);
      write_wave_data(out / "data.atwv", measure(cfg, fwd.attenuated));
      write_image(out / "truth.atwv", fwd.truth);
      write_image_pgm(fwd.truth, out / "truth.pgm");
      write_text(out / "config.json", scenario_config_to_json(cfg) + "\n");
      std::printf("wrote %s\n", (out / "data.atwv").c_str());
    } else if (*rec) {
      apply_threads(rec_c);
      const ScenarioConfig cfg = scenario(rec_c);
      const fs::path out = rec_out.empty() ? default_output() : fs::path(rec_out);
      const WaveData data = read_wave_data(rec_data);
      Image2D truth;
      if (!rec_truth.empty()) {
        truth = read_image(rec_truth);
      } else {
        const Phantom ph = cfg.phantom == PhantomKind::Disk
                               ? make_disk(cfg.disk_radius, 1.0, cfg.phantom_grid, cfg.image_half_extent)
                               : make_shepp_logan(cfg.phantom_grid, cfg.image_half_extent);
        truth = rasterize(ph, cfg.image_grid(), 4);
        truth.method = "truth";
      }
      std::optional<AttenuationSystem> system;
      if (!rec_system.empty()) {
        const SystemOptions opts{cfg.taylor_order, cfg.inverse_quadrature, ConvolutionMode::FullLine};
        const std::string key = system_key(cfg.model, data.time, opts);
        if (fs::exists(rec_system)) {
          system.emplace(read_system(rec_system));
          if (system->fingerprint() != key || !(system->grid() == data.time)) {
            throw InputError(rec_system + ": cached system does not match the config and data");
          }
        } else {
          system.emplace(build_system(cfg.model, data.time, opts));
          write_system(rec_system, *system);
        }
      }
      const ScenarioResult r = reconstruct_scenario(cfg, truth, data, system ? &*system : nullptr);
      write_scenario_result(r, out);
      print_metrics(r);
    } else if (*val) {
      apply_threads(val_c);
      AttenuationModel model;
      if (!val_c.config.empty()) {
        const nlohmann::json j = nlohmann::json::parse(read_text(val_c.config), nullptr, false);
        if (j.is_discarded()) throw InputError(val_c.config + ": malformed JSON");
        model = parse_model((j.is_object() && j.contains("model") ? j.at("model") : j).dump());
      } else if (law == "constant") {
        model = ConstantLaw{k_inf};
      } else if (law == "nsw") {
        model = NswLaw{tau, tau_tilde};
      } else if (law == "power") {
        model = PowerLaw{amplitude, exponent};
      } else {
        throw InputError("validate-model: give --config or --law constant|nsw|power");
      }
      check_model(model);
      const std::vector<double> grid = symmetric_grid(omega_max, points);
      const ValidationReport report = validate_model(model, grid, {fd_step, omega0});
      std::cout << report_to_json(report, model) << "\n";
    } else if (*run) {
      apply_threads(run_c);
      const ScenarioConfig cfg = scenario(run_c);
      const fs::path out = run_out.empty() ? default_output() / cfg.name : fs::path(run_out);
      const ScenarioResult r = run_scenario(cfg);
      write_scenario_result(r, out);
      print_metrics(r);
      std::printf("wrote %s\n", out.c_str());
    } else if (*cmp) {
      apply_threads(cmp_c);
      const Image2D a = read_image(a_path);
      const Image2D b = read_image(b_path);
      std::vector<char> mask;
      if (support_mask) {
        for (double v : b.values) mask.push_back(v != 0.0 ? 1 : 0);
      }
      const double err = rel_l2_error(a, b, support_mask ? &mask : nullptr);
      double max_abs = 0.0;
      for (std::size_t i = 0; i < a.values.size(); ++i) max_abs = std::max(max_abs, std::abs(a.values[i] - b.values[i]));
      std::printf("{\"rel_l2_error\": %.17g, \"max_abs_diff\": %.17g}\n", err, max_abs);
    }
  } catch (const InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const ConditioningError& e) {
    std::fprintf(stderr, "numerical error: %s (condition number %.3g)\n", e.what(), e.condition_number());
    return 2;
  } catch (const Error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  }
  return 0;
}
