#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>

#include "checks.hpp"
#include "config.hpp"
#include "decaylab/duhamel.hpp"
#include "decaylab/errors.hpp"
#include "decaylab/solver_radial.hpp"
#include "report.hpp"
#include "runner.hpp"

namespace {

using namespace decaylab;
using namespace decaylab::cli;

constexpr int kPass = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;
constexpr int kAcceptance = 3;

void line(const char* name, bool ok, const std::string& detail) {
  std::printf("%-34s %s  %s\n", name, ok ? "PASS" : "FAIL", detail.c_str());
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int cmd_run(const std::string& path, const std::string& output) {
  ScenarioConfig cfg = load_config(path);
  if (!output.empty()) cfg.output_dir = output;
  const RunOutcome out = run_scenario(cfg, std::cerr);
  if (!out.ok) {
    std::cerr << "stage " << out.failed_stage << " failed: " << out.error << '\n';
    return out.validation_error ? kValidation : kRuntime;
  }
  std::cout << out.directory.string() << '\n';
  return kPass;
}

int cmd_report(const std::vector<std::string>& dirs, const std::string& output) {
  std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
  const Report rep = build_report(paths);
  write_report(rep, output);
  std::cout << rep.markdown;
  return rep.all_pass ? kPass : kAcceptance;
}

int cmd_verify_conformal(std::size_t points, std::uint64_t seed) {
  const ConformalCheck c = run_conformal_checks(points, seed);
  std::string res;
  for (const double r : c.residuals) res += fmt("%.3e ", r);
  const bool order_ok = c.min_order >= 1.8;
  const bool maps_ok = c.map_identity_max <= 1e-12;
  line("conformal identity order", order_ok, fmt("order %.3f", c.min_order) + ", residuals " + res);
  line("map identities", maps_ok, fmt("max relative error %.3e", c.map_identity_max));
  return order_ok && maps_ok ? kPass : kAcceptance;
}

int cmd_verify_duhamel(double p, std::size_t per_family, double alpha, double h) {
  const auto lattice = lemma_sample_lattice(per_family);
  QuadratureOptions base;
  QuadratureOptions fine = base;
  fine.min_level = base.min_level + 1;
  fine.max_level = base.max_level + 1;
  fine.tolerance = base.tolerance / 4.0;
  const LemmaTable a = decay_lemma_ratio(Power::duhamel(p), lattice, base);
  const LemmaTable b = decay_lemma_ratio(Power::duhamel(p), lattice, fine);
  const double change = std::abs(b.max_ratio - a.max_ratio) / b.max_ratio;
  const bool lemma_ok = std::isfinite(b.max_ratio) && change < 0.05;
  line("decay lemma ratio", lemma_ok,
       fmt("max %.6g", b.max_ratio) + fmt(", change under refinement %.3e", change));

  InitialDataSpec spec;
  spec.support_radius = alpha;
  const HuygensCheck hc = run_huygens_check(spec, h);
  const bool huygens_ok = hc.max_after <= 1e-10;
  line("Huygens support", huygens_ok,
       fmt("max |chi(t,0)| for t > %.4f: ", hc.t_min) + fmt("%.3e", hc.max_after));
  return lemma_ok && huygens_ok ? kPass : kAcceptance;
}

int cmd_convergence(const std::string& path, std::size_t points, double t_probe, double r_probe,
                    double lo, double hi) {
  const ScenarioConfig cfg = load_config(path);
  if (cfg.geometry != Geometry::radial) throw ConfigError("convergence: radial scenarios only");
  const double r_max = t_probe - 1.0 + cfg.data.support_radius + 0.5;
  const ConvergenceOrder o = radial_self_convergence(cfg.data, Power::scenario(cfg.p), r_max,
                                                     points, t_probe, r_probe, cfg.physical.cfl);
  if (o.degenerate) {
    std::printf("differences identically zero (degenerate)\n");
    return kPass;
  }
  const bool ok = !o.indeterminate && o.order >= lo && o.order <= hi;
  line("self-convergence order", ok,
       fmt("order %.4f", o.order) + fmt(", diffs %.3e", o.coarse_diff) + fmt(" %.3e", o.fine_diff) +
           (o.indeterminate ? " (indeterminate)" : ""));
  return ok ? kPass : kAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decaylab: decay studies for defocusing semilinear waves"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output;
  auto* run = app.add_subcommand("run", "Run one scenario from a config file");
  run->add_option("config", config_path, "Scenario config (INI)")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", output, "Override the output directory");

  std::vector<std::string> run_dirs;
  std::string report_out = "report";
  auto* report = app.add_subcommand("report", "Aggregate run directories into report.json/.md");
  report->add_option("runs", run_dirs, "Run directories");
  report->add_option("-o,--output", report_out, "Report directory");

  std::size_t points = 1000;
  std::uint64_t seed = 1;
  auto* conformal = app.add_subcommand("verify-conformal", "Map identities and the conformal identity");
  conformal->add_option("--points", points, "Random points for the map identities");
  conformal->add_option("--seed", seed, "Random seed");

  double p = 3.0;
  std::size_t per_family = 8;
  double alpha = 0.5;
  double h = 1.0 / 128.0;
  auto* duhamel = app.add_subcommand("verify-duhamel", "Decay lemma ratio and Huygens support");
  duhamel->add_option("--p", p, "Power (2 < p < 5)");
  duhamel->add_option("--per-family", per_family, "Sample points per lattice family");
  duhamel->add_option("--alpha", alpha, "Support radius of the bump");
  duhamel->add_option("--spacing", h, "Grid spacing used for the Huygens margin");

  std::size_t base_points = 257;
  double t_probe = 3.0;
  double r_probe = 2.0;  // inside the outgoing shell at t = 3
  double lo = 1.8;
  double hi = 2.2;
  auto* conv = app.add_subcommand("convergence", "Three-resolution self-convergence order");
  conv->add_option("config", config_path, "Scenario config (INI)")->required()->check(CLI::ExistingFile);
  conv->add_option("--points", base_points, "Coarsest node count");
  conv->add_option("--t-probe", t_probe, "Probe time");
  conv->add_option("--r-probe", r_probe, "Probe radius (keep it on the outgoing shell, where the solution is not small)");
  conv->add_option("--min-order", lo, "Lower acceptance bound");
  conv->add_option("--max-order", hi, "Upper acceptance bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kValidation;
  }

  try {
    if (*run) return cmd_run(config_path, output);
    if (*report) return cmd_report(run_dirs, report_out);
    if (*conformal) return cmd_verify_conformal(points, seed);
    if (*duhamel) return cmd_verify_duhamel(p, per_family, alpha, h);
    if (*conv) return cmd_convergence(config_path, base_points, t_probe, r_probe, lo, hi);
  } catch (const decaylab::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kRuntime;
}
