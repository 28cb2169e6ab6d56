// pe-lab: command-line front end for the experiment harness and calculators.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "pelab/experiments.hpp"
#include "pelab/hyperparams.hpp"
#include "pelab/privacy.hpp"

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int cmd_run(const std::string& name, const std::string& file, const std::string& out, long seeds,
            const std::vector<std::string>& sets) {
  pelab::Scenario sc = file.empty() ? pelab::builtin_scenario(name) : pelab::load_scenario_file(file);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    sc.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (seeds > 0) sc.n_seeds = seeds;
  const std::string dir = out.empty() ? "results/" + sc.name : out;
  const pelab::SweepResult result = pelab::run_scenario(sc, dir);
  std::printf("%-14s %-24s %14s %14s %6s\n", sc.series_param.empty() ? "series" : sc.series_param.c_str(),
              sc.sweep_param.empty() ? "value" : sc.sweep_param.c_str(), "mean_final_w1", "stderr", "ok");
  for (const auto& r : result.rows) {
    std::printf("%-14s %-24s %14.6g %14.6g %3ld/%ld\n", r.series.c_str(), r.value.c_str(), r.mean_final_w1,
                r.stderr_final_w1, r.n_ok, sc.n_seeds);
  }
  std::printf("wrote %s\n", dir.c_str());
  return 0;
}

int cmd_params(long n, double eps, double delta, int d, double D, bool json) {
  const pelab::TheoremParams p = pelab::theorem2_params_unchecked(n, eps, delta, d, D);
  const auto fields = p.fields();
  if (json) {
    nlohmann::ordered_json j;
    for (const auto& [k, v] : fields) j[k] = v;
    std::cout << j.dump(2) << '\n';
  } else {
    for (const auto& [k, v] : fields) std::cout << k << '=' << v << '\n';
  }
  if (!p.sigma_in_unit_interval) {
    std::cerr << "warning: sigma >= 1; the theorem needs n*eps >= " << num(pelab::minimum_n_eps(delta, d)) << '\n';
    return 2;
  }
  return 0;
}

int cmd_calibrate(long n, double eps, double delta, long T) {
  const double step = pelab::nn_histogram_sensitivity(n);
  const pelab::AnalyticCalibration c = pelab::calibrate_analytic_gaussian(eps, delta, step, T);
  std::cout << "n=" << n << '\n'
            << "eps=" << num(eps) << '\n'
            << "delta=" << num(delta) << '\n'
            << "T=" << c.T << '\n'
            << "composition=gaussian_dp\n"
            << "step_sensitivity=" << num(c.step_sensitivity) << '\n'
            << "effective_sensitivity=" << num(c.effective_sensitivity) << '\n'
            << "step_mu=" << num(c.step_mu) << '\n'
            << "total_mu=" << num(c.total_mu) << '\n'
            << "achieved_delta=" << num(c.achieved_delta) << '\n'
            << "sigma=" << num(c.sigma) << '\n';
  return 0;
}

int cmd_list() {
  for (const auto& s : pelab::list_scenarios()) {
    std::cout << s.name << "\n  " << s.description << "\n  [" << s.annotation << "]\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pe-lab: private evolution and PSMM experiments"};
  app.require_subcommand(1);

  std::string scenario, scenario_file, out;
  long seeds = 0;
  std::vector<std::string> sets;
  auto* run = app.add_subcommand("run", "Run a built-in or file-defined scenario");
  auto* by_name = run->add_option("--scenario", scenario, "Built-in scenario name");
  auto* by_file = run->add_option("--file", scenario_file, "Scenario file (key = value format)");
  by_name->excludes(by_file);
  run->add_option("--out", out, "Output directory (default results/<name>)");
  run->add_option("--seeds", seeds, "Override the number of seeds");
  run->add_option("--set", sets, "Override a scenario key: key=value (repeatable)");

  long n = 1000, T = 0;
  double eps = 1.0, delta = 1e-4, D = 2.0;
  int d = 2;
  bool json = false;
  auto* params = app.add_subcommand("params", "Print the convergence-theorem parameter tuple");
  params->add_option("--n", n, "Sensitive dataset size")->required();
  params->add_option("--eps", eps, "Privacy epsilon")->required();
  params->add_option("--delta", delta, "Privacy delta")->required();
  params->add_option("--d", d, "Dimension")->required();
  params->add_option("--D", D, "Domain diameter")->required();
  params->add_flag("--json", json, "Print JSON only");

  auto* calibrate = app.add_subcommand("calibrate", "Analytic Gaussian sigma for T NN-histogram releases");
  calibrate->add_option("--n", n, "Sensitive dataset size")->required();
  calibrate->add_option("--eps", eps, "Privacy epsilon")->required();
  calibrate->add_option("--delta", delta, "Privacy delta")->required();
  calibrate->add_option("--T", T, "Number of releases (default ceil(2 ln(n eps)))");

  auto* list = app.add_subcommand("list", "List built-in scenarios");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) {
      if (scenario.empty() && scenario_file.empty()) throw std::invalid_argument("run needs --scenario or --file");
      return cmd_run(scenario, scenario_file, out, seeds, sets);
    }
    if (*params) return cmd_params(n, eps, delta, d, D, json);
    if (*calibrate) return cmd_calibrate(n, eps, delta, T > 0 ? T : pelab::t_heuristic(n, eps));
    if (*list) return cmd_list();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
