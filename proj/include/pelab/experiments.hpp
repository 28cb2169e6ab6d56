#ifndef PELAB_EXPERIMENTS_HPP
#define PELAB_EXPERIMENTS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pelab/evolution.hpp"
#include "pelab/geometry.hpp"

namespace pelab {

enum class SensitiveData { UniformQuadrantBall, UniformBall, Custom };
enum class Algorithm { Pe, Psmm };

const char* to_string(SensitiveData kind);
const char* to_string(Algorithm algorithm);

/// A seeded simulation study. Every field can be set by name through set(),
/// which is also how sweeps vary a parameter from cell to cell.
///
/// Recognized keys: name, description, annotation, domain (ball|box), d, data
/// (quadrant_ball|ball|custom), data_radius, data_file, n, eps, delta, seeds,
/// seed, T, n_s, ns_multiplier, sigma, H, projection, algorithm (pe|psmm),
/// init (uniform|origin|copy|interpolate), init_beta, psmm_cells,
/// psmm_samples, traces (0|1), threads, sweep, values, series, series_values.
struct Scenario {
  std::string name = "custom";
  std::string description;
  std::string annotation;

  std::string domain = "ball";  // unit ball or unit box in R^d
  int d = 2;
  SensitiveData data = SensitiveData::UniformQuadrantBall;
  double data_radius = 1.0;
  std::string data_file;

  long n = 1000;
  double eps = 1.0;
  double delta = 1e-4;

  long n_seeds = 100;
  std::uint64_t seed = 20240601;

  std::optional<long> T;          // default: ceil(2 ln(n eps))
  std::optional<long> n_s;        // default: from sigma
  double ns_multiplier = 1.0;     // n_s = ceil(multiplier * n_s)
  std::optional<double> sigma;    // default: analytic Gaussian over T steps
  double H = 0.0;
  ProjectionMode projection = ProjectionMode::ThresholdRenormalize;
  Algorithm algorithm = Algorithm::Pe;
  std::string init = "uniform";
  double init_beta = 0.25;
  long psmm_cells = 400;
  std::optional<long> psmm_samples;  // default: n
  bool record_traces = false;
  int threads = 0;  // 0: hardware concurrency

  std::string series_param;
  std::vector<std::string> series_values;
  std::string sweep_param;
  std::vector<std::string> sweep_values;

  void set(const std::string& key, const std::string& value);
  void validate() const;
  Domain make_domain() const;
  /// Plain-text form accepted by parse_scenario.
  std::string to_text() const;
};

/// Reads `key = value` lines; arrays are written `[a, b, c]` and integer ranges
/// `a..b` expand inside arrays. `#` starts a comment.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario_file(const std::string& path);

struct ScenarioInfo {
  std::string name;
  std::string description;
  std::string annotation;
};

std::vector<ScenarioInfo> list_scenarios();
Scenario builtin_scenario(const std::string& name);

/// Parameters actually used by one sweep cell.
struct CellSettings {
  long n = 0;
  double eps = 0, delta = 0;
  int d = 0;
  long T = 0;
  long predicted_T = 0;
  double sigma = 0;
  double alpha = 0;
  int levels = 0;
  long n_s = 0;
  long predicted_n_s = 0;
  double step_sensitivity = 0;
  double effective_sensitivity = 0;
  double total_mu = 0;
  double H = 0;
};

CellSettings resolve_settings(const Scenario& sc);

/// Sensitive dataset for a seed; Custom reads data_file and ignores n.
Dataset generate_sensitive(const Scenario& sc, Rng& rng);

struct SeedResult {
  long seed_index = 0;
  std::uint64_t data_seed = 0;
  std::uint64_t run_seed = 0;
  double initial_w1 = 0;
  double final_w1 = 0;
  std::vector<IterationRecord> trace;  // when traces are recorded
  std::string error;
};

struct SweepRow {
  std::string series;
  std::string value;
  std::string projection;
  std::string algorithm;
  CellSettings settings;
  std::string settings_error;
  double mean_final_w1 = 0;
  double stderr_final_w1 = 0;
  double mean_initial_w1 = 0;
  long n_ok = 0;
  AggregateTrace trace;
  std::vector<SeedResult> seeds;
};

struct SweepResult {
  Scenario scenario;
  std::vector<SweepRow> rows;  // series-major, then sweep value

  const SweepRow& row(const std::string& series, const std::string& value) const;
};

/// Runs every (series, value, seed) cell concurrently. When out_dir is set,
/// writes summary.csv, finals.csv, scenario.txt and, with traces enabled,
/// per-seed and aggregate trace CSVs. Output is a pure function of the scenario.
SweepResult run_scenario(const Scenario& sc, const std::optional<std::string>& out_dir = std::nullopt);

/// Spearman rank correlation with average ranks for ties.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pelab

#endif  // PELAB_EXPERIMENTS_HPP
