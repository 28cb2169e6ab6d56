#include "pelab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pelab/apis.hpp"
#include "pelab/hyperparams.hpp"
#include "pelab/measures.hpp"
#include "pelab/privacy.hpp"
#include "pelab/psmm.hpp"

namespace pelab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw std::invalid_argument("scenario: '" + key + "' expects a number, got '" + v + "'");
  return x;
}

long parse_long(const std::string& key, const std::string& v) {
  const double x = parse_double(key, v);
  if (x != std::floor(x) || std::abs(x) > 9e15) {
    throw std::invalid_argument("scenario: '" + key + "' expects an integer, got '" + v + "'");
  }
  return static_cast<long>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw std::invalid_argument("scenario: '" + key + "' expects 0 or 1, got '" + v + "'");
}

bool is_auto(const std::string& v) { return v == "auto" || v.empty(); }

std::vector<std::string> parse_array(const std::string& raw) {
  std::string v = trim(raw);
  if (v.size() >= 2 && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto dots = item.find("..");
    if (dots != std::string::npos) {
      const long a = parse_long("range", trim(item.substr(0, dots)));
      const long b = parse_long("range", trim(item.substr(dots + 2)));
      if (b < a) throw std::invalid_argument("scenario: empty range '" + item + "'");
      for (long k = a; k <= b; ++k) out.push_back(std::to_string(k));
    } else {
      out.push_back(item);
    }
  }
  return out;
}

std::string join_array(const std::vector<std::string>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + values[i];
  return out + "]";
}

std::string csv_safe(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

std::string path_safe(const std::string& s) {
  std::string out;
  for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : '_';
  return out.empty() ? "all" : out;
}

SensitiveData sensitive_data_from_string(const std::string& v) {
  if (v == "quadrant_ball") return SensitiveData::UniformQuadrantBall;
  if (v == "ball") return SensitiveData::UniformBall;
  if (v == "custom") return SensitiveData::Custom;
  throw std::invalid_argument("scenario: unknown data generator '" + v + "'");
}

Algorithm algorithm_from_string(const std::string& v) {
  if (v == "pe") return Algorithm::Pe;
  if (v == "psmm") return Algorithm::Psmm;
  throw std::invalid_argument("scenario: unknown algorithm '" + v + "'");
}

InitSpec make_init(const Scenario& sc, const Domain& domain, const Dataset& S) {
  if (sc.init == "uniform") {
    if (domain.is_ball()) return UniformBall{};
    return UniformBox{};
  }
  if (sc.init == "origin") {
    return PointMass{domain.is_ball() ? domain.as_ball().center : Point(0.5 * (domain.as_box().lo + domain.as_box().hi))};
  }
  if (sc.init == "copy") return CopyOf{S};
  if (sc.init == "interpolate") return Interpolate{sc.init_beta, S};
  throw std::invalid_argument("scenario: unknown init '" + sc.init + "'");
}

struct Task {
  std::size_t row;
  long seed_index;
};

}  // namespace

const char* to_string(SensitiveData kind) {
  switch (kind) {
    case SensitiveData::UniformQuadrantBall:
      return "quadrant_ball";
    case SensitiveData::UniformBall:
      return "ball";
    case SensitiveData::Custom:
      return "custom";
  }
  return "unknown";
}

const char* to_string(Algorithm algorithm) { return algorithm == Algorithm::Pe ? "pe" : "psmm"; }

void Scenario::set(const std::string& key_raw, const std::string& value_raw) {
  const std::string key = trim(key_raw);
  const std::string v = trim(value_raw);
  if (key == "name") {
    name = v;
  } else if (key == "description") {
    description = v;
  } else if (key == "annotation") {
    annotation = v;
  } else if (key == "domain") {
    if (v != "ball" && v != "box") throw std::invalid_argument("scenario: domain must be ball or box");
    domain = v;
  } else if (key == "d") {
    d = static_cast<int>(parse_long(key, v));
  } else if (key == "data") {
    data = sensitive_data_from_string(v);
  } else if (key == "data_radius") {
    data_radius = parse_double(key, v);
  } else if (key == "data_file") {
    data_file = v;
  } else if (key == "n") {
    n = parse_long(key, v);
  } else if (key == "eps") {
    eps = parse_double(key, v);
  } else if (key == "delta") {
    delta = parse_double(key, v);
  } else if (key == "seeds") {
    n_seeds = parse_long(key, v);
  } else if (key == "seed") {
    seed = static_cast<std::uint64_t>(parse_long(key, v));
  } else if (key == "T") {
    T = is_auto(v) ? std::nullopt : std::optional<long>(parse_long(key, v));
  } else if (key == "n_s") {
    n_s = is_auto(v) ? std::nullopt : std::optional<long>(parse_long(key, v));
  } else if (key == "ns_multiplier") {
    ns_multiplier = parse_double(key, v);
  } else if (key == "sigma") {
    sigma = is_auto(v) ? std::nullopt : std::optional<double>(parse_double(key, v));
  } else if (key == "H") {
    H = parse_double(key, v);
  } else if (key == "projection") {
    projection = projection_mode_from_string(v);
  } else if (key == "algorithm") {
    algorithm = algorithm_from_string(v);
  } else if (key == "init") {
    init = v;
  } else if (key == "init_beta") {
    init_beta = parse_double(key, v);
  } else if (key == "psmm_cells") {
    psmm_cells = parse_long(key, v);
  } else if (key == "psmm_samples") {
    psmm_samples = is_auto(v) ? std::nullopt : std::optional<long>(parse_long(key, v));
  } else if (key == "traces") {
    record_traces = parse_bool(key, v);
  } else if (key == "threads") {
    threads = static_cast<int>(parse_long(key, v));
  } else if (key == "sweep") {
    sweep_param = v;
  } else if (key == "values") {
    sweep_values = parse_array(v);
  } else if (key == "series") {
    series_param = v;
  } else if (key == "series_values") {
    series_values = parse_array(v);
  } else {
    throw std::invalid_argument("scenario: unknown key '" + key + "'");
  }
}

void Scenario::validate() const {
  if (d < 1) throw std::invalid_argument("scenario: d must be >= 1");
  if (n_seeds < 1) throw std::invalid_argument("scenario: seeds must be >= 1");
  if (data != SensitiveData::Custom && n < 2) throw std::invalid_argument("scenario: n must be >= 2");
  if (data == SensitiveData::Custom && data_file.empty()) throw std::invalid_argument("scenario: custom data needs data_file");
  if (!(data_radius > 0)) throw std::invalid_argument("scenario: data_radius must be positive");
  PrivacyParams{eps, delta}.validate();
  if (T && *T < 0) throw std::invalid_argument("scenario: T must be >= 0");
  if (n_s && *n_s < 1) throw std::invalid_argument("scenario: n_s must be >= 1");
  if (!(ns_multiplier > 0)) throw std::invalid_argument("scenario: ns_multiplier must be positive");
  if (sigma && !(*sigma >= 0)) throw std::invalid_argument("scenario: sigma must be >= 0");
  if (psmm_cells < 1) throw std::invalid_argument("scenario: psmm_cells must be >= 1");
  if (!sweep_param.empty() && sweep_values.empty()) throw std::invalid_argument("scenario: sweep has no values");
  if (!series_param.empty() && series_values.empty()) throw std::invalid_argument("scenario: series has no values");
  if (sweep_param.empty() && !sweep_values.empty()) throw std::invalid_argument("scenario: values given without sweep");
  if (series_param.empty() && !series_values.empty()) throw std::invalid_argument("scenario: series_values given without series");
  for (const auto& key : {sweep_param, series_param}) {
    if (key == "sweep" || key == "values" || key == "series" || key == "series_values" || key == "seeds") {
      throw std::invalid_argument("scenario: cannot sweep '" + key + "'");
    }
  }
}

Domain Scenario::make_domain() const {
  if (domain == "box") return Domain::unit_box(d);
  return Domain::unit_ball(d);
}

std::string Scenario::to_text() const {
  std::ostringstream out;
  auto opt = [](const auto& o) { return o ? fmt(static_cast<double>(*o)) : std::string("auto"); };
  out << "name = " << name << '\n';
  if (!description.empty()) out << "description = " << description << '\n';
  if (!annotation.empty()) out << "annotation = " << annotation << '\n';
  out << "domain = " << domain << '\n'
      << "d = " << d << '\n'
      << "data = " << to_string(data) << '\n'
      << "data_radius = " << fmt(data_radius) << '\n';
  if (!data_file.empty()) out << "data_file = " << data_file << '\n';
  out << "n = " << n << '\n'
      << "eps = " << fmt(eps) << '\n'
      << "delta = " << fmt(delta) << '\n'
      << "seeds = " << n_seeds << '\n'
      << "seed = " << seed << '\n'
      << "T = " << opt(T) << '\n'
      << "n_s = " << opt(n_s) << '\n'
      << "ns_multiplier = " << fmt(ns_multiplier) << '\n'
      << "sigma = " << opt(sigma) << '\n'
      << "H = " << fmt(H) << '\n'
      << "projection = " << to_string(projection) << '\n'
      << "algorithm = " << to_string(algorithm) << '\n'
      << "init = " << init << '\n'
      << "init_beta = " << fmt(init_beta) << '\n'
      << "psmm_cells = " << psmm_cells << '\n'
      << "psmm_samples = " << opt(psmm_samples) << '\n'
      << "traces = " << (record_traces ? 1 : 0) << '\n';
  if (!series_param.empty()) out << "series = " << series_param << "\nseries_values = " << join_array(series_values) << '\n';
  if (!sweep_param.empty()) out << "sweep = " << sweep_param << "\nvalues = " << join_array(sweep_values) << '\n';
  return out.str();
}

Scenario parse_scenario(const std::string& text) {
  Scenario sc;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("scenario line " + std::to_string(lineno) + ": expected key = value");
    }
    sc.set(line.substr(0, eq), line.substr(eq + 1));
  }
  sc.validate();
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

std::vector<ScenarioInfo> list_scenarios() {
  return {
      {"fig2_T_sweep", "final W1 against the number of steps T for n in {250, 1000, 4000}",
       "steps sweep: impact of T, predicted T = ceil(2 ln(n eps))"},
      {"fig2_ns_sweep", "final W1 against n_s = ceil(c n_s*) for c in {1/8, ..., 8}",
       "sample-size sweep: impact of the number of synthetic samples"},
      {"fig5_init", "W1 trace per iteration for copy, origin and interpolated initializations",
       "initialization study: effect of the initial synthetic dataset"},
      {"appB_d_sweep", "final W1 against the dimension d", "dimension sweep: accuracy degrades with d"},
      {"appB_eps_sweep", "final W1 against the privacy budget eps", "budget sweep: accuracy improves with eps"},
      {"appF_clustered", "Laplace+threshold against Gaussian histograms on clustered and spread data",
       "mechanism comparison: data in balls of radius 0.02 and 0.5"},
      {"psmm_vs_pe", "grid PSMM against PE at n = 4000 with a 20 x 20 grid",
       "PSMM as a one-step PE over a fixed net"},
  };
}

Scenario builtin_scenario(const std::string& name) {
  Scenario sc;
  sc.name = name;
  for (const auto& info : list_scenarios()) {
    if (info.name == name) {
      sc.description = info.description;
      sc.annotation = info.annotation;
    }
  }
  if (sc.description.empty()) throw std::invalid_argument("unknown scenario '" + name + "'");
  if (name == "fig2_T_sweep") {
    sc.set("series", "n");
    sc.set("series_values", "[250, 1000, 4000]");
    sc.set("sweep", "T");
    sc.set("values", "[1..24]");
  } else if (name == "fig2_ns_sweep") {
    sc.set("series", "n");
    sc.set("series_values", "[250, 1000, 4000]");
    sc.set("sweep", "ns_multiplier");
    sc.set("values", "[0.125, 0.25, 0.5, 1, 2, 4, 8]");
  } else if (name == "fig5_init") {
    sc.set("sweep", "init");
    sc.set("values", "[copy, origin, interpolate]");
    sc.set("init_beta", "0.25");
    sc.set("traces", "1");
  } else if (name == "appB_d_sweep") {
    sc.set("sweep", "d");
    sc.set("values", "[1..10]");
  } else if (name == "appB_eps_sweep") {
    sc.set("sweep", "eps");
    sc.set("values", "[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1]");
  } else if (name == "appF_clustered") {
    sc.set("data", "ball");
    sc.set("series", "data_radius");
    sc.set("series_values", "[0.02, 0.5]");
    sc.set("sweep", "projection");
    sc.set("values", "[threshold_renormalize, laplace_threshold]");
  } else if (name == "psmm_vs_pe") {
    sc.set("n", "4000");
    sc.set("psmm_cells", "400");
    sc.set("sweep", "algorithm");
    sc.set("values", "[pe, psmm]");
  }
  sc.validate();
  return sc;
}

Dataset generate_sensitive(const Scenario& sc, Rng& rng) {
  const Domain domain = sc.make_domain();
  switch (sc.data) {
    case SensitiveData::UniformQuadrantBall: {
      if (!domain.is_ball()) throw std::invalid_argument("quadrant_ball data needs a ball domain");
      const auto& b = domain.as_ball();
      Dataset S = sample_uniform_ball(Point::Zero(sc.d), b.radius, sc.n, rng).cwiseAbs();
      return S.colwise() + b.center;
    }
    case SensitiveData::UniformBall: {
      const auto bb = domain.bounding_box();
      const Point center = 0.5 * (bb.lo + bb.hi);
      Dataset S = sample_uniform_ball(center, sc.data_radius, sc.n, rng);
      if (!contains_all(domain, S)) throw std::invalid_argument("ball data does not fit in the domain");
      return S;
    }
    case SensitiveData::Custom: {
      CsvReadOptions opts;
      opts.domain = domain;
      return read_dataset_csv(sc.data_file, opts);
    }
  }
  throw std::invalid_argument("unknown data generator");
}

CellSettings resolve_settings(const Scenario& sc) {
  sc.validate();
  CellSettings s;
  s.n = sc.n;
  if (sc.data == SensitiveData::Custom) {
    CsvReadOptions opts;
    opts.domain = sc.make_domain();
    s.n = read_dataset_csv(sc.data_file, opts).cols();
  }
  s.eps = sc.eps;
  s.delta = sc.delta;
  s.d = sc.d;
  s.H = sc.H;
  s.predicted_T = t_heuristic(s.n, s.eps);
  s.T = sc.T.value_or(s.predicted_T);
  s.step_sensitivity = nn_histogram_sensitivity(s.n);
  if (sc.sigma) {
    s.sigma = *sc.sigma;
  } else {
    if (s.T < 1) throw std::invalid_argument("scenario: calibrating sigma needs T >= 1");
    const AnalyticCalibration cal = calibrate_analytic_gaussian(s.eps, s.delta, s.step_sensitivity, s.T);
    s.sigma = cal.sigma;
    s.effective_sensitivity = cal.effective_sensitivity;
    s.total_mu = cal.total_mu;
  }
  const double D = sc.make_domain().diameter();
  if (s.sigma > 0) {
    const ScaleParams scale = scale_params_from_sigma(s.sigma, s.d, D);
    s.alpha = scale.alpha;
    s.levels = scale.levels;
    s.predicted_n_s = scale.n_s;
  } else if (!sc.n_s) {
    throw std::invalid_argument("scenario: sigma = 0 needs an explicit n_s");
  } else {
    s.alpha = D * 1e-3;
    s.levels = variation_levels(D, s.alpha);
    s.predicted_n_s = *sc.n_s;
  }
  s.n_s = sc.n_s.value_or(
      std::max(1L, static_cast<long>(std::ceil(sc.ns_multiplier * static_cast<double>(s.predicted_n_s) - 1e-9))));
  return s;
}

const SweepRow& SweepResult::row(const std::string& series, const std::string& value) const {
  for (const auto& r : rows) {
    if (r.series == series && r.value == value) return r;
  }
  throw std::out_of_range("no sweep row for series '" + series + "' value '" + value + "'");
}

namespace {

struct RowContext {
  Scenario sc;
  CellSettings settings;
  std::shared_ptr<const PartitionSpec> partition;
  std::shared_ptr<const GaussianVariationApi> api;
};

void run_seed(const RowContext& ctx, SeedResult& out) {
  const Scenario& sc = ctx.sc;
  const Domain domain = sc.make_domain();
  Rng data_rng(out.data_seed);
  const Dataset S = generate_sensitive(sc, data_rng);
  if (sc.algorithm == Algorithm::Psmm) {
    Rng rng(out.run_seed);
    const long samples = sc.psmm_samples.value_or(static_cast<long>(S.cols()));
    const PsmmResult r = psmm_run(S, *ctx.partition, samples, sc.eps, sc.delta, rng);
    out.initial_w1 = kNaN;
    out.final_w1 = empirical_w1(S, r.synthetic);
    if (sc.record_traces) {
      IterationRecord rec;
      rec.w1 = out.final_w1;
      rec.bl_err = kNaN;
      out.trace.push_back(rec);
    }
    return;
  }
  PeConfig cfg;
  cfg.T = ctx.settings.T;
  cfg.n_s = ctx.settings.n_s;
  cfg.sigma = ctx.settings.sigma;
  cfg.projection = sc.projection;
  cfg.threshold_H = ctx.settings.H;
  cfg.laplace_privacy = {sc.eps, sc.delta};
  cfg.seed = out.run_seed;
  cfg.evaluation = sc.record_traces ? Evaluation::EveryIteration : Evaluation::Endpoints;
  SensitiveDataset handle(S);
  RunTrace trace = pe_run(handle, cfg, *ctx.api, make_init(sc, domain, S));
  out.initial_w1 = trace.records.front().w1;
  out.final_w1 = trace.records.back().w1;
  if (sc.record_traces) out.trace = std::move(trace.records);
}

void write_outputs(const SweepResult& result, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const Scenario& sc = result.scenario;
  {
    std::ofstream f(fs::path(dir) / "scenario.txt");
    f << sc.to_text();
  }
  {
    std::ofstream f(fs::path(dir) / "summary.csv");
    f << "scenario,series_param,series,sweep_param,value,algorithm,projection,n,eps,delta,d,T,predicted_T,sigma,"
         "alpha,levels,n_s,predicted_n_s,step_sensitivity,effective_sensitivity,total_mu,H,n_seeds,n_ok,"
         "mean_initial_w1,mean_final_w1,stderr_final_w1,error\n";
    for (const auto& r : result.rows) {
      const CellSettings& s = r.settings;
      f << sc.name << ',' << sc.series_param << ',' << r.series << ',' << sc.sweep_param << ',' << r.value << ','
        << r.algorithm << ',' << r.projection << ',' << s.n << ',' << fmt(s.eps) << ',' << fmt(s.delta) << ','
        << s.d << ',' << s.T << ',' << s.predicted_T << ',' << fmt(s.sigma) << ',' << fmt(s.alpha) << ','
        << s.levels << ',' << s.n_s << ',' << s.predicted_n_s << ',' << fmt(s.step_sensitivity) << ','
        << fmt(s.effective_sensitivity) << ',' << fmt(s.total_mu) << ',' << fmt(s.H) << ',' << sc.n_seeds << ','
        << r.n_ok << ',' << fmt(r.mean_initial_w1) << ',' << fmt(r.mean_final_w1) << ','
        << fmt(r.stderr_final_w1) << ',' << csv_safe(r.settings_error) << '\n';
    }
  }
  {
    std::ofstream f(fs::path(dir) / "finals.csv");
    f << "series,value,seed_index,data_seed,run_seed,initial_w1,final_w1,error\n";
    for (const auto& r : result.rows) {
      for (const auto& s : r.seeds) {
        f << r.series << ',' << r.value << ',' << s.seed_index << ',' << s.data_seed << ',' << s.run_seed << ','
          << fmt(s.initial_w1) << ',' << fmt(s.final_w1) << ',' << csv_safe(s.error) << '\n';
      }
    }
  }
  if (!sc.record_traces) return;
  std::ofstream all(fs::path(dir) / "traces.csv");
  all << "series,value,t,mean_w1,stderr_w1,n_seeds\n";
  for (const auto& r : result.rows) {
    const fs::path sub = fs::path(dir) / "traces" / (path_safe(r.series) + "_" + path_safe(r.value));
    fs::create_directories(sub);
    for (const auto& s : r.seeds) {
      if (!s.error.empty()) continue;
      RunTrace t;
      t.records = s.trace;
      char name[32];
      std::snprintf(name, sizeof name, "seed_%04ld.csv", s.seed_index);
      write_trace_csv((sub / name).string(), t);
    }
    write_aggregate_csv((sub / "aggregate.csv").string(), r.trace);
    for (std::size_t t = 0; t < r.trace.mean.size(); ++t) {
      all << r.series << ',' << r.value << ',' << t << ',' << fmt(r.trace.mean[t]) << ','
          << fmt(r.trace.std_error[t]) << ',' << r.trace.n_seeds << '\n';
    }
  }
}

}  // namespace

SweepResult run_scenario(const Scenario& sc, const std::optional<std::string>& out_dir) {
  sc.validate();
  SweepResult result;
  result.scenario = sc;

  const std::vector<std::string> series = sc.series_param.empty() ? std::vector<std::string>{""} : sc.series_values;
  const std::vector<std::string> values = sc.sweep_param.empty() ? std::vector<std::string>{""} : sc.sweep_values;

  std::vector<RowContext> contexts;
  for (const auto& sv : series) {
    for (const auto& vv : values) {
      SweepRow row;
      row.series = sv;
      row.value = vv;
      RowContext ctx{sc, {}, nullptr, nullptr};
      try {
        if (!sc.series_param.empty()) ctx.sc.set(sc.series_param, sv);
        if (!sc.sweep_param.empty()) ctx.sc.set(sc.sweep_param, vv);
        ctx.settings = resolve_settings(ctx.sc);
        const Domain domain = ctx.sc.make_domain();
        if (ctx.sc.algorithm == Algorithm::Psmm) {
          ctx.partition = std::make_shared<const PartitionSpec>(grid_partition(domain, ctx.sc.psmm_cells));
        } else {
          ctx.api = std::make_shared<const GaussianVariationApi>(domain, ctx.settings.alpha);
        }
      } catch (const std::exception& e) {
        row.settings_error = e.what();
      }
      row.settings = ctx.settings;
      row.projection = to_string(ctx.sc.projection);
      row.algorithm = to_string(ctx.sc.algorithm);
      row.seeds.resize(static_cast<std::size_t>(sc.n_seeds));
      for (long k = 0; k < sc.n_seeds; ++k) {
        SeedResult& s = row.seeds[static_cast<std::size_t>(k)];
        s.seed_index = k;
        s.data_seed = child_seed(sc.seed, 2 * static_cast<std::uint64_t>(k));
        s.run_seed = child_seed(sc.seed, 2 * static_cast<std::uint64_t>(k) + 1);
      }
      result.rows.push_back(std::move(row));
      contexts.push_back(std::move(ctx));
    }
  }

  std::vector<Task> tasks;
  for (std::size_t r = 0; r < result.rows.size(); ++r) {
    for (long k = 0; k < sc.n_seeds; ++k) tasks.push_back({r, k});
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      SweepRow& row = result.rows[tasks[i].row];
      SeedResult& s = row.seeds[static_cast<std::size_t>(tasks[i].seed_index)];
      if (!row.settings_error.empty()) {
        s.error = row.settings_error;
        s.initial_w1 = s.final_w1 = kNaN;
        continue;
      }
      try {
        run_seed(contexts[tasks[i].row], s);
      } catch (const std::exception& e) {
        s.error = e.what();
        s.initial_w1 = s.final_w1 = kNaN;
        s.trace.clear();
      }
    }
  };
  unsigned threads = sc.threads > 0 ? static_cast<unsigned>(sc.threads) : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(tasks.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (auto& row : result.rows) {
    std::vector<double> finals, initials;
    std::vector<RunTrace> traces;
    for (const auto& s : row.seeds) {
      if (!s.error.empty()) continue;
      finals.push_back(s.final_w1);
      initials.push_back(s.initial_w1);
      if (sc.record_traces) {
        RunTrace t;
        t.records = s.trace;
        traces.push_back(std::move(t));
      }
    }
    row.n_ok = static_cast<long>(finals.size());
    std::tie(row.mean_final_w1, row.stderr_final_w1) = mean_and_stderr(finals);
    row.mean_initial_w1 = mean_and_stderr(initials).first;
    if (sc.record_traces) row.trace = aggregate_traces(traces);
  }
  if (out_dir) write_outputs(result, *out_dir);
  return result;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length series");
  auto ranks = [](const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < order.size();) {
      std::size_t j = i;
      while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
      const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
      for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
      i = j + 1;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double k = static_cast<double>(x.size());
  const double mx = (k + 1) / 2;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - mx);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - mx) * (ry[i] - mx);
  }
  if (sxx == 0 || syy == 0) return kNaN;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace pelab
