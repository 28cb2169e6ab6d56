#include "pelab/evolution.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "pelab/transport.hpp"

namespace pelab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void check_sensitive(const SensitiveDataset& S, const Domain& domain) {
  if (S.size() == 0) throw std::invalid_argument("pe: sensitive dataset is empty");
  if (S.dim() != domain.dim()) throw std::invalid_argument("pe: sensitive data dimension differs from the domain");
}

struct Step {
  Eigen::VectorXd weights;
  bool degenerate = false;
  double bl_err = kNaN;
  double noise_sigma = 0.0;
  const char* mechanism = "";
};

// Turns the exact histogram into the probability vector used for resampling.
Step privatize(const Eigen::VectorXd& hist, const Dataset& V, const PeConfig& cfg, long n, double bl_bound,
               Rng& rng) {
  Step step;
  step.mechanism = to_string(cfg.projection);
  if (cfg.projection == ProjectionMode::LaplaceThreshold) {
    const PrivacyParams& p = cfg.laplace_privacy;
    NoisyHistogram h = laplace_threshold_histogram(hist, n, p.epsilon, p.delta, rng);
    step.weights = std::move(h.weights);
    step.degenerate = h.degenerate;
    return step;
  }
  Eigen::VectorXd noisy = hist;
  if (cfg.sigma > 0) {
    noisy = gaussian_perturb(hist, cfg.sigma, rng);
    step.noise_sigma = cfg.sigma;
  }
  if (cfg.record_bl_error) {
    step.bl_err = cfg.sigma > 0 ? bl_norm(DiscreteMeasure(V, noisy - hist), bl_bound).value : 0.0;
  }
  if (cfg.projection == ProjectionMode::BlProjection) {
    step.weights = bl_project_simplex(DiscreteMeasure(V, std::move(noisy)), bl_bound).measure.weights;
  } else {
    NoisyHistogram h = gaussian_threshold_renormalize(noisy, cfg.threshold_H);
    step.weights = std::move(h.weights);
    step.degenerate = h.degenerate;
  }
  return step;
}

double maybe_w1(SensitiveDataset& S, const Dataset& synthetic, bool evaluate) {
  return evaluate ? empirical_w1(S.evaluation(), synthetic) : kNaN;
}

bool evaluate_at(const PeConfig& cfg, long t) {
  switch (cfg.evaluation) {
    case Evaluation::EveryIteration:
      return true;
    case Evaluation::Endpoints:
      return t == 0 || t == cfg.T;
    case Evaluation::FinalOnly:
      return t == cfg.T;
    case Evaluation::None:
      return false;
  }
  return false;
}

}  // namespace

const char* to_string(ProjectionMode mode) {
  switch (mode) {
    case ProjectionMode::BlProjection:
      return "bl_projection";
    case ProjectionMode::ThresholdRenormalize:
      return "threshold_renormalize";
    case ProjectionMode::LaplaceThreshold:
      return "laplace_threshold";
  }
  return "unknown";
}

ProjectionMode projection_mode_from_string(const std::string& name) {
  if (name == "bl_projection") return ProjectionMode::BlProjection;
  if (name == "threshold_renormalize" || name == "gaussian_all") return ProjectionMode::ThresholdRenormalize;
  if (name == "laplace_threshold") return ProjectionMode::LaplaceThreshold;
  throw std::invalid_argument("unknown projection mode '" + name + "'");
}

void PeConfig::validate() const {
  if (T < 0) throw std::invalid_argument("PeConfig: T must be >= 0");
  if (n_s < 1) throw std::invalid_argument("PeConfig: n_s must be >= 1");
  if (!(sigma >= 0) || !std::isfinite(sigma)) throw std::invalid_argument("PeConfig: sigma must be >= 0");
  if (!(threshold_H >= 0)) throw std::invalid_argument("PeConfig: H must be >= 0");
  if (bl_bound && !(*bl_bound > 0)) throw std::invalid_argument("PeConfig: BL bound must be positive");
  if (projection == ProjectionMode::LaplaceThreshold) laplace_privacy.validate();
}

SensitiveDataset::SensitiveDataset(const Dataset& data) : data_(data) {}

Eigen::VectorXd SensitiveDataset::histogram(const Dataset& V) {
  ++histogram_reads_;
  return nn_histogram(data_, V);
}

const Dataset& SensitiveDataset::evaluation() {
  ++evaluation_reads_;
  return data_;
}

std::vector<double> RunTrace::w1_series() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.w1);
  return out;
}

double empirical_w1(const Dataset& A, const Dataset& B) {
  return w1_distance(compact(empirical(A)), compact(empirical(B)));
}

RunTrace pe_run(SensitiveDataset& S, const PeConfig& cfg, const VariationApi& api, const InitSpec& init,
                const IterationObserver& observer) {
  cfg.validate();
  const Domain& domain = api.domain();
  check_sensitive(S, domain);
  const double bl_bound = cfg.bl_bound.value_or(domain.diameter());
  const long n = static_cast<long>(S.size());
  const auto start = Clock::now();
  Rng rng(cfg.seed);

  RunTrace trace;
  const long reads_before = S.histogram_reads();
  Dataset current = random_api(domain, cfg.n_s, init, rng);
  auto emit = [&](IterationRecord rec) {
    rec.wall_time = seconds_since(start);
    rec.synthetic_size = current.cols();
    if (observer) observer(rec);
    trace.records.push_back(std::move(rec));
  };
  {
    IterationRecord rec;
    rec.w1 = maybe_w1(S, current, evaluate_at(cfg, 0));
    rec.bl_err = kNaN;
    emit(std::move(rec));
  }

  for (long t = 1; t <= cfg.T; ++t) {
    const Dataset V = api.vary_dataset(current, rng);
    const Eigen::VectorXd hist = S.histogram(V);
    Step step = privatize(hist, V, cfg, n, bl_bound, rng);
    if (step.degenerate) step.weights = Eigen::VectorXd::Constant(V.cols(), 1.0 / static_cast<double>(V.cols()));
    current = sample_with_replacement(DiscreteMeasure(V, std::move(step.weights)), cfg.n_s, rng);

    IterationRecord rec;
    rec.t = t;
    rec.w1 = maybe_w1(S, current, evaluate_at(cfg, t));
    rec.bl_err = step.bl_err;
    rec.degenerate = step.degenerate;
    rec.candidates = V.cols();
    rec.noise_sigma = step.noise_sigma;
    rec.mechanism = step.mechanism;
    emit(std::move(rec));
  }
  trace.final_dataset = std::move(current);
  trace.histogram_reads = S.histogram_reads() - reads_before;
  return trace;
}

RunTrace pe_run(const Dataset& S, const PeConfig& cfg, const VariationApi& api, const InitSpec& init) {
  SensitiveDataset handle(S);
  return pe_run(handle, cfg, api, init);
}

long prior_multiplicity(long n, double w, long B) {
  if (B < 1) throw std::invalid_argument("prior_multiplicity: B must be >= 1");
  return std::lround(static_cast<double>(n) * w / static_cast<double>(B)) * B;
}

RunTrace pe_prior_theoretical_run(SensitiveDataset& S, const PeConfig& cfg, const VariationApi& api,
                                  const InitSpec& init, long B, double H) {
  if (B < 1) throw std::invalid_argument("pe_prior_theoretical_run: B must be >= 1");
  if (!(H >= 0)) throw std::invalid_argument("pe_prior_theoretical_run: H must be >= 0");
  if (cfg.T < 0 || !(cfg.sigma >= 0)) throw std::invalid_argument("pe_prior_theoretical_run: invalid config");
  const Domain& domain = api.domain();
  check_sensitive(S, domain);
  const long n = static_cast<long>(S.size());
  const auto start = Clock::now();
  Rng rng(cfg.seed);

  RunTrace trace;
  const long reads_before = S.histogram_reads();
  Dataset current = random_api(domain, n, init, rng);
  auto emit = [&](IterationRecord rec) {
    rec.wall_time = seconds_since(start);
    rec.synthetic_size = current.cols();
    trace.records.push_back(std::move(rec));
  };
  {
    IterationRecord rec;
    rec.w1 = maybe_w1(S, current, evaluate_at(cfg, 0));
    rec.bl_err = kNaN;
    emit(std::move(rec));
  }

  for (long t = 1; t <= cfg.T; ++t) {
    const Dataset V = api.vary_dataset(current, rng);
    Eigen::VectorXd mu = S.histogram(V);
    if (cfg.sigma > 0) mu = gaussian_perturb(mu, cfg.sigma, rng);

    std::vector<long> copies(static_cast<std::size_t>(V.cols()), 0);
    long total = 0;
    for (Eigen::Index i = 0; i < V.cols(); ++i) {
      if (mu[i] < H) continue;
      copies[static_cast<std::size_t>(i)] = std::max(0L, prior_multiplicity(n, mu[i], B));
      total += copies[static_cast<std::size_t>(i)];
    }
    IterationRecord rec;
    rec.t = t;
    rec.candidates = V.cols();
    rec.noise_sigma = cfg.sigma;
    rec.mechanism = "prior_multiplicity";
    if (total == 0) {
      rec.degenerate = true;
    } else {
      Dataset next(V.rows(), total);
      Eigen::Index at = 0;
      for (Eigen::Index i = 0; i < V.cols(); ++i) {
        for (long c = 0; c < copies[static_cast<std::size_t>(i)]; ++c) next.col(at++) = V.col(i);
      }
      current = std::move(next);
    }
    rec.w1 = maybe_w1(S, current, evaluate_at(cfg, t));
    rec.bl_err = kNaN;
    emit(std::move(rec));
  }
  trace.final_dataset = std::move(current);
  trace.histogram_reads = S.histogram_reads() - reads_before;
  return trace;
}

RunTrace pe_prior_theoretical_run(const Dataset& S, const PeConfig& cfg, const VariationApi& api,
                                  const InitSpec& init, long B, double H) {
  SensitiveDataset handle(S);
  return pe_prior_theoretical_run(handle, cfg, api, init, B, H);
}

ContractionFit evaluate_gamma_contraction(const std::vector<double>& trace, double gamma, double err, double tol) {
  if (trace.size() < 2) throw std::invalid_argument("evaluate_gamma_contraction: need at least two entries");
  if (!(gamma > 0 && gamma < 1)) throw std::invalid_argument("evaluate_gamma_contraction: gamma must be in (0, 1)");
  ContractionFit fit;
  fit.bound.reserve(trace.size());
  fit.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trace.size(); ++t) {
    const double b = std::pow(1.0 - gamma, static_cast<double>(t)) * (trace[0] - err) + err;
    fit.bound.push_back(b);
    fit.max_violation = std::max(fit.max_violation, trace[t] - b);
  }
  fit.holds = fit.max_violation <= tol;
  return fit;
}

double plateau_level(const std::vector<double>& trace, std::size_t tail) {
  if (trace.empty() || tail == 0) throw std::invalid_argument("plateau_level: empty trace or tail");
  tail = std::min(tail, trace.size());
  double level = -std::numeric_limits<double>::infinity();
  for (std::size_t i = trace.size() - tail; i < trace.size(); ++i) level = std::max(level, trace[i]);
  return level;
}

std::pair<double, double> mean_and_stderr(const std::vector<double>& values) {
  if (values.empty()) return {kNaN, kNaN};
  const double k = static_cast<double>(values.size());
  double sum = 0;
  for (double v : values) sum += v;
  const double mean = sum / k;
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (k - 1) / k)};
}

AggregateTrace aggregate_traces(const std::vector<RunTrace>& runs) {
  AggregateTrace agg;
  agg.n_seeds = static_cast<long>(runs.size());
  if (runs.empty()) return agg;
  const std::size_t len = runs.front().records.size();
  for (const auto& r : runs) {
    if (r.records.size() != len) throw std::invalid_argument("aggregate_traces: traces differ in length");
  }
  for (std::size_t t = 0; t < len; ++t) {
    std::vector<double> column;
    column.reserve(runs.size());
    for (const auto& r : runs) column.push_back(r.records[t].w1);
    const auto [m, se] = mean_and_stderr(column);
    agg.mean.push_back(m);
    agg.std_error.push_back(se);
  }
  return agg;
}

void write_trace_csv(const std::string& path, const RunTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t,w1,bl_err,degenerate\n";
  for (const auto& r : trace.records) {
    out << r.t << ',' << fmt(r.w1) << ',' << fmt(r.bl_err) << ',' << (r.degenerate ? 1 : 0) << '\n';
  }
}

void write_aggregate_csv(const std::string& path, const AggregateTrace& agg) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t,mean_w1,stderr_w1,n_seeds\n";
  for (std::size_t t = 0; t < agg.mean.size(); ++t) {
    out << t << ',' << fmt(agg.mean[t]) << ',' << fmt(agg.std_error[t]) << ',' << agg.n_seeds << '\n';
  }
}

}  // namespace pelab
