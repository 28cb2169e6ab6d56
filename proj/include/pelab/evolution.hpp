#ifndef PELAB_EVOLUTION_HPP
#define PELAB_EVOLUTION_HPP

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pelab/apis.hpp"
#include "pelab/geometry.hpp"
#include "pelab/measures.hpp"
#include "pelab/privacy.hpp"

namespace pelab {

/// How the noisy histogram becomes a probability vector over V_t.
enum class ProjectionMode {
  BlProjection,          // Gaussian noise, then the bounded-Lipschitz projection
  ThresholdRenormalize,  // Gaussian noise, zero entries below H, renormalize
  LaplaceThreshold,      // Laplace noise on positive entries, threshold, renormalize
};

const char* to_string(ProjectionMode mode);
ProjectionMode projection_mode_from_string(const std::string& name);

/// When the W1 distance to the sensitive data is computed (Endpoints: t = 0 and
/// t = T). Evaluation is a diagnostic and never feeds back into the algorithm.
enum class Evaluation { EveryIteration, Endpoints, FinalOnly, None };

struct PeConfig {
  long T = 0;
  Eigen::Index n_s = 1;
  double sigma = 0.0;  // 0 skips the Gaussian noise
  ProjectionMode projection = ProjectionMode::ThresholdRenormalize;
  double threshold_H = 0.0;          // ThresholdRenormalize only
  PrivacyParams laplace_privacy;     // LaplaceThreshold only, spent per iteration
  std::optional<double> bl_bound;    // test-function bound D; domain diameter by default
  std::uint64_t seed = 0;
  Evaluation evaluation = Evaluation::EveryIteration;
  bool record_bl_error = false;      // bl(mu_hat_t, mu_tilde_t), Gaussian modes only

  void validate() const;
};

/// Read-only handle to the sensitive dataset. Algorithms may only see the data
/// through histogram(), which counts every read; evaluation() is a separate,
/// separately counted path for diagnostics.
class SensitiveDataset {
 public:
  explicit SensitiveDataset(const Dataset& data);

  Eigen::VectorXd histogram(const Dataset& V);
  const Dataset& evaluation();

  Eigen::Index size() const { return data_.cols(); }
  int dim() const { return static_cast<int>(data_.rows()); }
  long histogram_reads() const { return histogram_reads_; }
  long evaluation_reads() const { return evaluation_reads_; }

 private:
  const Dataset& data_;
  long histogram_reads_ = 0;
  long evaluation_reads_ = 0;
};

struct IterationRecord {
  long t = 0;
  double w1 = 0.0;      // NaN when not evaluated
  double bl_err = 0.0;  // NaN when not recorded
  bool degenerate = false;
  double wall_time = 0.0;  // seconds since the run started
  Eigen::Index candidates = 0;  // |V_t|, 0 at t = 0
  Eigen::Index synthetic_size = 0;
  double noise_sigma = 0.0;  // Gaussian scale applied at this step
  std::string mechanism;     // empty at t = 0
};

struct RunTrace {
  std::vector<IterationRecord> records;  // t = 0..T
  Dataset final_dataset;
  long histogram_reads = 0;

  std::vector<double> w1_series() const;
  double final_w1() const { return records.back().w1; }
};

using IterationObserver = std::function<void(const IterationRecord&)>;

/// Private Evolution with a projection step (the algorithm with BL projection, or
/// its practical threshold variants depending on cfg.projection).
RunTrace pe_run(SensitiveDataset& S, const PeConfig& cfg, const VariationApi& api, const InitSpec& init,
                const IterationObserver& observer = {});
RunTrace pe_run(const Dataset& S, const PeConfig& cfg, const VariationApi& api, const InitSpec& init);

/// The earlier theoretical variant: S_0 of size |S|, threshold at H, and the next
/// dataset built deterministically with nint(n mu'[i] / B) * B copies of V[i].
/// An empty result is flagged degenerate and S_{t-1} is kept. cfg.n_s and
/// cfg.projection are ignored.
RunTrace pe_prior_theoretical_run(SensitiveDataset& S, const PeConfig& cfg, const VariationApi& api,
                                  const InitSpec& init, long B, double H);
RunTrace pe_prior_theoretical_run(const Dataset& S, const PeConfig& cfg, const VariationApi& api,
                                  const InitSpec& init, long B, double H);

/// Copies of V[i] in the prior variant: nint(n w / B) * B.
long prior_multiplicity(long n, double w, long B);

struct ContractionFit {
  bool holds = false;
  double max_violation = 0.0;  // max_t (Gamma_t - bound_t); <= tol when enveloped
  std::vector<double> bound;
};

/// Checks Gamma_t <= (1 - gamma)^t (Gamma_0 - err) + err for every t.
ContractionFit evaluate_gamma_contraction(const std::vector<double>& trace, double gamma, double err,
                                          double tol = 1e-12);

/// Largest value over the last `tail` entries of a trace.
double plateau_level(const std::vector<double>& trace, std::size_t tail);

struct AggregateTrace {
  std::vector<double> mean;
  std::vector<double> std_error;
  long n_seeds = 0;
};

/// Pointwise mean and standard error of the W1 series of several runs.
AggregateTrace aggregate_traces(const std::vector<RunTrace>& runs);

/// Sample mean and standard error (zero for fewer than two values).
std::pair<double, double> mean_and_stderr(const std::vector<double>& values);

/// CSV with columns t,w1,bl_err,degenerate.
void write_trace_csv(const std::string& path, const RunTrace& trace);
/// CSV with columns t,mean_w1,stderr_w1,n_seeds.
void write_aggregate_csv(const std::string& path, const AggregateTrace& agg);

/// Exact W1 between the empirical measures of two datasets (duplicates merged).
double empirical_w1(const Dataset& A, const Dataset& B);

}  // namespace pelab

#endif  // PELAB_EVOLUTION_HPP
