#ifndef PELAB_PRIVACY_HPP
#define PELAB_PRIVACY_HPP

#include <Eigen/Core>

#include "pelab/rng.hpp"

namespace pelab {

/// (epsilon, delta) budget. epsilon > 0, 0 < delta < 1.
struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 1e-4;

  void validate() const;
};

/// hist + N(0, sigma^2 I).
Eigen::VectorXd gaussian_perturb(const Eigen::VectorXd& hist, double sigma, Rng& rng);

/// 4 sqrt(T ln(1.25/delta)) / (n eps): enough noise for T adaptive Gaussian
/// mechanisms on nearest-neighbor histograms.
double sigma_for_composition(long T, long n, double eps, double delta);

/// l2 sensitivity of a nearest-neighbor histogram over n points: sqrt(2)/n.
double nn_histogram_sensitivity(long n);

/// Standard normal CDF.
double normal_cdf(double x);

/// Smallest delta for which N(0, sigma^2) noise on a query with the given l2
/// sensitivity is (eps, delta)-DP:
///   Phi(S/2s - e s/S) - e^eps Phi(-S/2s - e s/S).
double analytic_gaussian_delta(double sigma, double eps, double sensitivity);

/// Analytic Gaussian calibration for T adaptive releases.
///
/// T Gaussian mechanisms with sensitivity S and noise sigma compose exactly to
/// one Gaussian mechanism with sensitivity sqrt(T) S, so sigma is the smallest
/// value meeting the analytic condition at that effective sensitivity.
struct AnalyticCalibration {
  double sigma = 0.0;
  long T = 1;
  double step_sensitivity = 0.0;
  double effective_sensitivity = 0.0;  // sqrt(T) * step_sensitivity
  double step_mu = 0.0;                // step_sensitivity / sigma
  double total_mu = 0.0;               // sqrt(T) * step_mu
  double achieved_delta = 0.0;
  int bisection_steps = 0;
};

/// Throws std::runtime_error if the bisection cannot bracket the solution.
AnalyticCalibration calibrate_analytic_gaussian(double eps, double delta, double sensitivity, long T);

double sigma_analytic_gaussian(double eps, double delta, double sensitivity, long T);

enum class HistogramMechanism { GaussianAll, LaplaceThreshold };

struct NoisyHistogram {
  Eigen::VectorXd weights;
  HistogramMechanism mechanism = HistogramMechanism::GaussianAll;
  bool degenerate = false;  // nothing survived the threshold; weights all zero
};

/// Laplace noise scale 2/(n eps).
double laplace_scale(long n, double eps);

/// Threshold H = 2 ln(1/delta)/(n eps) + 1/n.
double laplace_threshold(long n, double eps, double delta);

/// Adds Laplace(2/(n eps)) noise to the positive entries of hist, zeroes entries
/// that were zero or fall below the threshold, and renormalizes survivors.
NoisyHistogram laplace_threshold_histogram(const Eigen::VectorXd& hist, long n, double eps, double delta,
                                           Rng& rng);

/// Zeroes entries below H and renormalizes. All-zero output is flagged degenerate.
NoisyHistogram gaussian_threshold_renormalize(const Eigen::VectorXd& noisy, double H);

}  // namespace pelab

#endif  // PELAB_PRIVACY_HPP
