#include "pelab/privacy.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace pelab {

void PrivacyParams::validate() const {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) throw std::invalid_argument("epsilon must be positive");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0, 1)");
}

Eigen::VectorXd gaussian_perturb(const Eigen::VectorXd& hist, double sigma, Rng& rng) {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw std::invalid_argument("gaussian_perturb: sigma must be positive");
  std::normal_distribution<double> noise(0.0, sigma);
  Eigen::VectorXd out = hist;
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += noise(rng);
  return out;
}

double sigma_for_composition(long T, long n, double eps, double delta) {
  if (T < 1 || n < 1) throw std::invalid_argument("sigma_for_composition: T and n must be positive");
  PrivacyParams{eps, delta}.validate();
  return 4.0 * std::sqrt(static_cast<double>(T) * std::log(1.25 / delta)) / (static_cast<double>(n) * eps);
}

double nn_histogram_sensitivity(long n) {
  if (n < 1) throw std::invalid_argument("nn_histogram_sensitivity: n must be positive");
  return std::sqrt(2.0) / static_cast<double>(n);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double analytic_gaussian_delta(double sigma, double eps, double sensitivity) {
  const double a = sensitivity / (2.0 * sigma);
  const double b = eps * sigma / sensitivity;
  // e^eps Phi(x) evaluated in log space so large eps does not overflow.
  const double tail = normal_cdf(-a - b);
  const double second = tail > 0 ? std::exp(eps + std::log(tail)) : 0.0;
  return normal_cdf(a - b) - second;
}

AnalyticCalibration calibrate_analytic_gaussian(double eps, double delta, double sensitivity, long T) {
  PrivacyParams{eps, delta}.validate();
  if (!(sensitivity > 0)) throw std::invalid_argument("calibrate_analytic_gaussian: sensitivity must be positive");
  if (T < 1) throw std::invalid_argument("calibrate_analytic_gaussian: T must be positive");

  AnalyticCalibration cal;
  cal.T = T;
  cal.step_sensitivity = sensitivity;
  cal.effective_sensitivity = std::sqrt(static_cast<double>(T)) * sensitivity;
  const double S = cal.effective_sensitivity;

  // delta(sigma) is decreasing in sigma.
  double lo = S * 1e-6, hi = S;
  int guard = 0;
  while (analytic_gaussian_delta(hi, eps, S) > delta) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200) throw std::runtime_error("calibrate_analytic_gaussian: cannot bracket sigma");
  }
  while (analytic_gaussian_delta(lo, eps, S) <= delta) {
    hi = lo;
    lo *= 0.5;
    if (++guard > 400) throw std::runtime_error("calibrate_analytic_gaussian: cannot bracket sigma");
  }
  int steps = 0;
  while (hi - lo > 1e-15 * hi && steps < 200) {
    const double mid = 0.5 * (lo + hi);
    if (analytic_gaussian_delta(mid, eps, S) > delta) {
      lo = mid;
    } else {
      hi = mid;
    }
    ++steps;
  }
  cal.sigma = hi;
  cal.step_mu = sensitivity / hi;
  cal.total_mu = S / hi;
  cal.achieved_delta = analytic_gaussian_delta(hi, eps, S);
  cal.bisection_steps = steps;
  return cal;
}

double sigma_analytic_gaussian(double eps, double delta, double sensitivity, long T) {
  return calibrate_analytic_gaussian(eps, delta, sensitivity, T).sigma;
}

double laplace_scale(long n, double eps) {
  if (n < 1 || !(eps > 0)) throw std::invalid_argument("laplace_scale: n and eps must be positive");
  return 2.0 / (static_cast<double>(n) * eps);
}

double laplace_threshold(long n, double eps, double delta) {
  PrivacyParams{eps, delta}.validate();
  if (n < 1) throw std::invalid_argument("laplace_threshold: n must be positive");
  const double nd = static_cast<double>(n);
  return 2.0 * std::log(1.0 / delta) / (nd * eps) + 1.0 / nd;
}

namespace {

NoisyHistogram renormalize_survivors(Eigen::VectorXd w, HistogramMechanism mechanism) {
  NoisyHistogram out;
  out.mechanism = mechanism;
  const double mass = w.sum();
  if (mass > 0) {
    out.weights = w / mass;
  } else {
    out.weights = Eigen::VectorXd::Zero(w.size());
    out.degenerate = true;
  }
  return out;
}

}  // namespace

NoisyHistogram laplace_threshold_histogram(const Eigen::VectorXd& hist, long n, double eps, double delta,
                                           Rng& rng) {
  const double H = laplace_threshold(n, eps, delta);
  // Laplace(b) as the difference of two Exp(1/b) draws.
  std::exponential_distribution<double> expo(1.0 / laplace_scale(n, eps));
  Eigen::VectorXd w = Eigen::VectorXd::Zero(hist.size());
  for (Eigen::Index i = 0; i < hist.size(); ++i) {
    if (!(hist[i] > 0)) continue;
    const double noisy = hist[i] + expo(rng) - expo(rng);
    if (noisy >= H) w[i] = noisy;
  }
  return renormalize_survivors(std::move(w), HistogramMechanism::LaplaceThreshold);
}

NoisyHistogram gaussian_threshold_renormalize(const Eigen::VectorXd& noisy, double H) {
  if (!(H >= 0)) throw std::invalid_argument("gaussian_threshold_renormalize: H must be nonnegative");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(noisy.size());
  for (Eigen::Index i = 0; i < noisy.size(); ++i) {
    if (noisy[i] >= H && noisy[i] > 0) w[i] = noisy[i];
  }
  return renormalize_survivors(std::move(w), HistogramMechanism::GaussianAll);
}

}  // namespace pelab
