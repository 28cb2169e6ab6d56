#ifndef PELAB_HYPERPARAMS_HPP
#define PELAB_HYPERPARAMS_HPP

#include <string>
#include <vector>
#include <utility>

namespace pelab {

/// 1 / (8 pi [(sqrt(d) + ln 2)^2 + ln 2]).
double gamma_of_d(int d);

/// (sqrt(d) + ln 2)^2 + ln 2, the Gaussian-maximum constant shared by gamma and sigma_l.
double gaussian_max_constant(int d);

/// Number of variation scales ceil(log2(D / alpha)), at least 1.
int variation_levels(double D, double alpha);

/// Scale-dependent parameters implied by a noise level sigma:
///   alpha = D sigma^(1/p), L = ceil(log2(D/alpha)), n_s = ceil(sigma^-1 (2L+1)^(1/p - 1)),
/// with p = max(d, 2).
struct ScaleParams {
  double alpha = 0.0;
  int levels = 0;
  int variations = 0;  // 2L + 1
  double n_s_raw = 0.0;
  long n_s = 0;
};

ScaleParams scale_params_from_sigma(double sigma, int d, double D);

struct TheoremParams {
  // Inputs.
  long n = 0;
  double eps = 0.0;
  double delta = 0.0;
  int d = 0;
  double D = 0.0;
  // Formula chain, in evaluation order.
  double gamma = 0.0;
  double t_raw = 0.0;      // real value of the closed form before rounding
  long T = 0;              // ceil(t_raw), raised to 1 when nonpositive
  bool t_clamped = false;
  double sigma = 0.0;      // 4 sqrt(T ln(1.25/delta)) / (n eps)
  bool sigma_in_unit_interval = false;
  double alpha = 0.0;
  int levels = 0;
  int variations = 0;
  double n_s_raw = 0.0;
  long n_s = 0;

  /// Ordered key/value pairs for printing.
  std::vector<std::pair<std::string, std::string>> fields() const;
};

/// Parameter chain of the convergence theorem for inputs (n, eps, delta, d, D).
/// Throws std::domain_error when sigma >= 1; the message gives the minimum n*eps.
TheoremParams theorem2_params(long n, double eps, double delta, int d, double D);

/// Same chain without the sigma < 1 check.
TheoremParams theorem2_params_unchecked(long n, double eps, double delta, int d, double D);

/// Smallest n*eps (to 1e-9 relative) for which the chain yields sigma < 1.
double minimum_n_eps(double delta, int d);

/// ceil(2 ln(n eps)). Throws if n eps <= 1.
long t_heuristic(long n, double eps);

/// Gaussian complexity bound of the bounded-Lipschitz class on n points of a
/// diameter-D subset of R^d.
double gaussian_complexity_bound(long n, double D, int d);

}  // namespace pelab

#endif  // PELAB_HYPERPARAMS_HPP
