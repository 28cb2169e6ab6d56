#include "pelab/hyperparams.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "pelab/privacy.hpp"

namespace pelab {

namespace {

int exponent_base(int d) { return std::max(d, 2); }

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

double gaussian_max_constant(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  const double s = std::sqrt(static_cast<double>(d)) + std::numbers::ln2;
  return s * s + std::numbers::ln2;
}

double gamma_of_d(int d) { return 1.0 / (8.0 * std::numbers::pi * gaussian_max_constant(d)); }

int variation_levels(double D, double alpha) {
  if (!(D > 0) || !(alpha > 0)) throw std::invalid_argument("variation_levels: D and alpha must be positive");
  return std::max(1, static_cast<int>(std::ceil(std::log2(D / alpha))));
}

ScaleParams scale_params_from_sigma(double sigma, int d, double D) {
  if (!(sigma > 0) || !(D > 0)) throw std::invalid_argument("scale_params_from_sigma: sigma and D must be positive");
  const double p = exponent_base(d);
  ScaleParams s;
  s.alpha = D * std::pow(sigma, 1.0 / p);
  s.levels = variation_levels(D, s.alpha);
  s.variations = 2 * s.levels + 1;
  s.n_s_raw = std::pow(static_cast<double>(s.variations), 1.0 / p - 1.0) / sigma;
  s.n_s = std::max(1L, static_cast<long>(std::ceil(s.n_s_raw)));
  return s;
}

TheoremParams theorem2_params_unchecked(long n, double eps, double delta, int d, double D) {
  if (n < 1) throw std::invalid_argument("theorem2_params: n must be positive");
  PrivacyParams{eps, delta}.validate();
  if (!(D > 0)) throw std::invalid_argument("theorem2_params: D must be positive");

  TheoremParams tp;
  tp.n = n;
  tp.eps = eps;
  tp.delta = delta;
  tp.d = d;
  tp.D = D;
  tp.gamma = gamma_of_d(d);
  const double p = exponent_base(d);
  const double n_eps = static_cast<double>(n) * eps;
  tp.t_raw = std::log(tp.gamma * std::pow(n_eps, 1.0 / p) / std::pow(4.0 * std::sqrt(std::log(1.0 / delta)), 1.0 / p)) /
             tp.gamma;
  const double t_ceil = std::ceil(tp.t_raw);
  tp.t_clamped = t_ceil < 1.0;
  tp.T = tp.t_clamped ? 1 : static_cast<long>(t_ceil);
  tp.sigma = sigma_for_composition(tp.T, n, eps, delta);
  tp.sigma_in_unit_interval = tp.sigma > 0 && tp.sigma < 1;
  const ScaleParams s = scale_params_from_sigma(tp.sigma, d, D);
  tp.alpha = s.alpha;
  tp.levels = s.levels;
  tp.variations = s.variations;
  tp.n_s_raw = s.n_s_raw;
  tp.n_s = s.n_s;
  return tp;
}

double minimum_n_eps(double delta, int d) {
  const auto sigma_at = [&](double x) { return theorem2_params_unchecked(1, x, delta, d, 1.0).sigma; };
  double lo = 1e-9, hi = 1.0;
  while (sigma_at(hi) >= 1.0) {
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    (sigma_at(mid) >= 1.0 ? lo : hi) = mid;
  }
  return hi;
}

TheoremParams theorem2_params(long n, double eps, double delta, int d, double D) {
  TheoremParams tp = theorem2_params_unchecked(n, eps, delta, d, D);
  if (!tp.sigma_in_unit_interval) {
    throw std::domain_error("theorem2_params: sigma = " + fmt(tp.sigma) +
                            " is not in (0, 1); n*eps must exceed " + fmt(minimum_n_eps(delta, d)));
  }
  return tp;
}

std::vector<std::pair<std::string, std::string>> TheoremParams::fields() const {
  return {
      {"n", std::to_string(n)},
      {"eps", fmt(eps)},
      {"delta", fmt(delta)},
      {"d", std::to_string(d)},
      {"D", fmt(D)},
      {"gamma", fmt(gamma)},
      {"t_raw", fmt(t_raw)},
      {"T", std::to_string(T)},
      {"t_clamped", t_clamped ? "true" : "false"},
      {"sigma", fmt(sigma)},
      {"sigma_in_unit_interval", sigma_in_unit_interval ? "true" : "false"},
      {"alpha", fmt(alpha)},
      {"levels", std::to_string(levels)},
      {"variations", std::to_string(variations)},
      {"n_s_raw", fmt(n_s_raw)},
      {"n_s", std::to_string(n_s)},
  };
}

long t_heuristic(long n, double eps) {
  const double x = static_cast<double>(n) * eps;
  if (!(x > 1.0)) throw std::invalid_argument("t_heuristic: n*eps must exceed 1");
  return static_cast<long>(std::ceil(2.0 * std::log(x)));
}

double gaussian_complexity_bound(long n, double D, int d) {
  if (n < 1) throw std::invalid_argument("gaussian_complexity_bound: n must be positive");
  if (d < 1) throw std::invalid_argument("gaussian_complexity_bound: d must be positive");
  const double nd = static_cast<double>(n);
  const double root_n = std::sqrt(nd);
  if (d == 1) return 9.0 * std::sqrt(std::log(2.0 * root_n)) * D / root_n;
  if (d == 2) return 10.0 * D * std::pow(std::log(2.0 * root_n), 1.5) / root_n;
  const double dd = static_cast<double>(d);
  const double scale = std::pow(nd, 1.0 / dd) * std::pow(dd / 2.0 - 1.0, 2.0 / dd);
  return 10.0 * D * std::sqrt(std::log(2.0 * scale)) / scale;
}

}  // namespace pelab
