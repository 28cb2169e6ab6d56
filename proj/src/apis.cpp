#include "pelab/apis.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "pelab/hyperparams.hpp"

namespace pelab {

namespace {

constexpr long kMaxRejections = 1000000;

void fill_gaussian(Eigen::Ref<Eigen::VectorXd> v, double sigma, Rng& rng) {
  std::normal_distribution<double> g(0.0, sigma);
  for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = g(rng);
}

Point uniform_in_ball(const Point& center, double radius, Rng& rng) {
  const auto d = center.size();
  Point dir(d);
  double norm = 0;
  do {
    fill_gaussian(dir, 1.0, rng);
    norm = dir.norm();
  } while (norm == 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = radius * std::pow(u(rng), 1.0 / static_cast<double>(d));
  return center + (r / norm) * dir;
}

Point uniform_in_box(const Point& lo, const Point& hi, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point p(lo.size());
  for (Eigen::Index k = 0; k < lo.size(); ++k) p[k] = lo[k] + (hi[k] - lo[k]) * u(rng);
  return p;
}

template <class Draw>
Dataset rejection_sample(const Domain& domain, Eigen::Index n, Draw draw) {
  Dataset out(domain.dim(), n);
  long rejections = 0;
  for (Eigen::Index i = 0; i < n;) {
    Point p = draw();
    if (domain.contains(p)) {
      out.col(i++) = p;
    } else if (++rejections > kMaxRejections) {
      throw std::runtime_error("random_api: initial distribution barely meets the domain");
    }
  }
  return out;
}

void require_inside(const Domain& domain, const Dataset& S, const char* what) {
  if (S.rows() != domain.dim()) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  if (!contains_all(domain, S)) throw std::invalid_argument(std::string(what) + ": point outside the domain");
}

}  // namespace

Dataset sample_uniform_ball(const Point& center, double radius, Eigen::Index n, Rng& rng) {
  Dataset out(center.size(), n);
  for (Eigen::Index i = 0; i < n; ++i) out.col(i) = uniform_in_ball(center, radius, rng);
  return out;
}

Dataset random_api(const Domain& domain, Eigen::Index n_s, const InitSpec& init, Rng& rng) {
  if (n_s < 1) throw std::invalid_argument("random_api: n_s must be positive");
  return std::visit(
      [&](const auto& spec) -> Dataset {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, UniformBall>) {
          Point center;
          double radius;
          if (spec.center && spec.radius) {
            center = *spec.center;
            radius = *spec.radius;
          } else if (domain.is_ball()) {
            center = spec.center.value_or(domain.as_ball().center);
            radius = spec.radius.value_or(domain.as_ball().radius);
          } else {
            throw std::invalid_argument("random_api: UniformBall needs center and radius on a box domain");
          }
          domain.check_dim(center.size());
          return rejection_sample(domain, n_s, [&] { return uniform_in_ball(center, radius, rng); });
        } else if constexpr (std::is_same_v<T, UniformBox>) {
          const auto bb = domain.bounding_box();
          const Point lo = spec.lo.value_or(bb.lo), hi = spec.hi.value_or(bb.hi);
          domain.check_dim(lo.size());
          domain.check_dim(hi.size());
          return rejection_sample(domain, n_s, [&] { return uniform_in_box(lo, hi, rng); });
        } else if constexpr (std::is_same_v<T, PointMass>) {
          require_inside(domain, Dataset(spec.point), "random_api(PointMass)");
          return spec.point.replicate(1, n_s);
        } else if constexpr (std::is_same_v<T, CopyOf>) {
          require_inside(domain, spec.data, "random_api(CopyOf)");
          return spec.data;
        } else {
          if (spec.data.rows() != domain.dim()) throw std::invalid_argument("random_api(Interpolate): dimension mismatch");
          return project_all(domain, Dataset((1.0 - 2.0 * spec.beta) * spec.data));
        }
      },
      init);
}

Dataset VariationApi::vary_dataset(const Dataset& S, Rng& rng) const {
  if (S.cols() == 0) return Dataset(domain().dim(), 0);
  std::vector<Dataset> parts;
  parts.reserve(static_cast<std::size_t>(S.cols()));
  Eigen::Index total = 0;
  for (Eigen::Index i = 0; i < S.cols(); ++i) {
    parts.push_back(vary(S.col(i), rng));
    total += parts.back().cols();
  }
  Dataset out(S.rows(), total);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.middleCols(at, p.cols()) = p;
    at += p.cols();
  }
  return out;
}

GaussianVariationApi::GaussianVariationApi(Domain domain, double alpha) : domain_(std::move(domain)), alpha_(alpha) {
  if (!(alpha > 0) || !std::isfinite(alpha)) throw std::invalid_argument("GaussianVariationApi: alpha must be positive");
  const int L = variation_levels(domain_.diameter(), alpha);
  const double denom = std::sqrt(std::numbers::pi) * gaussian_max_constant(domain_.dim());
  sigmas_.reserve(static_cast<std::size_t>(L));
  for (int l = 1; l <= L; ++l) sigmas_.push_back(alpha * std::ldexp(1.0, l - 1) / denom);
}

GammaVAlphaContract GaussianVariationApi::contract() const {
  return {gamma_of_d(domain_.dim()), 2 * levels() + 1, alpha_};
}

Dataset GaussianVariationApi::vary(const Point& z, Rng& rng) const {
  domain_.check_dim(z.size());
  if (!domain_.contains(z)) throw std::invalid_argument("variation_api: point outside the domain");
  const Eigen::Index d = z.size();
  Dataset out(d, 2 * levels() + 1);
  out.col(0) = z;
  Point noise(d);
  Eigen::Index c = 1;
  for (double sigma : sigmas_) {
    for (int k = 0; k < 2; ++k) {
      fill_gaussian(noise, sigma, rng);
      out.col(c++) = domain_.project(z + noise);
    }
  }
  return out;
}

SingleScaleGaussianApi::SingleScaleGaussianApi(Domain domain, double sigma, int copies,
                                               std::optional<GammaVAlphaContract> declared)
    : domain_(std::move(domain)), sigma_(sigma), copies_(copies) {
  if (!(sigma > 0)) throw std::invalid_argument("SingleScaleGaussianApi: sigma must be positive");
  if (copies < 0) throw std::invalid_argument("SingleScaleGaussianApi: copies must be nonnegative");
  contract_ = declared.value_or(GammaVAlphaContract{gamma_of_d(domain_.dim()), copies + 1, domain_.diameter()});
}

Dataset SingleScaleGaussianApi::vary(const Point& z, Rng& rng) const {
  domain_.check_dim(z.size());
  if (!domain_.contains(z)) throw std::invalid_argument("variation_api: point outside the domain");
  Dataset out(z.size(), copies_ + 1);
  out.col(0) = z;
  Point noise(z.size());
  for (int k = 1; k <= copies_; ++k) {
    fill_gaussian(noise, sigma_, rng);
    out.col(k) = domain_.project(z + noise);
  }
  return out;
}

ContractionEstimate contraction_estimate(const VariationApi& api, const Point& z1, const Point& z2, long trials,
                                         Rng& rng) {
  if (trials < 100) throw std::invalid_argument("contraction_estimate: need at least 100 trials");
  double sum = 0, sum_sq = 0;
  for (long t = 0; t < trials; ++t) {
    const Dataset V = api.vary(z1, rng);
    const double m = (V.colwise() - z2).colwise().norm().minCoeff();
    sum += m;
    sum_sq += m * m;
  }
  const double nt = static_cast<double>(trials);
  ContractionEstimate est;
  est.trials = trials;
  est.mean = sum / nt;
  const double var = std::max(0.0, (sum_sq - nt * est.mean * est.mean) / (nt - 1));
  est.std_error = std::sqrt(var / nt);
  return est;
}

double contraction_bound(const GammaVAlphaContract& c, const Point& z1, const Point& z2) {
  return (1.0 - c.gamma) * distance(z1, z2) + c.alpha;
}

}  // namespace pelab
