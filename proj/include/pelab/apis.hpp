#ifndef PELAB_APIS_HPP
#define PELAB_APIS_HPP

#include <Eigen/Core>

#include <optional>
#include <variant>
#include <vector>

#include "pelab/geometry.hpp"
#include "pelab/rng.hpp"

namespace pelab {

// Initial distributions for RANDOM_API. Samples falling outside the domain are
// rejected and redrawn.

/// Uniform over a ball; defaults to the domain itself when the domain is a ball.
struct UniformBall {
  std::optional<Point> center;
  std::optional<double> radius;
};

/// Uniform over a box; defaults to the domain's bounding box.
struct UniformBox {
  std::optional<Point> lo;
  std::optional<Point> hi;
};

struct PointMass {
  Point point;
};

/// Returns the dataset verbatim (its size overrides n_s).
struct CopyOf {
  Dataset data;
};

/// (1 - 2 beta) * data, projected into the domain (size overrides n_s).
struct Interpolate {
  double beta = 0.0;
  Dataset data;
};

using InitSpec = std::variant<UniformBall, UniformBox, PointMass, CopyOf, Interpolate>;

/// n_s points uniform in the given ball (no domain check).
Dataset sample_uniform_ball(const Point& center, double radius, Eigen::Index n, Rng& rng);

Dataset random_api(const Domain& domain, Eigen::Index n_s, const InitSpec& init, Rng& rng);

/// Contract of a (gamma, v, alpha) variation API: z is among its own variations,
/// at most v variations per point, and
///   E[min over variations of |z' - z2|] <= (1 - gamma) |z - z2| + alpha.
struct GammaVAlphaContract {
  double gamma = 0.0;
  int v = 0;
  double alpha = 0.0;
};

class VariationApi {
 public:
  virtual ~VariationApi() = default;

  virtual const Domain& domain() const = 0;
  virtual GammaVAlphaContract contract() const = 0;

  /// Variations of z; column 0 is z itself. Throws if z is outside the domain.
  virtual Dataset vary(const Point& z, Rng& rng) const = 0;

  /// Concatenation of vary(S.col(i)) in input order.
  Dataset vary_dataset(const Dataset& S, Rng& rng) const;
};

/// Multi-scale Gaussian variations: z plus Proj(z + N(0, sigma_l^2 I)) twice at
/// each level l = 1..L, with L = ceil(log2(diam / alpha)) and
///   sigma_l = alpha 2^(l-1) / (sqrt(pi) [(sqrt(d) + ln 2)^2 + ln 2]).
class GaussianVariationApi final : public VariationApi {
 public:
  GaussianVariationApi(Domain domain, double alpha);

  const Domain& domain() const override { return domain_; }
  GammaVAlphaContract contract() const override;
  Dataset vary(const Point& z, Rng& rng) const override;

  double alpha() const { return alpha_; }
  int levels() const { return static_cast<int>(sigmas_.size()); }
  const std::vector<double>& level_sigmas() const { return sigmas_; }

 private:
  Domain domain_;
  double alpha_;
  std::vector<double> sigmas_;
};

/// z plus `copies` projected perturbations at a single scale. Its declared
/// contract uses gamma_of_d(d) with alpha equal to the diameter, which every
/// API containing z satisfies trivially unless overridden.
class SingleScaleGaussianApi final : public VariationApi {
 public:
  SingleScaleGaussianApi(Domain domain, double sigma, int copies,
                         std::optional<GammaVAlphaContract> declared = std::nullopt);

  const Domain& domain() const override { return domain_; }
  GammaVAlphaContract contract() const override { return contract_; }
  Dataset vary(const Point& z, Rng& rng) const override;

 private:
  Domain domain_;
  double sigma_;
  int copies_;
  GammaVAlphaContract contract_;
};

struct ContractionEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  long trials = 0;
};

/// Monte Carlo estimate of E[min over vary(z1) of |z - z2|]. Requires trials >= 100.
ContractionEstimate contraction_estimate(const VariationApi& api, const Point& z1, const Point& z2, long trials,
                                         Rng& rng);

/// Right-hand side (1 - gamma) |z1 - z2| + alpha of the contract.
double contraction_bound(const GammaVAlphaContract& c, const Point& z1, const Point& z2);

}  // namespace pelab

#endif  // PELAB_APIS_HPP
