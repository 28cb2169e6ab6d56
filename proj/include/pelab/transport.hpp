#ifndef PELAB_TRANSPORT_HPP
#define PELAB_TRANSPORT_HPP

#include <Eigen/Dense>

#include "pelab/lp.hpp"
#include "pelab/measures.hpp"

namespace pelab {

/// Coupling between two discrete probability measures.
struct TransportPlan {
  Eigen::MatrixXd flow;  // rows: source atoms, cols: target atoms
  double cost = 0.0;
};

struct W1Result {
  double value = 0.0;
  TransportPlan plan;
  LpCertificate certificate;
};

/// Exact 1-Wasserstein distance (Euclidean ground cost) between two discrete
/// probability measures, with its optimal coupling.
W1Result w1_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Convenience: value of w1_exact only.
double w1_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Primal witness of the bounded-Lipschitz norm of a signed measure sigma:
///   sigma_i = sum_j (flow(i,j) - flow(j,i)) + residual_plus[i] - residual_minus[i].
/// Its cost is sum flow(i,j) rho_ij + D * sum(residual_plus + residual_minus).
struct BlDecomposition {
  Eigen::MatrixXd flow;
  Eigen::VectorXd residual_plus;
  Eigen::VectorXd residual_minus;
};

struct BlResult {
  double value = 0.0;
  BlDecomposition decomposition;
  Eigen::VectorXd witness;  // optimal test function f on the support
  LpCertificate certificate;
};

/// ||sigma||_BL = max sum_i f_i sigma_i over |f_i| <= D and |f_i - f_j| <= rho_ij.
/// `bound_D` is the sup-norm bound on test functions (usually the domain diameter).
BlResult bl_norm(const DiscreteMeasure& sigma, double bound_D);

/// Signed measure mu - nu on the concatenated supports of mu and nu.
DiscreteMeasure signed_difference(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct BlProjection {
  DiscreteMeasure measure;  // probability measure on the input support
  double objective = 0.0;   // bl(mu_tilde, measure)
  LpCertificate certificate;
};

/// argmin over probability vectors mu on the support of mu_tilde of bl(mu_tilde, mu).
BlProjection bl_project_simplex(const DiscreteMeasure& mu_tilde, double bound_D);

/// W1(mu_S, sum_i weights[i] delta_{V[i]}).
double w1_objective_for_simplex_weights(const Dataset& S, const Dataset& V,
                                        const Eigen::VectorXd& weights);

struct SimplexW1Minimum {
  Eigen::VectorXd weights;
  double value = 0.0;
  LpCertificate certificate;
};

/// min over mu in the simplex of W1(mu_S, sum_i mu[i] delta_{V[i]}), solved as one
/// dense LP with the coupling and mu as variables.
SimplexW1Minimum w1_min_over_simplex(const Dataset& S, const Dataset& V);

}  // namespace pelab

#endif  // PELAB_TRANSPORT_HPP
