#include "pelab/transport.hpp"

#include <cmath>
#include <stdexcept>

#include "pelab/network_simplex.hpp"

namespace pelab {

namespace {

void require_probability(const DiscreteMeasure& m, const char* what) {
  if (!m.is_probability()) {
    throw std::invalid_argument(std::string("w1_exact: ") + what + " is not a probability measure");
  }
}

}  // namespace

W1Result w1_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require_probability(mu, "first argument");
  require_probability(nu, "second argument");
  if (mu.dim() != nu.dim()) throw std::invalid_argument("w1_exact: dimension mismatch");

  const Eigen::Index m = mu.size();
  const Eigen::Index k = nu.size();
  const Eigen::MatrixXd cost = pairwise_distances(mu.support, nu.support);

  // Both sides are normalized to the same total so the network balances exactly.
  const double mu_total = mu.weights.sum();
  const double nu_total = nu.weights.sum();
  NetworkSimplex net(m + k);
  net.reserve_arcs(m * k);
  for (Eigen::Index i = 0; i < m; ++i) net.set_supply(i, std::max(mu.weights[i], 0.0) / mu_total);
  for (Eigen::Index j = 0; j < k; ++j) net.set_supply(m + j, -std::max(nu.weights[j], 0.0) / nu_total);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) net.add_arc(i, m + j, cost(i, j));
  }
  net.solve();

  W1Result out;
  out.plan.flow.resize(m, k);
  Eigen::Index arc = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) out.plan.flow(i, j) = net.flow(arc++);
  }
  out.plan.cost = net.total_cost();
  out.value = out.plan.cost;
  out.certificate = net.certificate();
  return out;
}

double w1_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  return w1_exact(mu, nu).value;
}

DiscreteMeasure signed_difference(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim()) throw std::invalid_argument("signed_difference: dimension mismatch");
  Dataset support(mu.dim(), mu.size() + nu.size());
  support << mu.support, nu.support;
  Eigen::VectorXd w(mu.size() + nu.size());
  w << mu.weights, -nu.weights;
  return DiscreteMeasure(std::move(support), std::move(w));
}

namespace {

// Network for the BL norm: one node per atom plus a ground node G. Arcs i->j
// carry the transport part, i->G and G->i the residual mass at cost D each.
struct BlNetwork {
  NetworkSimplex net;
  Eigen::Index atoms;
  Eigen::Index ground;
  Eigen::Index first_residual_arc;

  BlNetwork(const Dataset& support, double bound_D, Eigen::Index extra_nodes)
      : net(support.cols() + 1 + extra_nodes), atoms(support.cols()), ground(support.cols()) {
    const Eigen::MatrixXd rho = pairwise_distances(support, support);
    net.reserve_arcs(atoms * (atoms + 2) + extra_nodes * atoms);
    for (Eigen::Index i = 0; i < atoms; ++i) {
      for (Eigen::Index j = 0; j < atoms; ++j) {
        if (i != j) net.add_arc(i, j, rho(i, j));
      }
    }
    first_residual_arc = net.arc_count();
    for (Eigen::Index i = 0; i < atoms; ++i) {
      net.add_arc(i, ground, bound_D);
      net.add_arc(ground, i, bound_D);
    }
  }

  BlDecomposition decomposition() const {
    BlDecomposition d;
    d.flow = Eigen::MatrixXd::Zero(atoms, atoms);
    d.residual_plus.resize(atoms);
    d.residual_minus.resize(atoms);
    Eigen::Index arc = 0;
    for (Eigen::Index i = 0; i < atoms; ++i) {
      for (Eigen::Index j = 0; j < atoms; ++j) {
        if (i != j) d.flow(i, j) = net.flow(arc++);
      }
    }
    for (Eigen::Index i = 0; i < atoms; ++i) {
      d.residual_plus[i] = net.flow(first_residual_arc + 2 * i);
      d.residual_minus[i] = net.flow(first_residual_arc + 2 * i + 1);
    }
    return d;
  }

  Eigen::VectorXd witness() const {
    Eigen::VectorXd f(atoms);
    for (Eigen::Index i = 0; i < atoms; ++i) f[i] = net.potential(i) - net.potential(ground);
    return f;
  }
};

void check_bound(double bound_D) {
  if (!(bound_D > 0) || !std::isfinite(bound_D)) {
    throw std::invalid_argument("bounded-Lipschitz bound D must be positive and finite");
  }
}

}  // namespace

BlResult bl_norm(const DiscreteMeasure& sigma, double bound_D) {
  check_bound(bound_D);
  BlResult out;
  if (sigma.size() == 0) {
    out.witness.resize(0);
    return out;
  }
  BlNetwork bl(sigma.support, bound_D, 0);
  for (Eigen::Index i = 0; i < bl.atoms; ++i) bl.net.set_supply(i, sigma.weights[i]);
  bl.net.set_supply(bl.ground, -sigma.weights.sum());
  bl.net.solve();
  out.value = bl.net.total_cost();
  out.decomposition = bl.decomposition();
  out.witness = bl.witness();
  out.certificate = bl.net.certificate();
  return out;
}

BlProjection bl_project_simplex(const DiscreteMeasure& mu_tilde, double bound_D) {
  check_bound(bound_D);
  if (mu_tilde.size() == 0) throw std::invalid_argument("bl_project_simplex: empty support");
  if (mu_tilde.weights.minCoeff() >= 0 && std::abs(mu_tilde.weights.sum() - 1.0) <= 1e-12) {
    // Already feasible; return it rather than another optimum on duplicated atoms.
    return BlProjection{mu_tilde, 0.0, {}};
  }
  // Extra sink node P absorbs the projected probability vector through zero-cost
  // arcs i->P; P has demand 1 and G balances the remaining signed mass.
  BlNetwork bl(mu_tilde.support, bound_D, 1);
  const Eigen::Index sink = bl.ground + 1;
  const Eigen::Index first_mass_arc = bl.net.arc_count();
  for (Eigen::Index i = 0; i < bl.atoms; ++i) bl.net.add_arc(i, sink, 0.0);
  for (Eigen::Index i = 0; i < bl.atoms; ++i) bl.net.set_supply(i, mu_tilde.weights[i]);
  bl.net.set_supply(sink, -1.0);
  bl.net.set_supply(bl.ground, 1.0 - mu_tilde.weights.sum());
  bl.net.solve();

  Eigen::VectorXd w(bl.atoms);
  for (Eigen::Index i = 0; i < bl.atoms; ++i) w[i] = bl.net.flow(first_mass_arc + i);
  w /= w.sum();
  BlProjection out{DiscreteMeasure(mu_tilde.support, std::move(w)), bl.net.total_cost(),
                   bl.net.certificate()};
  return out;
}

double w1_objective_for_simplex_weights(const Dataset& S, const Dataset& V,
                                        const Eigen::VectorXd& weights) {
  if (weights.size() != V.cols()) {
    throw std::invalid_argument("w1_objective_for_simplex_weights: weights/V length mismatch");
  }
  return w1_distance(empirical(S), DiscreteMeasure(V, weights));
}

SimplexW1Minimum w1_min_over_simplex(const Dataset& S, const Dataset& V) {
  if (S.cols() == 0 || V.cols() == 0) throw std::invalid_argument("w1_min_over_simplex: empty input");
  if (S.rows() != V.rows()) throw std::invalid_argument("w1_min_over_simplex: dimension mismatch");
  const Eigen::Index n = S.cols();
  const Eigen::Index m = V.cols();
  const Eigen::MatrixXd rho = pairwise_distances(S, V);

  // Variables: coupling pi(i,j) (row-major, n*m entries) followed by mu(j).
  const Eigen::Index vars = n * m + m;
  LpProblem lp;
  lp.A = Eigen::MatrixXd::Zero(n + m + 1, vars);
  lp.b = Eigen::VectorXd::Zero(n + m + 1);
  lp.c = Eigen::VectorXd::Zero(vars);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      const Eigen::Index x = i * m + j;
      lp.c[x] = rho(i, j);
      lp.A(i, x) = 1.0;      // row sums: 1/n
      lp.A(n + j, x) = 1.0;  // column sums: mu(j)
    }
    lp.b[i] = 1.0 / static_cast<double>(n);
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    lp.A(n + j, n * m + j) = -1.0;
    lp.A(n + m, n * m + j) = 1.0;
  }
  lp.b[n + m] = 1.0;

  const LpSolution sol = solve_lp(lp);
  return SimplexW1Minimum{sol.x.tail(m), sol.objective, sol.certificate};
}

}  // namespace pelab
