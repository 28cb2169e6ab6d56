#ifndef PELAB_NETWORK_SIMPLEX_HPP
#define PELAB_NETWORK_SIMPLEX_HPP

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "pelab/lp.hpp"

namespace pelab {

/// Uncapacitated min-cost flow by the primal network simplex method.
///
///   min sum_a cost[a] * flow[a]
///   s.t. (outflow - inflow)(v) = supply[v] for every node v, flow >= 0.
///
/// Supplies must sum to zero (up to round-off). The spanning-tree basis is kept
/// strongly feasible (Cunningham's leaving-arc rule), which rules out cycling.
/// After solve(), potentials satisfy pi[u] - pi[v] <= cost[a] for every arc
/// a = (u, v), with equality on positive-flow arcs.
class NetworkSimplex {
 public:
  using Index = Eigen::Index;

  explicit NetworkSimplex(Index node_count);

  Index add_arc(Index from, Index to, double cost);
  void set_supply(Index node, double supply);
  void reserve_arcs(Index count);

  /// Throws SolverError if the problem is infeasible or unbounded.
  void solve();

  Index node_count() const { return n_; }
  Index arc_count() const { return m_; }
  double flow(Index arc) const { return flow_[static_cast<std::size_t>(arc)]; }
  double potential(Index node) const { return pi_[static_cast<std::size_t>(node)]; }
  double cost(Index arc) const { return cost_[static_cast<std::size_t>(arc)]; }
  double total_cost() const;
  const LpCertificate& certificate() const { return certificate_; }

 private:
  void init_tree();
  Index select_entering();
  void pivot(Index entering);
  void attach(Index child, Index parent);
  void detach(Index child);
  void refresh_subtree(Index top);
  double reduced_cost(Index arc) const;
  void certify();

  Index n_;
  Index m_ = 0;
  Index root_;
  std::vector<Index> src_, dst_;
  std::vector<double> cost_, flow_;
  std::vector<std::uint8_t> in_tree_;
  std::vector<double> supply_;

  // Spanning tree over nodes 0..n_ (n_ is the artificial root).
  std::vector<Index> parent_, pred_arc_, depth_;
  std::vector<Index> first_child_, next_sibling_, prev_sibling_;
  std::vector<std::uint8_t> pred_up_;  // pred arc is oriented child -> parent
  std::vector<double> pi_;
  std::vector<Index> stack_;

  Index block_size_ = 0;
  Index next_arc_ = 0;
  double rc_tol_ = 0.0;
  bool solved_ = false;
  LpCertificate certificate_;
};

}  // namespace pelab

#endif  // PELAB_NETWORK_SIMPLEX_HPP
