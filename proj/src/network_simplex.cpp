#include "pelab/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pelab {

namespace {
constexpr NetworkSimplex::Index kNone = -1;
}

NetworkSimplex::NetworkSimplex(Index node_count)
    : n_(node_count), root_(node_count), supply_(static_cast<std::size_t>(node_count), 0.0) {
  if (node_count < 1) throw std::invalid_argument("NetworkSimplex: need at least one node");
}

void NetworkSimplex::reserve_arcs(Index count) {
  const auto c = static_cast<std::size_t>(count + n_);
  src_.reserve(c);
  dst_.reserve(c);
  cost_.reserve(c);
  flow_.reserve(c);
  in_tree_.reserve(c);
}

NetworkSimplex::Index NetworkSimplex::add_arc(Index from, Index to, double cost) {
  if (solved_) throw std::logic_error("NetworkSimplex: arcs must be added before solve()");
  if (from < 0 || from >= n_ || to < 0 || to >= n_ || from == to) {
    throw std::invalid_argument("NetworkSimplex: bad arc endpoints");
  }
  if (!std::isfinite(cost)) throw std::invalid_argument("NetworkSimplex: non-finite arc cost");
  src_.push_back(from);
  dst_.push_back(to);
  cost_.push_back(cost);
  flow_.push_back(0.0);
  in_tree_.push_back(0);
  return m_++;
}

void NetworkSimplex::set_supply(Index node, double supply) {
  if (node < 0 || node >= n_) throw std::invalid_argument("NetworkSimplex: bad node index");
  if (!std::isfinite(supply)) throw std::invalid_argument("NetworkSimplex: non-finite supply");
  supply_[static_cast<std::size_t>(node)] = supply;
}

double NetworkSimplex::reduced_cost(Index a) const {
  const auto k = static_cast<std::size_t>(a);
  return cost_[k] - pi_[static_cast<std::size_t>(src_[k])] + pi_[static_cast<std::size_t>(dst_[k])];
}

void NetworkSimplex::init_tree() {
  double max_cost = 0.0;
  for (double c : cost_) max_cost = std::max(max_cost, std::abs(c));
  const double art_cost = (max_cost + 1.0) * static_cast<double>(n_ + 1);
  rc_tol_ = 1e-11 * (1.0 + max_cost);

  const auto nodes = static_cast<std::size_t>(n_ + 1);
  parent_.assign(nodes, kNone);
  pred_arc_.assign(nodes, kNone);
  depth_.assign(nodes, 0);
  first_child_.assign(nodes, kNone);
  next_sibling_.assign(nodes, kNone);
  prev_sibling_.assign(nodes, kNone);
  pred_up_.assign(nodes, 0);
  pi_.assign(nodes, 0.0);

  // Zero-supply nodes hang on arcs pointing to the root, which keeps the
  // initial tree strongly feasible.
  for (Index u = 0; u < n_; ++u) {
    const double b = supply_[static_cast<std::size_t>(u)];
    const Index a = static_cast<Index>(src_.size());
    if (b >= 0) {
      src_.push_back(u);
      dst_.push_back(root_);
      flow_.push_back(b);
    } else {
      src_.push_back(root_);
      dst_.push_back(u);
      flow_.push_back(-b);
    }
    cost_.push_back(art_cost);
    in_tree_.push_back(1);
    const auto uu = static_cast<std::size_t>(u);
    pred_arc_[uu] = a;
    pred_up_[uu] = b >= 0 ? 1 : 0;
    attach(u, root_);
    depth_[uu] = 1;
    pi_[uu] = b >= 0 ? art_cost : -art_cost;
  }

  block_size_ = std::max<Index>(10, static_cast<Index>(std::sqrt(static_cast<double>(m_))));
  next_arc_ = 0;
}

void NetworkSimplex::attach(Index child, Index parent) {
  const auto c = static_cast<std::size_t>(child);
  const auto p = static_cast<std::size_t>(parent);
  parent_[c] = parent;
  prev_sibling_[c] = kNone;
  next_sibling_[c] = first_child_[p];
  if (first_child_[p] != kNone) prev_sibling_[static_cast<std::size_t>(first_child_[p])] = child;
  first_child_[p] = child;
}

void NetworkSimplex::detach(Index child) {
  const auto c = static_cast<std::size_t>(child);
  const Index p = parent_[c];
  if (p == kNone) return;
  if (prev_sibling_[c] != kNone) {
    next_sibling_[static_cast<std::size_t>(prev_sibling_[c])] = next_sibling_[c];
  } else {
    first_child_[static_cast<std::size_t>(p)] = next_sibling_[c];
  }
  if (next_sibling_[c] != kNone) prev_sibling_[static_cast<std::size_t>(next_sibling_[c])] = prev_sibling_[c];
  parent_[c] = kNone;
  next_sibling_[c] = prev_sibling_[c] = kNone;
}

void NetworkSimplex::refresh_subtree(Index top) {
  stack_.clear();
  stack_.push_back(top);
  while (!stack_.empty()) {
    const Index x = stack_.back();
    stack_.pop_back();
    const auto xx = static_cast<std::size_t>(x);
    const auto p = static_cast<std::size_t>(parent_[xx]);
    const double c = cost_[static_cast<std::size_t>(pred_arc_[xx])];
    depth_[xx] = depth_[p] + 1;
    pi_[xx] = pred_up_[xx] ? pi_[p] + c : pi_[p] - c;
    for (Index ch = first_child_[xx]; ch != kNone; ch = next_sibling_[static_cast<std::size_t>(ch)]) {
      stack_.push_back(ch);
    }
  }
}

NetworkSimplex::Index NetworkSimplex::select_entering() {
  Index best = kNone;
  double best_rc = -rc_tol_;
  Index scanned_in_block = 0;
  for (Index k = 0; k < m_; ++k) {
    const Index a = next_arc_;
    next_arc_ = next_arc_ + 1 == m_ ? 0 : next_arc_ + 1;
    if (!in_tree_[static_cast<std::size_t>(a)]) {
      const double rc = reduced_cost(a);
      if (rc < best_rc) {
        best_rc = rc;
        best = a;
      }
    }
    if (++scanned_in_block == block_size_) {
      if (best != kNone) return best;
      scanned_in_block = 0;
    }
  }
  return best;
}

void NetworkSimplex::pivot(Index entering) {
  const auto e = static_cast<std::size_t>(entering);
  const Index i = src_[e];
  const Index j = dst_[e];

  Index a = i, b = j;
  while (a != b) {
    const auto da = depth_[static_cast<std::size_t>(a)];
    const auto db = depth_[static_cast<std::size_t>(b)];
    if (da >= db) a = parent_[static_cast<std::size_t>(a)];
    if (db >= da) b = parent_[static_cast<std::size_t>(b)];
  }
  const Index join = a;

  // Flow goes around the cycle join -> ... -> i -> j -> ... -> join. Among the
  // blocking arcs, the last one in that orientation leaves.
  double delta = std::numeric_limits<double>::infinity();
  Index leaving = kNone;
  bool leaving_on_j_side = false;
  for (Index x = i; x != join; x = parent_[static_cast<std::size_t>(x)]) {
    const auto xx = static_cast<std::size_t>(x);
    if (pred_up_[xx]) {
      const double d = flow_[static_cast<std::size_t>(pred_arc_[xx])];
      if (d < delta) {
        delta = d;
        leaving = x;
      }
    }
  }
  for (Index x = j; x != join; x = parent_[static_cast<std::size_t>(x)]) {
    const auto xx = static_cast<std::size_t>(x);
    if (!pred_up_[xx]) {
      const double d = flow_[static_cast<std::size_t>(pred_arc_[xx])];
      if (d <= delta) {
        delta = d;
        leaving = x;
        leaving_on_j_side = true;
      }
    }
  }
  if (leaving == kNone) throw SolverError("network simplex: unbounded (negative-cost cycle)");

  if (delta > 0) {
    flow_[e] += delta;
    for (Index x = i; x != join; x = parent_[static_cast<std::size_t>(x)]) {
      const auto xx = static_cast<std::size_t>(x);
      flow_[static_cast<std::size_t>(pred_arc_[xx])] += pred_up_[xx] ? -delta : delta;
    }
    for (Index x = j; x != join; x = parent_[static_cast<std::size_t>(x)]) {
      const auto xx = static_cast<std::size_t>(x);
      flow_[static_cast<std::size_t>(pred_arc_[xx])] += pred_up_[xx] ? delta : -delta;
    }
  }
  const auto leave_arc = static_cast<std::size_t>(pred_arc_[static_cast<std::size_t>(leaving)]);
  flow_[leave_arc] = 0.0;
  in_tree_[leave_arc] = 0;
  in_tree_[e] = 1;

  // Re-hang the detached subtree from the entering arc, reversing the path
  // between the entering endpoint and the node that lost its parent.
  const Index start = leaving_on_j_side ? j : i;
  const Index new_parent = leaving_on_j_side ? i : j;
  std::vector<Index> path;
  for (Index x = start;; x = parent_[static_cast<std::size_t>(x)]) {
    path.push_back(x);
    if (x == leaving) break;
  }
  std::vector<Index> old_arc(path.size());
  std::vector<std::uint8_t> old_up(path.size());
  for (std::size_t k = 0; k < path.size(); ++k) {
    old_arc[k] = pred_arc_[static_cast<std::size_t>(path[k])];
    old_up[k] = pred_up_[static_cast<std::size_t>(path[k])];
    detach(path[k]);
  }
  const auto s = static_cast<std::size_t>(start);
  pred_arc_[s] = entering;
  pred_up_[s] = leaving_on_j_side ? 0 : 1;
  attach(start, new_parent);
  for (std::size_t k = 1; k < path.size(); ++k) {
    const auto x = static_cast<std::size_t>(path[k]);
    pred_arc_[x] = old_arc[k - 1];
    pred_up_[x] = old_up[k - 1] ? 0 : 1;
    attach(path[k], path[k - 1]);
  }
  refresh_subtree(start);
}

void NetworkSimplex::solve() {
  if (solved_) throw std::logic_error("NetworkSimplex: solve() called twice");
  double imbalance = 0.0, scale = 1.0;
  for (double b : supply_) {
    imbalance += b;
    scale += std::abs(b);
  }
  if (std::abs(imbalance) > 1e-9 * scale) {
    throw SolverError("network simplex: supplies do not balance (sum " + std::to_string(imbalance) + ")");
  }
  init_tree();
  solved_ = true;
  long iterations = 0;
  const long max_iterations = 1000000L + 200L * static_cast<long>(m_ + n_);
  for (Index e = select_entering(); e != kNone; e = select_entering()) {
    pivot(e);
    if (++iterations > max_iterations) throw SolverError("network simplex: iteration limit reached");
  }
  for (Index u = 0; u < n_; ++u) {
    const double f = flow_[static_cast<std::size_t>(m_ + u)];
    if (f > 1e-9 * scale) {
      throw SolverError("network simplex: infeasible (artificial flow " + std::to_string(f) + ")");
    }
  }
  certificate_.iterations = iterations;
  certify();
}

double NetworkSimplex::total_cost() const {
  double c = 0.0;
  for (Index a = 0; a < m_; ++a) c += cost_[static_cast<std::size_t>(a)] * flow_[static_cast<std::size_t>(a)];
  return c;
}

void NetworkSimplex::certify() {
  LpCertificate& cert = certificate_;
  cert.primal_objective = total_cost();
  double dual = 0.0;
  for (Index u = 0; u < n_; ++u) dual += supply_[static_cast<std::size_t>(u)] * pi_[static_cast<std::size_t>(u)];
  cert.dual_objective = dual;
  cert.duality_gap = std::abs(cert.primal_objective - cert.dual_objective);

  std::vector<double> net(static_cast<std::size_t>(n_), 0.0);
  double min_rc = 0.0, slack = 0.0;
  for (Index a = 0; a < m_; ++a) {
    const auto k = static_cast<std::size_t>(a);
    net[static_cast<std::size_t>(src_[k])] += flow_[k];
    net[static_cast<std::size_t>(dst_[k])] -= flow_[k];
    const double rc = reduced_cost(a);
    min_rc = std::min(min_rc, rc);
    slack += flow_[k] * std::abs(rc);
  }
  double residual = 0.0;
  for (Index u = 0; u < n_; ++u) {
    residual = std::max(residual, std::abs(net[static_cast<std::size_t>(u)] - supply_[static_cast<std::size_t>(u)]));
  }
  cert.primal_residual = residual;
  cert.dual_infeasibility = -min_rc;
  cert.slackness_violation = slack;
}

}  // namespace pelab
