#include "pelab/psmm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pelab/privacy.hpp"
#include "pelab/transport.hpp"

namespace pelab {

namespace {

bool box_contains(const Domain::Box& b, const Point& p, double tol = 1e-12) {
  return ((p.array() >= b.lo.array() - tol) && (p.array() <= b.hi.array() + tol)).all();
}

}  // namespace

Eigen::Index PartitionSpec::cell_of(const Point& p) const {
  domain.check_dim(p.size());
  const int d = static_cast<int>(p.size());
  Eigen::Index flat = 0;
  for (int a = d - 1; a >= 0; --a) {
    const double side = (grid.hi[a] - grid.lo[a]) / k;
    long idx = static_cast<long>(std::floor((p[a] - grid.lo[a]) / side));
    idx = std::clamp(idx, 0L, static_cast<long>(k - 1));
    flat = flat * k + idx;
  }
  const Eigen::Index cell = grid_to_cell[static_cast<std::size_t>(flat)];
  if (cell < 0) throw std::invalid_argument("PartitionSpec: point outside every cell");
  return cell;
}

PartitionSpec grid_partition(const Domain& domain, long m_target) {
  if (m_target < 1) throw std::invalid_argument("grid_partition: m_target must be >= 1");
  const int d = domain.dim();
  int k = 1;
  while (std::pow(static_cast<double>(k), d) < static_cast<double>(m_target)) ++k;

  PartitionSpec part{domain, domain.bounding_box(), k, {}, {}, {}, 0.0};
  const Point side = (part.grid.hi - part.grid.lo) / k;
  part.max_cell_diameter = side.norm();

  long total = 1;
  for (int a = 0; a < d; ++a) total *= k;
  part.grid_to_cell.assign(static_cast<std::size_t>(total), -1);
  std::vector<Point> reps;
  std::vector<long> idx(static_cast<std::size_t>(d), 0);
  for (long flat = 0; flat < total; ++flat) {
    long rest = flat;
    for (int a = 0; a < d; ++a) {
      idx[static_cast<std::size_t>(a)] = rest % k;
      rest /= k;
    }
    Domain::Box cell{Point(d), Point(d)};
    for (int a = 0; a < d; ++a) {
      cell.lo[a] = part.grid.lo[a] + side[a] * static_cast<double>(idx[static_cast<std::size_t>(a)]);
      cell.hi[a] = idx[static_cast<std::size_t>(a)] == k - 1 ? part.grid.hi[a] : cell.lo[a] + side[a];
    }
    Point rep = domain.project(Point(0.5 * (cell.lo + cell.hi)));
    if (!box_contains(cell, rep)) {
      // Only balls reach this branch: the cell meets the ball iff the cell point
      // nearest to the center lies in the ball.
      rep = domain.as_ball().center.cwiseMax(cell.lo).cwiseMin(cell.hi);
      if (!domain.contains(rep)) continue;
    }
    part.grid_to_cell[static_cast<std::size_t>(flat)] = static_cast<Eigen::Index>(reps.size());
    part.cells.push_back(std::move(cell));
    reps.push_back(std::move(rep));
  }
  part.representatives.resize(d, static_cast<Eigen::Index>(reps.size()));
  for (std::size_t i = 0; i < reps.size(); ++i) part.representatives.col(static_cast<Eigen::Index>(i)) = reps[i];
  return part;
}

Eigen::VectorXd cell_counts(const Dataset& S, const PartitionSpec& partition) {
  partition.domain.check_dim(S.rows());
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(partition.size());
  for (Eigen::Index j = 0; j < S.cols(); ++j) counts[partition.cell_of(S.col(j))] += 1.0;
  return counts;
}

double psmm_noise_scale(double eps, double delta) {
  PrivacyParams{eps, delta}.validate();
  return std::sqrt(std::log(1.0 / delta)) / eps;
}

PsmmResult psmm_run(const Dataset& S, const PartitionSpec& partition, Eigen::Index n_s, double eps, double delta,
                    Rng& rng, std::optional<double> noise_scale) {
  if (S.cols() == 0) throw std::invalid_argument("psmm_run: empty dataset");
  if (n_s < 1) throw std::invalid_argument("psmm_run: n_s must be >= 1");
  if (!contains_all(partition.domain, S)) throw std::invalid_argument("psmm_run: point outside the domain");
  if (noise_scale && !(*noise_scale >= 0)) throw std::invalid_argument("psmm_run: noise scale must be >= 0");

  PsmmResult out;
  out.noise_scale = noise_scale ? *noise_scale : psmm_noise_scale(eps, delta);
  out.counts = cell_counts(S, partition);
  Eigen::VectorXd noisy = out.noise_scale > 0 ? gaussian_perturb(out.counts, out.noise_scale, rng) : out.counts;
  out.noisy = noisy / static_cast<double>(S.cols());
  out.measure = bl_project_simplex(DiscreteMeasure(partition.representatives, out.noisy),
                                   partition.domain.diameter())
                    .measure;
  out.synthetic = sample_with_replacement(out.measure, n_s, rng);
  return out;
}

Eigen::VectorXd psmm_as_nn_histogram(const Dataset& S, const Dataset& representatives) {
  return nn_histogram(S, representatives);
}

}  // namespace pelab
