#ifndef PELAB_PSMM_HPP
#define PELAB_PSMM_HPP

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "pelab/geometry.hpp"
#include "pelab/measures.hpp"
#include "pelab/rng.hpp"

namespace pelab {

/// Axis-aligned grid over the domain's bounding box, restricted to the cells
/// that meet the domain. Cell i is cells[i] intersected with the domain.
struct PartitionSpec {
  Domain domain;
  Domain::Box grid;                     // bounding box carrying the grid
  int k = 1;                            // cells per axis
  std::vector<Domain::Box> cells;
  Dataset representatives;              // column i lies in cell i and in the domain
  std::vector<Eigen::Index> grid_to_cell;  // flat grid index -> cell, -1 if dropped
  double max_cell_diameter = 0.0;

  Eigen::Index size() const { return representatives.cols(); }

  /// Cell containing p (half-open grid cells, upper faces belong to the last cell).
  Eigen::Index cell_of(const Point& p) const;
};

/// Grid with k = smallest integer such that k^d >= m_target. Representatives are
/// the projected cell centers when those stay inside the cell, otherwise the
/// cell point closest to the ball center.
PartitionSpec grid_partition(const Domain& domain, long m_target);

/// |S ∩ cell_i| for every cell.
Eigen::VectorXd cell_counts(const Dataset& S, const PartitionSpec& partition);

/// Standard deviation sqrt(ln(1/delta)) / eps of the per-cell count noise.
double psmm_noise_scale(double eps, double delta);

struct PsmmResult {
  Dataset synthetic;         // n_s draws from the representatives
  Eigen::VectorXd counts;    // exact cell counts
  Eigen::VectorXd noisy;     // noisy counts divided by n
  DiscreteMeasure measure;   // projected probability measure on the representatives
  double noise_scale = 0.0;
};

/// Private counts on every cell, BL projection onto the simplex over the
/// representatives, then n_s samples. `noise_scale` overrides the calibrated
/// scale (0 runs the mechanism without noise).
PsmmResult psmm_run(const Dataset& S, const PartitionSpec& partition, Eigen::Index n_s, double eps, double delta,
                    Rng& rng, std::optional<double> noise_scale = std::nullopt);

/// Cell frequencies when the cells are the Voronoi cells of `representatives`.
Eigen::VectorXd psmm_as_nn_histogram(const Dataset& S, const Dataset& representatives);

}  // namespace pelab

#endif  // PELAB_PSMM_HPP
