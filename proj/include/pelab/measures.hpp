#ifndef PELAB_MEASURES_HPP
#define PELAB_MEASURES_HPP

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "pelab/geometry.hpp"
#include "pelab/rng.hpp"

namespace pelab {

/// Finitely supported (possibly signed) measure: sum_i weights[i] * delta_{support.col(i)}.
struct DiscreteMeasure {
  Dataset support;
  Eigen::VectorXd weights;

  DiscreteMeasure() = default;
  DiscreteMeasure(Dataset support_points, Eigen::VectorXd w);

  Eigen::Index size() const { return weights.size(); }
  int dim() const { return static_cast<int>(support.rows()); }
  double total_mass() const { return weights.sum(); }

  /// True iff all weights >= -1e-12 and |sum - 1| <= 1e-9.
  bool is_probability() const;
};

/// Uniform weights 1/|S| on the points of S, duplicates kept in order.
DiscreteMeasure empirical(const Dataset& S);

/// Merges atoms with bit-identical coordinates and drops zero weights. Atom order
/// follows first occurrence.
DiscreteMeasure compact(const DiscreteMeasure& mu);

/// Index of the nearest point of V for every point of S. Ties go to the
/// smallest index; squared distances are compared exactly, in ascending index order.
std::vector<Eigen::Index> nearest_indices(const Dataset& S, const Dataset& V);

/// Nearest-neighbor histogram over V: entry j is the fraction of points of S
/// whose (smallest-index) nearest neighbor in V is V[j].
Eigen::VectorXd nn_histogram(const Dataset& S, const Dataset& V);

/// Draws n_s atom indices i.i.d. from a probability measure.
std::vector<Eigen::Index> sample_indices(const DiscreteMeasure& mu, Eigen::Index n_s, Rng& rng);

/// n_s i.i.d. points from a probability measure.
Dataset sample_with_replacement(const DiscreteMeasure& mu, Eigen::Index n_s, Rng& rng);

struct CsvReadOptions {
  std::optional<Domain> domain;  // validate membership when set
  bool auto_project = false;     // project outliers instead of failing
  double tolerance = 1e-12;
};

/// Reads one point per row; a non-numeric first row is taken as a header.
Dataset read_dataset_csv(const std::string& path, const CsvReadOptions& options = {});
void write_dataset_csv(const std::string& path, const Dataset& S);

}  // namespace pelab

#endif  // PELAB_MEASURES_HPP
