#ifndef PELAB_GEOMETRY_HPP
#define PELAB_GEOMETRY_HPP

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <variant>

namespace pelab {

template <typename Scalar>
using PointT = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// A set of points stored column-wise: column i is the i-th point.
template <typename Scalar>
using PointSetT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Point = PointT<double>;
using Dataset = PointSetT<double>;

/// Euclidean distance. Works on any pair of column expressions
/// (e.g. `distance(S.col(i), V.col(j))`).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar distance(const Eigen::MatrixBase<DerivedA>& a,
                                   const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("distance: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  return (a - b).norm();
}

/// Pairwise distance matrix D(i, j) = ||X.col(i) - Y.col(j)||.
template <typename Scalar>
PointSetT<Scalar> pairwise_distances(const PointSetT<Scalar>& X,
                                     const PointSetT<Scalar>& Y) {
  if (X.rows() != Y.rows()) {
    throw std::invalid_argument("pairwise_distances: dimension mismatch");
  }
  PointSetT<Scalar> D(X.cols(), Y.cols());
  for (Eigen::Index j = 0; j < Y.cols(); ++j) {
    for (Eigen::Index i = 0; i < X.cols(); ++i) {
      D(i, j) = (X.col(i) - Y.col(j)).norm();
    }
  }
  return D;
}

template <typename Scalar>
struct BallT {
  PointT<Scalar> center;
  Scalar radius;
};

template <typename Scalar>
struct BoxT {
  PointT<Scalar> lo;
  PointT<Scalar> hi;
};

/// Convex compact sample space: an l2 ball or an axis-aligned box.
template <typename Scalar>
class DomainT {
 public:
  using Ball = BallT<Scalar>;
  using Box = BoxT<Scalar>;
  using Vec = PointT<Scalar>;

  static DomainT ball(Vec center, Scalar radius) {
    if (center.size() < 1) throw std::invalid_argument("ball: dimension must be >= 1");
    if (!(radius > 0) || !std::isfinite(radius)) {
      throw std::invalid_argument("ball: radius must be positive and finite");
    }
    if (!center.allFinite()) throw std::invalid_argument("ball: center must be finite");
    return DomainT(Ball{std::move(center), radius});
  }

  static DomainT unit_ball(int dim) { return ball(Vec::Zero(dim), Scalar(1)); }

  static DomainT box(Vec lo, Vec hi) {
    if (lo.size() < 1 || lo.size() != hi.size()) {
      throw std::invalid_argument("box: corners must share a dimension >= 1");
    }
    if (!lo.allFinite() || !hi.allFinite() || !(lo.array() < hi.array()).all()) {
      throw std::invalid_argument("box: need finite lo < hi componentwise");
    }
    return DomainT(Box{std::move(lo), std::move(hi)});
  }

  static DomainT unit_box(int dim) { return box(Vec::Zero(dim), Vec::Ones(dim)); }

  int dim() const {
    return static_cast<int>(std::visit([](const auto& s) { return anchor(s).size(); }, shape_));
  }

  bool is_ball() const { return std::holds_alternative<Ball>(shape_); }
  bool is_box() const { return std::holds_alternative<Box>(shape_); }
  const Ball& as_ball() const { return std::get<Ball>(shape_); }
  const Box& as_box() const { return std::get<Box>(shape_); }

  Scalar diameter() const {
    if (is_ball()) return Scalar(2) * as_ball().radius;
    return (as_box().hi - as_box().lo).norm();
  }

  template <typename Derived>
  bool contains(const Eigen::MatrixBase<Derived>& p, Scalar tol = Scalar(1e-12)) const {
    check_dim(p.size());
    if (!p.allFinite()) return false;
    if (is_ball()) {
      const Ball& b = as_ball();
      return (p - b.center).norm() <= b.radius + tol;
    }
    const Box& b = as_box();
    return ((p.array() >= b.lo.array() - tol) && (p.array() <= b.hi.array() + tol)).all();
  }

  /// Euclidean projection: radial scaling for balls, clamping for boxes.
  template <typename Derived>
  Vec project(const Eigen::MatrixBase<Derived>& p) const {
    check_dim(p.size());
    if (!p.allFinite()) throw std::invalid_argument("project: point must be finite");
    if (is_ball()) {
      const Ball& b = as_ball();
      Vec offset = p - b.center;
      const Scalar norm = offset.norm();
      if (norm <= b.radius) return p;
      return b.center + offset * (b.radius / norm);
    }
    const Box& b = as_box();
    return p.cwiseMax(b.lo).cwiseMin(b.hi);
  }

  /// Smallest axis-aligned box containing the domain.
  Box bounding_box() const {
    if (is_box()) return as_box();
    const Ball& b = as_ball();
    return Box{b.center.array() - b.radius, b.center.array() + b.radius};
  }

  void check_dim(Eigen::Index d) const {
    if (d != dim()) {
      throw std::invalid_argument("domain: dimension mismatch (expected " +
                                  std::to_string(dim()) + ", got " + std::to_string(d) + ")");
    }
  }

 private:
  explicit DomainT(Ball b) : shape_(std::move(b)) {}
  explicit DomainT(Box b) : shape_(std::move(b)) {}

  static const Vec& anchor(const Ball& b) { return b.center; }
  static const Vec& anchor(const Box& b) { return b.lo; }

  std::variant<Ball, Box> shape_;
};

using Domain = DomainT<double>;

/// Projects every column of `points` onto the domain.
template <typename Scalar>
PointSetT<Scalar> project_all(const DomainT<Scalar>& domain, const PointSetT<Scalar>& points) {
  PointSetT<Scalar> out(points.rows(), points.cols());
  for (Eigen::Index i = 0; i < points.cols(); ++i) out.col(i) = domain.project(points.col(i));
  return out;
}

template <typename Scalar>
bool contains_all(const DomainT<Scalar>& domain, const PointSetT<Scalar>& points,
                  Scalar tol = Scalar(1e-12)) {
  for (Eigen::Index i = 0; i < points.cols(); ++i) {
    if (!domain.contains(points.col(i), tol)) return false;
  }
  return true;
}

}  // namespace pelab

#endif  // PELAB_GEOMETRY_HPP
