#include "pelab/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace pelab {

DiscreteMeasure::DiscreteMeasure(Dataset support_points, Eigen::VectorXd w)
    : support(std::move(support_points)), weights(std::move(w)) {
  if (support.cols() != weights.size()) {
    throw std::invalid_argument("DiscreteMeasure: support/weights length mismatch");
  }
  if (!weights.allFinite()) throw std::invalid_argument("DiscreteMeasure: non-finite weight");
}

bool DiscreteMeasure::is_probability() const {
  if (weights.size() == 0) return false;
  return weights.minCoeff() >= -1e-12 && std::abs(weights.sum() - 1.0) <= 1e-9;
}

DiscreteMeasure empirical(const Dataset& S) {
  if (S.cols() == 0) throw std::invalid_argument("empirical: empty dataset");
  return DiscreteMeasure(S, Eigen::VectorXd::Constant(S.cols(), 1.0 / static_cast<double>(S.cols())));
}

DiscreteMeasure compact(const DiscreteMeasure& mu) {
  struct Lex {
    bool operator()(const std::vector<double>& a, const std::vector<double>& b) const {
      return a < b;
    }
  };
  std::map<std::vector<double>, Eigen::Index, Lex> slot;
  std::vector<Eigen::Index> first;
  std::vector<double> mass;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu.weights[i] == 0.0) continue;
    std::vector<double> key(mu.support.col(i).data(), mu.support.col(i).data() + mu.support.rows());
    auto [it, inserted] = slot.emplace(std::move(key), static_cast<Eigen::Index>(first.size()));
    if (inserted) {
      first.push_back(i);
      mass.push_back(mu.weights[i]);
    } else {
      mass[it->second] += mu.weights[i];
    }
  }
  Dataset support(mu.support.rows(), static_cast<Eigen::Index>(first.size()));
  Eigen::VectorXd w(static_cast<Eigen::Index>(first.size()));
  for (std::size_t k = 0; k < first.size(); ++k) {
    support.col(static_cast<Eigen::Index>(k)) = mu.support.col(first[k]);
    w[static_cast<Eigen::Index>(k)] = mass[k];
  }
  return DiscreteMeasure(std::move(support), std::move(w));
}

std::vector<Eigen::Index> nearest_indices(const Dataset& S, const Dataset& V) {
  if (S.cols() == 0 || V.cols() == 0) throw std::invalid_argument("nn_histogram: empty input");
  if (S.rows() != V.rows()) throw std::invalid_argument("nn_histogram: dimension mismatch");
  std::vector<Eigen::Index> nearest(static_cast<std::size_t>(S.cols()));
  for (Eigen::Index i = 0; i < S.cols(); ++i) {
    Eigen::Index best = 0;
    double best_d2 = (S.col(i) - V.col(0)).squaredNorm();
    for (Eigen::Index j = 1; j < V.cols(); ++j) {
      const double d2 = (S.col(i) - V.col(j)).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = j;
      }
    }
    nearest[static_cast<std::size_t>(i)] = best;
  }
  return nearest;
}

Eigen::VectorXd nn_histogram(const Dataset& S, const Dataset& V) {
  const auto nearest = nearest_indices(S, V);
  // Integer counts first so every entry is an exact multiple of 1/|S|.
  std::vector<long> counts(static_cast<std::size_t>(V.cols()), 0);
  for (Eigen::Index k : nearest) ++counts[static_cast<std::size_t>(k)];
  Eigen::VectorXd hist(V.cols());
  const double n = static_cast<double>(S.cols());
  for (Eigen::Index j = 0; j < V.cols(); ++j) hist[j] = static_cast<double>(counts[static_cast<std::size_t>(j)]) / n;
  return hist;
}

std::vector<Eigen::Index> sample_indices(const DiscreteMeasure& mu, Eigen::Index n_s, Rng& rng) {
  if (n_s < 1) throw std::invalid_argument("sample_with_replacement: n_s must be >= 1");
  if (!mu.is_probability()) {
    throw std::invalid_argument("sample_with_replacement: measure is not a probability measure");
  }
  std::vector<double> w(mu.weights.data(), mu.weights.data() + mu.weights.size());
  for (double& x : w) x = std::max(x, 0.0);
  std::discrete_distribution<Eigen::Index> pick(w.begin(), w.end());
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n_s));
  for (auto& k : idx) k = pick(rng);
  return idx;
}

Dataset sample_with_replacement(const DiscreteMeasure& mu, Eigen::Index n_s, Rng& rng) {
  const auto idx = sample_indices(mu, n_s, rng);
  Dataset out(mu.support.rows(), n_s);
  for (Eigen::Index i = 0; i < n_s; ++i) out.col(i) = mu.support.col(idx[static_cast<std::size_t>(i)]);
  return out;
}

namespace {

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? std::string() : cell.substr(b, e - b + 1));
  }
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    return false;
  }
  return used == s.size();
}

}  // namespace

Dataset read_dataset_csv(const std::string& path, const CsvReadOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_row(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t k = 0; k < cells.size(); ++k) numeric = numeric && parse_double(cells[k], row[k]);
    if (!numeric) {
      if (rows.empty() && dim == 0) {
        dim = cells.size();  // header
        continue;
      }
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": non-numeric entry");
    }
    if (dim == 0) dim = row.size();
    if (row.size() != dim) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(dim) + " columns, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("dataset file has no points: " + path);
  Dataset S(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < dim; ++k) S(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = rows[i][k];
  }
  if (options.domain) {
    options.domain->check_dim(S.rows());
    for (Eigen::Index i = 0; i < S.cols(); ++i) {
      if (options.domain->contains(S.col(i), options.tolerance)) continue;
      if (!options.auto_project) {
        throw std::runtime_error(path + ": point " + std::to_string(i) + " lies outside the domain");
      }
      S.col(i) = options.domain->project(S.col(i));
    }
  }
  return S;
}

void write_dataset_csv(const std::string& path, const Dataset& S) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  for (Eigen::Index k = 0; k < S.rows(); ++k) out << (k ? "," : "") << "x" << k;
  out << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < S.cols(); ++i) {
    for (Eigen::Index k = 0; k < S.rows(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", S(k, i));
      out << (k ? "," : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace pelab
