#include "detail/facets.hpp"

#include <vector>

#include "detail/linalg.hpp"

namespace conangle::detail {

namespace {

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

// Advances `idx` to the next k-combination of {0..n-1}; false when exhausted.
bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
  const std::size_t k = idx.size();
  for (std::size_t i = k; i-- > 0;) {
    if (idx[i] < n - k + i) {
      ++idx[i];
      for (std::size_t j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

std::optional<Facets> enumerate_facets(const Matrix& generators, double tol,
                                       std::size_t max_subsets) {
  const Matrix span = orthonormal_basis(generators, tol);
  const auto m = static_cast<std::size_t>(span.cols());
  const auto n = static_cast<std::size_t>(generators.cols());
  Facets out{span, Matrix(generators.rows(), 0)};
  if (m == 0) return out;

  Matrix local = span.transpose() * generators;  // m x n, generators in span coordinates
  for (Eigen::Index j = 0; j < local.cols(); ++j) {
    const double nrm = local.col(j).norm();
    if (nrm > 0.0) local.col(j) /= nrm;
  }

  if (binomial(n, m - 1) > static_cast<double>(max_subsets)) return std::nullopt;

  std::vector<Eigen::VectorXd> found;
  auto consider = [&](const Eigen::VectorXd& candidate) {
    for (double sign : {1.0, -1.0}) {
      const Eigen::VectorXd a = sign * candidate;
      if ((local.transpose() * a).maxCoeff() > tol) continue;
      bool duplicate = false;
      for (const auto& f : found) {
        if ((f - a).norm() <= 1e-9) {
          duplicate = true;
          break;
        }
      }
      if (!duplicate) found.push_back(a);
    }
  };

  if (m == 1) {
    consider(Eigen::VectorXd::Ones(1));
  } else {
    std::vector<std::size_t> idx(m - 1);
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    Matrix sub(static_cast<Eigen::Index>(m - 1), static_cast<Eigen::Index>(m));
    do {
      for (std::size_t i = 0; i < idx.size(); ++i) {
        sub.row(static_cast<Eigen::Index>(i)) = local.col(static_cast<Eigen::Index>(idx[i])).transpose();
      }
      Eigen::JacobiSVD<Matrix> svd(sub, Eigen::ComputeFullV);
      const auto& s = svd.singularValues();
      if (s(s.size() - 1) <= tol) continue;  // subset does not span a hyperplane
      consider(svd.matrixV().col(static_cast<Eigen::Index>(m - 1)));
    } while (next_combination(idx, n));
  }

  // A normal valid for both signs means every generator lies on the
  // hyperplane, which cannot happen for a cone that spans `span`.
  out.normals.resize(generators.rows(), static_cast<Eigen::Index>(found.size()));
  for (std::size_t j = 0; j < found.size(); ++j) {
    out.normals.col(static_cast<Eigen::Index>(j)) = span * found[j];
  }
  return out;
}

}  // namespace conangle::detail
