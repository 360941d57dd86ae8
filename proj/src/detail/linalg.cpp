#include "detail/linalg.hpp"

#include <algorithm>

namespace conangle::detail {

Matrix orthonormal_basis(const Matrix& cols, double tol) {
  const auto dim = cols.rows();
  if (cols.cols() == 0) return Matrix(dim, 0);
  Eigen::JacobiSVD<Matrix> svd(cols, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  const double scale = std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > tol * scale) ++rank;
  return svd.matrixU().leftCols(rank);
}

Matrix orthogonal_complement(const Matrix& basis, int dim) {
  if (basis.cols() == 0) return Matrix::Identity(dim, dim);
  if (basis.cols() >= dim) return Matrix(dim, 0);
  Eigen::JacobiSVD<Matrix> svd(basis, Eigen::ComputeFullU);
  return svd.matrixU().rightCols(dim - basis.cols());
}

Matrix subspace_intersection(const Matrix& b1, const Matrix& b2, double tol) {
  const auto dim = b1.rows();
  if (b1.cols() == 0 || b2.cols() == 0) return Matrix(dim, 0);
  if (b2.cols() == dim) return b1;
  if (b1.cols() == dim) return b2;
  // x = b1 c lies in span(b2) iff (I - b2 b2^T) b1 c = 0.
  const Matrix residual = b1 - b2 * (b2.transpose() * b1);
  Eigen::JacobiSVD<Matrix> svd(residual, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > tol) ++rank;
  const Matrix null = svd.matrixV().rightCols(b1.cols() - rank);
  return orthonormal_basis(b1 * null, tol);
}

Matrix restrict_orthogonal(const Matrix& basis, const Matrix& normals, double tol) {
  if (normals.cols() == 0 || basis.cols() == 0) return basis;
  // Coordinates c with <a_i, basis c> = 0 for every normal.
  const Matrix constraints = normals.transpose() * basis;
  Eigen::JacobiSVD<Matrix> svd(constraints, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Eigen::Index rank = 0;
  while (rank < s.size() && s(rank) > tol) ++rank;
  const Matrix null = svd.matrixV().rightCols(basis.cols() - rank);
  return orthonormal_basis(basis * null, tol);
}

bool is_orthonormal(const Matrix& basis, double tol) {
  if (basis.cols() == 0) return true;
  const Matrix gram = basis.transpose() * basis;
  return (gram - Matrix::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace conangle::detail
