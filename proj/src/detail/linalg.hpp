#pragma once

#include "conangle/point.hpp"

namespace conangle::detail {

// Orthonormal basis (columns) of the column span of `cols`; singular values
// below tol * max(1, largest) are dropped.
Matrix orthonormal_basis(const Matrix& cols, double tol);

// Orthonormal basis of the orthogonal complement of span(basis) in R^dim.
// `basis` must already be orthonormal.
Matrix orthogonal_complement(const Matrix& basis, int dim);

// Orthonormal basis of span(b1) cap span(b2), both orthonormal.
Matrix subspace_intersection(const Matrix& b1, const Matrix& b2, double tol);

// Orthonormal basis of span(basis) cap {normals}^perp.
Matrix restrict_orthogonal(const Matrix& basis, const Matrix& normals, double tol);

bool is_orthonormal(const Matrix& basis, double tol);

}  // namespace conangle::detail
