#pragma once

#include <optional>
#include <vector>

#include "conangle/point.hpp"

namespace conangle::detail {

// R * SOC restricted to a subspace V, prepared for repeated projection.
struct SocSlice {
  enum class Mode { zero, half_subspace, quadratic };

  Mode mode = Mode::zero;
  Matrix rotation;  // R, with K = R * SOC
  // half_subspace: {x in span(basis) : <axis, x> >= 0}, axis already inside the span.
  // quadratic: basis of V plus the eigendecomposition of the restricted form
  // Q = B^T R J R^T B = U diag(lambda) U^T (exactly one negative eigenvalue).
  Matrix basis;
  Point axis;
  Matrix eigvecs;
  Eigen::VectorXd eigvals;
  Eigen::Index negative = -1;

  Point project(const Point& x) const;
};

// Builds the slice for R * SOC cap span(basis). Degenerate slices (tangent
// subspaces, lines) collapse to the polyhedral modes.
SocSlice make_soc_slice(const Matrix& rotation, const Matrix& basis, double tol);

// {x in V : <a_i, x> <= 0} cap (R * SOC, if present).
struct ConstraintForm {
  Matrix eq_basis;  // orthonormal basis of V (d x m)
  Matrix normals;   // d x k
  std::optional<Matrix> soc;

  // Cached projection data.
  Matrix local_normals;                 // normals in V coordinates, unit, nonzero
  std::vector<SocSlice> slices;         // one per active subset when soc is present
  std::vector<std::vector<int>> subsets;

  bool polyhedral() const { return !soc.has_value(); }
  int dim() const { return static_cast<int>(eq_basis.rows()); }
};

// Normalizes a raw description: intersects the second-order cone with V and
// collapses it to linear constraints when the slice is degenerate, then
// precomputes projection data. Returns nullopt when an active-set enumeration
// would be too large.
std::optional<ConstraintForm> finalize_form(Matrix eq_basis, Matrix normals,
                                            std::optional<Matrix> soc, double tol);

// Exact Euclidean projection onto the described cone.
Point project_form(const ConstraintForm& form, const Point& x, double tol);

}  // namespace conangle::detail
