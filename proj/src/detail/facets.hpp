#pragma once

#include <cstddef>
#include <optional>

#include "conangle/point.hpp"

namespace conangle::detail {

// H-description of a finitely generated cone:
//   cone(G) = {x in span(G) : <n_j, x> <= 0 for all j}.
// `span` is an orthonormal basis of span(G); `normals` are unit vectors lying
// in that span. No normals means the generators positively span their span.
struct Facets {
  Matrix span;
  Matrix normals;
};

// Facet enumeration over (m-1)-subsets of the generators, m = dim span(G).
// Returns nullopt when the number of subsets exceeds `max_subsets`.
std::optional<Facets> enumerate_facets(const Matrix& generators, double tol,
                                       std::size_t max_subsets = 20000);

}  // namespace conangle::detail
