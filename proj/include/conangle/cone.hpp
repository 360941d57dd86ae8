#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "conangle/point.hpp"
#include "conangle/tolerance.hpp"

namespace conangle {

namespace detail {
struct ConstraintForm;
struct Facets;
}  // namespace detail

enum class ConeKind { zero, ray, subspace, generated, halfspace, second_order, neg, polar, intersect };

const char* to_string(ConeKind kind) noexcept;

// Immutable description of a nonempty closed convex cone in R^dim.
//
// Atoms store their defining vectors as the columns of vectors():
//   ray        the unit direction u            (R_+ u)
//   subspace   an orthonormal basis             (span)
//   generated  unit generators g_i             (closed conical hull)
//   halfspace  unit normals a_i                {x : <a_i, x> <= 0}
// The second-order cone is R * {(z, t) : |z| <= t} with an orthogonal R
// (identity when no rotation is given); the axis is the last coordinate.
// Composite nodes wrap children: neg (-K), polar (K^o) and intersect.
//
// Copies share the underlying node, so passing by value is cheap.
class ConeExpr {
 public:
  static ConeExpr zero(int dim);
  static ConeExpr ray(const Point& direction, double tol_zero = 1e-12);
  // An empty basis gives the cone {0}; dependent vectors are reduced.
  static ConeExpr subspace(int dim, const std::vector<Point>& basis, double tol_zero = 1e-12);
  static ConeExpr full_space(int dim);
  static ConeExpr generated(const std::vector<Point>& generators, double tol_zero = 1e-12);
  static ConeExpr halfspace(const std::vector<Point>& normals, double tol_zero = 1e-12);
  static ConeExpr second_order(int dim, std::optional<Matrix> rotation = std::nullopt);

  // Raw composite nodes. Prefer the simplifying free functions negate(), polar()
  // and intersect() below; these exist for callers that need the literal node.
  static ConeExpr neg_node(const ConeExpr& inner);
  static ConeExpr polar_node(const ConeExpr& inner);
  static ConeExpr intersect_node(std::vector<ConeExpr> parts);

  ConeKind kind() const;
  int dim() const;
  bool is_atom() const;

  // Defining vectors of an atom (see class comment); empty for composites.
  const Matrix& vectors() const;
  std::vector<Point> vector_list() const;
  // Rotation of a second-order cone; nullopt when none was given.
  const std::optional<Matrix>& rotation() const;
  // Orthogonal map R with K = R * SOC (identity if no rotation).
  Matrix rotation_or_identity() const;

  // Child of neg/polar nodes.
  const ConeExpr& inner() const;
  // Children of intersect nodes.
  const std::vector<ConeExpr>& parts() const;

  // Facet description of a generated cone ({x in span : <n_j, x> <= 0}), when
  // the enumeration was affordable at construction.
  const detail::Facets* facets() const;
  // Exact constraint description used by the projector, if one exists.
  const detail::ConstraintForm* constraint_form() const;

  // Finite list of directions whose conical hull is the cone, when one is known
  // (ray, generated, subspace as +-basis, halfspace via its facet dual, zero).
  std::optional<std::vector<Point>> generator_list() const;
  // Directions worth starting an angle search from: generators when known,
  // the axis of a second-order cone, nothing for composites.
  std::vector<Point> seed_directions() const;

  // Structural, exact equality of two expressions.
  friend bool operator==(const ConeExpr& a, const ConeExpr& b);

  struct Node;

 private:
  explicit ConeExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

ConeExpr make_ray(const Point& d, double tol_zero = 1e-12);

// K^o with the rewrite rules applied (ray <-> halfspace, generated <-> halfspace,
// subspace -> orthocomplement, SOC -> -SOC, polar(polar K) = K, ...).
ConeExpr polar(const ConeExpr& k);
// K^+ = -K^o.
ConeExpr dual(const ConeExpr& k);
ConeExpr negate(const ConeExpr& k);
// Flattens nested intersections; a single part is returned unchanged.
ConeExpr intersect(const std::vector<ConeExpr>& parts);

// Replaces composites whose exact description is polyhedral with an
// equivalent atom (zero, ray, subspace or halfspace). Atoms pass through.
ConeExpr simplify(const ConeExpr& k, double tol = 1e-10);

// Tolerances scale with max(1, |x|).
bool member(const ConeExpr& k, const Point& x, double tol);

// max |P_K(+-e_i)|: 0 for {0}, at least 1/sqrt(dim) for any other cone.
double trivial_probe(const ConeExpr& k, const ToleranceConfig& cfg = {});
// K = {0}. Closed form for atoms, otherwise trivial_probe < 0.5 / sqrt(dim).
bool is_trivial(const ConeExpr& k, const ToleranceConfig& cfg = {});
bool is_linear_subspace(const ConeExpr& k, const ToleranceConfig& cfg = {});

void require_same_dim(const ConeExpr& k, const Point& x);
void require_same_dim(const ConeExpr& a, const ConeExpr& b);

}  // namespace conangle
