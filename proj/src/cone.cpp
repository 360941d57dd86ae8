#include "conangle/cone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include "conangle/error.hpp"
#include "conangle/nnls.hpp"
#include "conangle/projection.hpp"
#include "detail/constraint_form.hpp"
#include "detail/facets.hpp"
#include "detail/linalg.hpp"

namespace conangle {

namespace {

constexpr double kFormTol = 1e-10;
constexpr double kUnitSlack = 4.0 * std::numeric_limits<double>::epsilon();
// bases already orthonormal to this level are kept as given
constexpr double kBasisSlack = 1e-13;

}  // namespace

struct ConeExpr::Node {
  ConeKind kind = ConeKind::zero;
  int dim = 0;
  Matrix vectors;
  std::optional<Matrix> rotation;
  std::vector<ConeExpr> children;
  std::optional<detail::Facets> facets;

  mutable std::once_flag form_once;
  mutable std::optional<detail::ConstraintForm> form;
};

const char* to_string(ConeKind kind) noexcept {
  switch (kind) {
    case ConeKind::zero: return "zero";
    case ConeKind::ray: return "ray";
    case ConeKind::subspace: return "subspace";
    case ConeKind::generated: return "generated";
    case ConeKind::halfspace: return "halfspace";
    case ConeKind::second_order: return "soc";
    case ConeKind::neg: return "neg";
    case ConeKind::polar: return "polar";
    case ConeKind::intersect: return "intersect";
  }
  return "unknown";
}

namespace {

void check_vector(const Point& v, int dim, double tol_zero) {
  if (v.size() != dim) {
    throw Error(Errc::dimension_mismatch,
                "expected dimension " + std::to_string(dim) + ", got " + std::to_string(v.size()));
  }
  if (!v.allFinite()) throw Error(Errc::invalid_argument, "non-finite coordinate in " + format_point(v));
  if (v.norm() <= tol_zero) throw Error(Errc::zero_direction, "direction " + format_point(v) + " is zero");
}

Point unit(const Point& v) {
  const double n2 = v.squaredNorm();
  if (std::abs(n2 - 1.0) <= kUnitSlack) return v;
  return v / std::sqrt(n2);
}

Matrix unit_columns(const std::vector<Point>& vs, double tol_zero) {
  if (vs.empty()) throw Error(Errc::invalid_argument, "at least one vector is required");
  const int dim = static_cast<int>(vs.front().size());
  if (dim <= 0) throw Error(Errc::invalid_argument, "dimension must be positive");
  Matrix m(dim, static_cast<Eigen::Index>(vs.size()));
  for (std::size_t j = 0; j < vs.size(); ++j) {
    check_vector(vs[j], dim, tol_zero);
    m.col(static_cast<Eigen::Index>(j)) = unit(vs[j]);
  }
  return m;
}

std::vector<Point> columns(const Matrix& m) {
  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) out.emplace_back(m.col(j));
  return out;
}

Matrix hstack(const Matrix& a, const Matrix& b) {
  Matrix out(std::max(a.rows(), b.rows()), a.cols() + b.cols());
  if (a.cols() > 0) out.leftCols(a.cols()) = a;
  if (b.cols() > 0) out.rightCols(b.cols()) = b;
  return out;
}

// Generators of {x in span(eq) : <n_j, x> <= 0}: it is the polar of
// span(eq)^perp + cone(n), whose facets give the generators.
std::optional<std::vector<Point>> constraint_generators(const Matrix& eq, const Matrix& normals, int dim) {
  const Matrix perp = detail::orthogonal_complement(eq, dim);
  const Matrix dual_gens = hstack(hstack(normals, perp), -perp);
  if (dual_gens.cols() == 0) {
    Matrix full(dim, 2 * dim);
    full << Matrix::Identity(dim, dim), -Matrix::Identity(dim, dim);
    return columns(full);
  }
  const auto f = detail::enumerate_facets(dual_gens, kFormTol);
  if (!f) return std::nullopt;
  const Matrix lin = detail::orthogonal_complement(f->span, dim);
  return columns(hstack(hstack(f->normals, lin), -lin));
}

std::optional<detail::ConstraintForm> generated_form(const Matrix& gens, int dim) {
  if (gens.cols() == 0) return detail::finalize_form(Matrix(dim, 0), Matrix(dim, 0), std::nullopt, kFormTol);
  const auto f = detail::enumerate_facets(gens, kFormTol);
  if (!f) return std::nullopt;
  return detail::finalize_form(f->span, f->normals, std::nullopt, kFormTol);
}

std::optional<detail::ConstraintForm> build_form(const ConeExpr& k) {
  const int d = k.dim();
  const Matrix none(d, 0);
  switch (k.kind()) {
    case ConeKind::zero:
      return detail::finalize_form(none, none, std::nullopt, kFormTol);
    case ConeKind::ray:
      return detail::finalize_form(k.vectors(), -k.vectors(), std::nullopt, kFormTol);
    case ConeKind::subspace:
      return detail::finalize_form(k.vectors(), none, std::nullopt, kFormTol);
    case ConeKind::generated: {
      const detail::Facets* f = k.facets();
      if (!f) return std::nullopt;
      return detail::finalize_form(f->span, f->normals, std::nullopt, kFormTol);
    }
    case ConeKind::halfspace:
      return detail::finalize_form(Matrix::Identity(d, d), k.vectors(), std::nullopt, kFormTol);
    case ConeKind::second_order:
      return detail::finalize_form(Matrix::Identity(d, d), none, k.rotation_or_identity(), kFormTol);
    case ConeKind::neg: {
      const detail::ConstraintForm* f = k.inner().constraint_form();
      if (!f) return std::nullopt;
      std::optional<Matrix> soc;
      if (f->soc) soc = -*f->soc;
      return detail::finalize_form(f->eq_basis, -f->normals, soc, kFormTol);
    }
    case ConeKind::polar: {
      const detail::ConstraintForm* f = k.inner().constraint_form();
      if (!f || !f->polyhedral()) return std::nullopt;
      const Matrix perp = detail::orthogonal_complement(f->eq_basis, d);
      return generated_form(hstack(hstack(f->normals, perp), -perp), d);
    }
    case ConeKind::intersect: {
      Matrix eq = Matrix::Identity(d, d);
      Matrix normals(d, 0);
      std::optional<Matrix> soc;
      for (const ConeExpr& part : k.parts()) {
        const detail::ConstraintForm* f = part.constraint_form();
        if (!f) return std::nullopt;
        eq = detail::subspace_intersection(eq, f->eq_basis, kFormTol);
        normals = hstack(normals, f->normals);
        if (f->soc) {
          if (soc) return std::nullopt;
          soc = *f->soc;
        }
      }
      return detail::finalize_form(eq, normals, soc, kFormTol);
    }
  }
  return std::nullopt;
}

bool structurally_equal(const ConeExpr& a, const ConeExpr& b) {
  if (a.kind() != b.kind() || a.dim() != b.dim()) return false;
  if (a.is_atom()) {
    if (a.vectors().rows() != b.vectors().rows() || a.vectors().cols() != b.vectors().cols()) return false;
    if (a.vectors() != b.vectors()) return false;
    if (a.rotation().has_value() != b.rotation().has_value()) return false;
    return !a.rotation() || *a.rotation() == *b.rotation();
  }
  if (a.kind() == ConeKind::intersect) {
    if (a.parts().size() != b.parts().size()) return false;
    for (std::size_t i = 0; i < a.parts().size(); ++i) {
      if (!structurally_equal(a.parts()[i], b.parts()[i])) return false;
    }
    return true;
  }
  return structurally_equal(a.inner(), b.inner());
}

}  // namespace

ConeExpr ConeExpr::zero(int dim) {
  if (dim <= 0) throw Error(Errc::invalid_argument, "dimension must be positive");
  auto n = std::make_shared<Node>();
  n->kind = ConeKind::zero;
  n->dim = dim;
  n->vectors = Matrix(dim, 0);
  return ConeExpr(std::move(n));
}

ConeExpr ConeExpr::ray(const Point& direction, double tol_zero) {
  if (direction.size() <= 0) throw Error(Errc::invalid_argument, "dimension must be positive");
  check_vector(direction, static_cast<int>(direction.size()), tol_zero);
  auto n = std::make_shared<Node>();
  n->kind = ConeKind::ray;
  n->dim = static_cast<int>(direction.size());
  n->vectors = unit(direction);
  return ConeExpr(std::move(n));
}

ConeExpr ConeExpr::subspace(int dim, const std::vector<Point>& basis, double tol_zero) {
  if (dim <= 0) throw Error(Errc::invalid_argument, "dimension must be positive");
  if (basis.empty()) return zero(dim);
  Matrix b(dim, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    check_vector(basis[j], dim, tol_zero);
    b.col(static_cast<Eigen::Index>(j)) = basis[j];
  }
  if (!detail::is_orthonormal(b, kBasisSlack)) b = detail::orthonormal_basis(b, kFormTol);
  auto n = std::make_shared<Node>();
  n->kind = ConeKind::subspace;
  n->dim = dim;
  n->vectors = std::move(b);
  return ConeExpr(std::move(n));
}

ConeExpr ConeExpr::full_space(int dim) {
  if (dim <= 0) throw Error(Errc::invalid_argument, "dimension must be positive");
  auto n = std::make_shared<Node>();
  n->kind = ConeKind::subspace;
  n->dim = dim;
  n->vectors = Matrix::Identity(dim, dim);
  return ConeExpr(std::move(n));
}

ConeExpr ConeExpr::generated(const std::vector<Point>& generators, double tol_zero) {
  auto n = std::make_shared<Node>();
  n->kind = ConeKind::generated;
  n->vectors = unit_columns(generators, tol_zero);
  n->dim = static_cast<int>(n->vectors.rows());
  n->facets = detail::enumerate_facets(n->vectors, kFormTol);
  return ConeExpr(std::move(n));
}

ConeExpr ConeExpr::halfspace(const std::vector<Point>& normals, double tol_zero) {
  auto n = std::make_shared<Node>();
  n->kind = ConeKind::halfspace;
  n->vectors = unit_columns(normals, tol_zero);
  n->dim = static_cast<int>(n->vectors.rows());
  n->facets = detail::enumerate_facets(n->vectors, kFormTol);
  return ConeExpr(std::move(n));
}

ConeExpr ConeExpr::second_order(int dim, std::optional<Matrix> rotation) {
  if (dim <= 0) throw Error(Errc::invalid_argument, "dimension must be positive");
  if (rotation) {
    if (rotation->rows() != dim || rotation->cols() != dim) {
      throw Error(Errc::dimension_mismatch, "rotation must be " + std::to_string(dim) + "x" + std::to_string(dim));
    }
    if (!rotation->allFinite() ||
        (rotation->transpose() * *rotation - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-9) {
      throw Error(Errc::invalid_argument, "rotation is not orthogonal");
    }
  }
  auto n = std::make_shared<Node>();
  n->kind = ConeKind::second_order;
  n->dim = dim;
  n->vectors = Matrix(dim, 0);
  n->rotation = std::move(rotation);
  return ConeExpr(std::move(n));
}

ConeExpr ConeExpr::neg_node(const ConeExpr& inner) {
  auto n = std::make_shared<Node>();
  n->kind = ConeKind::neg;
  n->dim = inner.dim();
  n->vectors = Matrix(n->dim, 0);
  n->children = {inner};
  return ConeExpr(std::move(n));
}

ConeExpr ConeExpr::polar_node(const ConeExpr& inner) {
  auto n = std::make_shared<Node>();
  n->kind = ConeKind::polar;
  n->dim = inner.dim();
  n->vectors = Matrix(n->dim, 0);
  n->children = {inner};
  return ConeExpr(std::move(n));
}

ConeExpr ConeExpr::intersect_node(std::vector<ConeExpr> parts) {
  if (parts.empty()) throw Error(Errc::invalid_argument, "intersection of no cones");
  for (const ConeExpr& p : parts) require_same_dim(parts.front(), p);
  auto n = std::make_shared<Node>();
  n->kind = ConeKind::intersect;
  n->dim = parts.front().dim();
  n->vectors = Matrix(n->dim, 0);
  n->children = std::move(parts);
  return ConeExpr(std::move(n));
}

ConeKind ConeExpr::kind() const { return node_->kind; }
int ConeExpr::dim() const { return node_->dim; }

bool ConeExpr::is_atom() const {
  return kind() != ConeKind::neg && kind() != ConeKind::polar && kind() != ConeKind::intersect;
}

const Matrix& ConeExpr::vectors() const { return node_->vectors; }
std::vector<Point> ConeExpr::vector_list() const { return columns(node_->vectors); }
const std::optional<Matrix>& ConeExpr::rotation() const { return node_->rotation; }

Matrix ConeExpr::rotation_or_identity() const {
  if (node_->rotation) return *node_->rotation;
  return Matrix::Identity(dim(), dim());
}

const ConeExpr& ConeExpr::inner() const {
  if (kind() != ConeKind::neg && kind() != ConeKind::polar) {
    throw Error(Errc::invalid_argument, std::string("inner() on a ") + to_string(kind()) + " node");
  }
  return node_->children.front();
}

const std::vector<ConeExpr>& ConeExpr::parts() const {
  if (kind() != ConeKind::intersect) {
    throw Error(Errc::invalid_argument, std::string("parts() on a ") + to_string(kind()) + " node");
  }
  return node_->children;
}

const detail::Facets* ConeExpr::facets() const { return node_->facets ? &*node_->facets : nullptr; }

const detail::ConstraintForm* ConeExpr::constraint_form() const {
  std::call_once(node_->form_once, [this] { node_->form = build_form(*this); });
  return node_->form ? &*node_->form : nullptr;
}

std::optional<std::vector<Point>> ConeExpr::generator_list() const {
  switch (kind()) {
    case ConeKind::zero:
      return std::vector<Point>{};
    case ConeKind::ray:
    case ConeKind::generated:
      return vector_list();
    case ConeKind::subspace: {
      std::vector<Point> out = vector_list();
      for (Eigen::Index j = 0; j < vectors().cols(); ++j) out.emplace_back(-vectors().col(j));
      return out;
    }
    case ConeKind::halfspace: {
      const detail::Facets* f = facets();
      if (!f) return std::nullopt;
      const Matrix lin = detail::orthogonal_complement(f->span, dim());
      return columns(hstack(hstack(f->normals, lin), -lin));
    }
    case ConeKind::second_order:
      return std::nullopt;
    default:
      break;
  }
  const detail::ConstraintForm* f = constraint_form();
  if (!f || !f->polyhedral()) return std::nullopt;
  return constraint_generators(f->eq_basis, f->normals, dim());
}

std::vector<Point> ConeExpr::seed_directions() const {
  if (auto g = generator_list()) return *g;
  if (kind() == ConeKind::second_order) return {Point(rotation_or_identity().col(dim() - 1))};
  if (kind() == ConeKind::neg && inner().kind() == ConeKind::second_order) {
    return {Point(-inner().rotation_or_identity().col(dim() - 1))};
  }
  return {};
}

bool operator==(const ConeExpr& a, const ConeExpr& b) { return structurally_equal(a, b); }

ConeExpr make_ray(const Point& d, double tol_zero) { return ConeExpr::ray(d, tol_zero); }

ConeExpr polar(const ConeExpr& k) {
  switch (k.kind()) {
    case ConeKind::zero:
      return ConeExpr::full_space(k.dim());
    case ConeKind::ray:
    case ConeKind::generated:
      return ConeExpr::halfspace(k.vector_list());
    case ConeKind::halfspace:
      if (k.vectors().cols() == 1) return ConeExpr::ray(k.vectors().col(0));
      return ConeExpr::generated(k.vector_list());
    case ConeKind::subspace: {
      const Matrix perp = detail::orthogonal_complement(k.vectors(), k.dim());
      if (perp.cols() == 0) return ConeExpr::zero(k.dim());
      return ConeExpr::subspace(k.dim(), columns(perp));
    }
    case ConeKind::second_order:
      return ConeExpr::neg_node(k);
    case ConeKind::neg:
      return negate(polar(k.inner()));
    case ConeKind::polar:
      return k.inner();
    case ConeKind::intersect:
      return ConeExpr::polar_node(k);
  }
  return ConeExpr::polar_node(k);
}

ConeExpr dual(const ConeExpr& k) { return negate(polar(k)); }

ConeExpr negate(const ConeExpr& k) {
  auto flipped = [&k] {
    std::vector<Point> out = k.vector_list();
    for (Point& p : out) p = -p;
    return out;
  };
  switch (k.kind()) {
    case ConeKind::zero:
    case ConeKind::subspace:
      return k;
    case ConeKind::ray:
      return ConeExpr::ray(-k.vectors().col(0));
    case ConeKind::generated:
      return ConeExpr::generated(flipped());
    case ConeKind::halfspace:
      return ConeExpr::halfspace(flipped());
    case ConeKind::second_order:
      return ConeExpr::neg_node(k);
    case ConeKind::neg:
      return k.inner();
    case ConeKind::polar:
      return ConeExpr::polar_node(negate(k.inner()));
    case ConeKind::intersect: {
      std::vector<ConeExpr> parts;
      for (const ConeExpr& p : k.parts()) parts.push_back(negate(p));
      return ConeExpr::intersect_node(std::move(parts));
    }
  }
  return ConeExpr::neg_node(k);
}

ConeExpr intersect(const std::vector<ConeExpr>& parts) {
  if (parts.empty()) throw Error(Errc::invalid_argument, "intersection of no cones");
  std::vector<ConeExpr> flat;
  for (const ConeExpr& p : parts) {
    require_same_dim(parts.front(), p);
    if (p.kind() == ConeKind::intersect) {
      flat.insert(flat.end(), p.parts().begin(), p.parts().end());
    } else {
      flat.push_back(p);
    }
  }
  if (flat.size() == 1) return flat.front();
  return ConeExpr::intersect_node(std::move(flat));
}

ConeExpr simplify(const ConeExpr& k, double tol) {
  if (k.is_atom()) return k;
  const detail::ConstraintForm* f = k.constraint_form();
  if (!f || !f->polyhedral()) return k;
  const int d = k.dim();
  const auto m = f->eq_basis.cols();
  if (m == 0) return ConeExpr::zero(d);
  if (f->local_normals.cols() == 0) {
    if (m == d) return ConeExpr::full_space(d);
    return ConeExpr::subspace(d, columns(f->eq_basis));
  }
  if (m == 1) {
    const bool pos = (f->local_normals.array() > tol).any();
    const bool neg = (f->local_normals.array() < -tol).any();
    if (pos && neg) return ConeExpr::zero(d);
    const Point b = f->eq_basis.col(0);
    return ConeExpr::ray(pos ? Point(-b) : b);
  }
  const Matrix perp = detail::orthogonal_complement(f->eq_basis, d);
  return ConeExpr::halfspace(columns(hstack(hstack(f->normals, perp), -perp)));
}

bool member(const ConeExpr& k, const Point& x, double tol) {
  require_same_dim(k, x);
  const double s = std::max(1.0, x.norm());
  switch (k.kind()) {
    case ConeKind::zero:
      return x.norm() <= tol * s;
    case ConeKind::ray: {
      const Point u = k.vectors().col(0);
      const double lambda = u.dot(x);
      return lambda >= -tol * s && (x - lambda * u).norm() <= tol * s;
    }
    case ConeKind::subspace:
      return (x - k.vectors() * (k.vectors().transpose() * x)).norm() <= tol * s;
    case ConeKind::halfspace:
      return (k.vectors().transpose() * x).maxCoeff() <= tol * s;
    case ConeKind::second_order: {
      const Point r = k.rotation() ? Point(k.rotation()->transpose() * x) : x;
      return r.head(r.size() - 1).norm() <= r(r.size() - 1) + tol * s;
    }
    case ConeKind::generated: {
      if (const detail::Facets* f = k.facets()) {
        if ((x - f->span * (f->span.transpose() * x)).norm() > tol * s) return false;
        return f->normals.cols() == 0 || (f->normals.transpose() * x).maxCoeff() <= tol * s;
      }
      break;
    }
    default:
      break;
  }
  return distance(k, x) <= tol * s;
}

double trivial_probe(const ConeExpr& k, const ToleranceConfig& cfg) {
  // Any unit v in K has <s e_i, v> >= 1/sqrt(d) for some i and sign s, and
  // |P_K(s e_i)| >= <P_K(s e_i), v> >= <s e_i, v>. So the probe is 0 for {0}
  // and at least 1/sqrt(d) otherwise.
  const int d = k.dim();
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    for (double sign : {1.0, -1.0}) {
      worst = std::max(worst, project(k, sign * Point::Unit(d, i), cfg).norm());
    }
  }
  return worst;
}

bool is_trivial(const ConeExpr& k, const ToleranceConfig& cfg) {
  switch (k.kind()) {
    case ConeKind::zero:
      return true;
    case ConeKind::ray:
    case ConeKind::generated:
    case ConeKind::second_order:
      return false;
    case ConeKind::subspace:
      return k.vectors().cols() == 0;
    default:
      break;
  }
  return trivial_probe(k, cfg) < 0.5 / std::sqrt(static_cast<double>(k.dim()));
}

namespace {

// Every column of `a` has its negative in cone(a).
bool columns_cancel(const Matrix& a, double tol) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const Point target = -a.col(j);
    const NnlsResult r = nnls(a, target, 1e-14, 100000);
    if ((r.fit - target).norm() > tol * std::max(1.0, target.norm())) return false;
  }
  return true;
}

}  // namespace

bool is_linear_subspace(const ConeExpr& k, const ToleranceConfig& cfg) {
  switch (k.kind()) {
    case ConeKind::zero:
    case ConeKind::subspace:
      return true;
    case ConeKind::ray:
    case ConeKind::second_order:
      return false;
    case ConeKind::generated:
    case ConeKind::halfspace:
      // {x : A^T x <= 0} is a subspace iff cone(A) is.
      return columns_cancel(k.vectors(), cfg.tol_feas);
    case ConeKind::neg:
    case ConeKind::polar:
      return is_linear_subspace(k.inner(), cfg);
    case ConeKind::intersect:
      break;
  }
  if (const detail::ConstraintForm* f = k.constraint_form()) {
    if (f->eq_basis.cols() == 0) return true;
    if (f->polyhedral()) return columns_cancel(f->local_normals, cfg.tol_feas);
    // A second-order cone is pointed, and so is anything inside it.
    return is_trivial(k, cfg);
  }
  if (k.dim() > 4) {
    throw Error(Errc::unsupported_dimension, "subspace test by probing needs dim <= 4");
  }
  // K is a subspace iff -P_K(v) in K for every probe v (P_K(+-e_i) generate K
  // only approximately, so probe a sphere grid as well).
  const int d = k.dim();
  std::vector<Point> probes;
  for (int i = 0; i < d; ++i) {
    probes.emplace_back(Point::Unit(d, i));
    probes.emplace_back(-Point::Unit(d, i));
  }
  const int n = 64;
  for (int i = 0; i < n; ++i) {
    Point v(d);
    for (int j = 0; j < d; ++j) v(j) = std::cos(1.0 + 2.399963 * i * (j + 1)) + 0.1 * j;
    probes.push_back(v.normalized());
  }
  for (const Point& v : probes) {
    const Point p = project(k, v, cfg);
    if (p.norm() <= cfg.tol_feas) continue;
    if (!member(k, -p, 1e-6)) return false;
  }
  return true;
}

void require_same_dim(const ConeExpr& k, const Point& x) {
  if (k.dim() != x.size()) {
    throw Error(Errc::dimension_mismatch,
                "cone has dimension " + std::to_string(k.dim()) + ", point has " + std::to_string(x.size()));
  }
}

void require_same_dim(const ConeExpr& a, const ConeExpr& b) {
  if (a.dim() != b.dim()) {
    throw Error(Errc::dimension_mismatch,
                "cones have dimensions " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
  }
}

}  // namespace conangle
