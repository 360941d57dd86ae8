#include "detail/constraint_form.hpp"

#include <cmath>
#include <limits>

#include "conangle/nnls.hpp"
#include "detail/linalg.hpp"

namespace conangle::detail {

namespace {

constexpr int kMaxSocInequalities = 10;
constexpr int kBisectionSteps = 200;

bool inside_soc(const Matrix& rotation, const Point& x, double tol) {
  const Point r = rotation.transpose() * x;
  const auto d = r.size();
  return r.head(d - 1).norm() <= r(d - 1) + tol * (1e-300 + x.norm());
}

}  // namespace

SocSlice make_soc_slice(const Matrix& rotation, const Matrix& basis, double tol) {
  SocSlice s;
  s.rotation = rotation;
  const auto d = rotation.rows();
  const Eigen::Index m = basis.cols();
  if (m == 0) return s;

  const Point axis = rotation.col(d - 1);
  const Matrix local = rotation.transpose() * basis;  // d x m
  const Matrix q = local.topRows(d - 1).transpose() * local.topRows(d - 1) -
                   local.row(d - 1).transpose() * local.row(d - 1);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(q);
  Eigen::VectorXd lambda = eig.eigenvalues();
  const Matrix& u = eig.eigenvectors();

  if (lambda(0) < -tol && m >= 2) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (std::abs(lambda(i)) <= tol) lambda(i) = 0.0;
    }
    s.mode = SocSlice::Mode::quadratic;
    s.basis = basis;
    s.eigvecs = u;
    s.eigvals = lambda;
    s.negative = 0;
    return s;
  }

  Matrix null_basis;
  if (lambda(0) < -tol) {
    // A line through the interior of the cone: one half of it survives.
    null_basis = basis;
  } else {
    // Positive semidefinite restriction: only the null directions of the form
    // can satisfy |z| <= t, and there |z| = |t|.
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (std::abs(lambda(i)) <= tol) keep.push_back(i);
    }
    null_basis.resize(d, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) null_basis.col(static_cast<Eigen::Index>(k)) = basis * u.col(keep[k]);
  }
  if (null_basis.cols() == 0) return s;
  const Point projected_axis = null_basis * (null_basis.transpose() * axis);
  if (projected_axis.norm() <= tol) return s;
  s.mode = SocSlice::Mode::half_subspace;
  s.basis = null_basis;
  s.axis = projected_axis;
  return s;
}

Point SocSlice::project(const Point& x) const {
  const auto d = x.size();
  switch (mode) {
    case Mode::zero:
      return Point::Zero(d);
    case Mode::half_subspace: {
      Point y = basis * (basis.transpose() * x);
      const double s = axis.dot(y);
      if (s >= 0.0) return y;
      return y - (s / axis.squaredNorm()) * axis;
    }
    case Mode::quadratic:
      break;
  }

  const Eigen::VectorXd c0 = basis.transpose() * x;
  if (inside_soc(rotation, basis * c0, 1e-14)) return basis * c0;

  const Eigen::VectorXd w = eigvecs.transpose() * c0;
  const Eigen::Index m = w.size();
  const double lam_n = eigvals(negative);

  Eigen::VectorXd best = Eigen::VectorXd::Zero(m);
  double best_dist = c0.norm();
  auto consider = [&](const Eigen::VectorXd& coeffs) {
    const Eigen::VectorXd c = eigvecs * coeffs;
    if (!c.allFinite()) return;
    if (!inside_soc(rotation, basis * c, 1e-9)) return;
    const double dist = (c - c0).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = c;
    }
  };

  // Stationary points c = (I + mu Q)^{-1} c0 with c^T Q c = 0, mu >= 0.
  // Below the pole mu_p = -1/lambda_n the secular function decreases in mu.
  auto secular_mu = [&](double mu) {
    double g = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double den = 1.0 + mu * eigvals(i);
      g += eigvals(i) * w(i) * w(i) / (den * den);
    }
    return g;
  };
  auto coeffs_mu = [&](double mu) {
    Eigen::VectorXd k(m);
    for (Eigen::Index i = 0; i < m; ++i) k(i) = w(i) / (1.0 + mu * eigvals(i));
    return k;
  };
  const double pole = -1.0 / lam_n;
  if (secular_mu(0.0) > 0.0) {
    double lo = 0.0;
    double hi = pole;
    if (secular_mu(std::nextafter(hi, 0.0)) < 0.0) {
      for (int it = 0; it < kBisectionSteps; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (secular_mu(mid) > 0.0 ? lo : hi) = mid;
      }
      consider(coeffs_mu(0.5 * (lo + hi)));
    }
  }

  // Above the pole, substitute sigma = 1/mu in (0, -lambda_n); the rescaled
  // secular function decreases in sigma there.
  auto secular_sigma = [&](double sigma) {
    double g = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (eigvals(i) == 0.0) continue;
      const double den = sigma + eigvals(i);
      g += eigvals(i) * w(i) * w(i) / (den * den);
    }
    return g;
  };
  auto coeffs_sigma = [&](double sigma) {
    Eigen::VectorXd k(m);
    for (Eigen::Index i = 0; i < m; ++i) k(i) = sigma * w(i) / (sigma + eigvals(i));
    return k;
  };
  {
    double at_zero = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (eigvals(i) != 0.0) at_zero += w(i) * w(i) / eigvals(i);
    }
    const double top = -lam_n;
    if (at_zero > 0.0 && secular_sigma(std::nextafter(top, 0.0)) < 0.0) {
      double lo = 0.0;
      double hi = top;
      for (int it = 0; it < kBisectionSteps; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (secular_sigma(mid) > 0.0 ? lo : hi) = mid;
      }
      consider(coeffs_sigma(0.5 * (lo + hi)));
    }
  }

  // At the pole itself the negative direction is free.
  if (std::abs(w(negative)) <= 1e-12 * (1.0 + w.norm())) {
    Eigen::VectorXd k = coeffs_mu(pole);
    double sq = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (i == negative) continue;
      sq += eigvals(i) * k(i) * k(i);
    }
    sq = -sq / lam_n;
    if (sq >= 0.0) {
      for (double sign : {1.0, -1.0}) {
        k(negative) = sign * std::sqrt(sq);
        consider(k);
      }
    }
  }

  return basis * best;
}

std::optional<ConstraintForm> finalize_form(Matrix eq_basis, Matrix normals, std::optional<Matrix> soc,
                                            double tol) {
  const auto d = eq_basis.rows();
  // Unit normals only; zero columns carry no constraint.
  {
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < normals.cols(); ++j) {
      if (normals.col(j).norm() > tol) keep.push_back(j);
    }
    Matrix unit(d, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
      unit.col(static_cast<Eigen::Index>(k)) = normals.col(keep[k]).normalized();
    }
    normals = std::move(unit);
  }

  if (soc) {
    const SocSlice slice = make_soc_slice(*soc, eq_basis, tol);
    if (slice.mode == SocSlice::Mode::zero) {
      eq_basis = Matrix(d, 0);
      soc.reset();
    } else if (slice.mode == SocSlice::Mode::half_subspace) {
      eq_basis = slice.basis;
      normals.conservativeResize(d, normals.cols() + 1);
      normals.col(normals.cols() - 1) = -slice.axis.normalized();
      soc.reset();
    }
  }

  ConstraintForm form;
  form.eq_basis = std::move(eq_basis);
  form.normals = std::move(normals);
  form.soc = std::move(soc);

  const Matrix local = form.eq_basis.transpose() * form.normals;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < local.cols(); ++j) {
    if (local.col(j).norm() > tol) keep.push_back(j);
  }
  form.local_normals.resize(form.eq_basis.cols(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    form.local_normals.col(static_cast<Eigen::Index>(k)) = local.col(keep[k]).normalized();
  }

  if (form.soc) {
    const auto k = static_cast<int>(keep.size());
    if (k > kMaxSocInequalities) return std::nullopt;
    for (int mask = 0; mask < (1 << k); ++mask) {
      std::vector<int> subset;
      Matrix active(d, 0);
      for (int j = 0; j < k; ++j) {
        if (mask & (1 << j)) {
          subset.push_back(j);
          active.conservativeResize(d, active.cols() + 1);
          active.col(active.cols() - 1) = form.normals.col(keep[static_cast<std::size_t>(j)]);
        }
      }
      const Matrix face = restrict_orthogonal(form.eq_basis, active, tol);
      form.slices.push_back(make_soc_slice(*form.soc, face, tol));
      form.subsets.push_back(std::move(subset));
    }
  }
  return form;
}

Point project_form(const ConstraintForm& form, const Point& x, double tol) {
  const auto d = x.size();
  if (form.eq_basis.cols() == 0) return Point::Zero(d);

  if (form.polyhedral()) {
    const Eigen::VectorXd c = form.eq_basis.transpose() * x;
    if (form.local_normals.cols() == 0) return form.eq_basis * c;
    // Moreau in V: the polar of {c : <a_i, c> <= 0} is cone(a_i).
    const Eigen::VectorXd q = nnls(form.local_normals, c, tol, 10000).fit;
    return form.eq_basis * (c - q);
  }

  // The projection lies on the face cut out by its active inequalities, so
  // the closest feasible face candidate is the projection.
  Point best = Point::Zero(d);
  double best_dist = x.norm();
  const double slack = 1e-10 * (1.0 + x.norm());
  for (const SocSlice& slice : form.slices) {
    const Point p = slice.project(x);
    if (form.normals.cols() > 0 && (form.normals.transpose() * p).maxCoeff() > slack) continue;
    const double dist = (x - p).norm();
    if (dist < best_dist) {
      best_dist = dist;
      best = p;
    }
  }
  return best;
}

}  // namespace conangle::detail
