#include "conangle/nnls.hpp"

#include <algorithm>
#include <vector>

#include "conangle/error.hpp"

namespace conangle {

namespace {

Eigen::VectorXd solve_passive(const Matrix& a, const Point& b, const std::vector<Eigen::Index>& passive) {
  Matrix sub(a.rows(), static_cast<Eigen::Index>(passive.size()));
  for (std::size_t k = 0; k < passive.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(passive[k]);
  return sub.colPivHouseholderQr().solve(b);
}

}  // namespace

NnlsResult nnls(const Matrix& a, const Point& b, double tol, int max_iters) {
  const Eigen::Index n = a.cols();
  NnlsResult out{Eigen::VectorXd::Zero(n), Point::Zero(a.rows()), 0};
  if (n == 0) return out;

  const double dual_tol = tol * (1.0 + b.norm());
  std::vector<bool> passive_flag(static_cast<std::size_t>(n), false);
  std::vector<bool> rejected(static_cast<std::size_t>(n), false);
  Eigen::VectorXd& x = out.coeffs;

  while (true) {
    const Eigen::VectorXd dual = a.transpose() * (b - a * x);
    const bool bland = out.iterations > 2 * n;
    Eigen::Index enter = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (passive_flag[ui] || rejected[ui] || dual(i) <= dual_tol) continue;
      if (enter < 0 || (!bland && dual(i) > dual(enter))) enter = i;
      if (bland) break;
    }
    if (enter < 0) break;
    passive_flag[static_cast<std::size_t>(enter)] = true;

    bool first = true;
    while (true) {
      if (++out.iterations > max_iters) {
        throw Error(Errc::iteration_limit, "nonnegative least squares did not terminate");
      }
      std::vector<Eigen::Index> passive;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (passive_flag[static_cast<std::size_t>(i)]) passive.push_back(i);
      }
      const Eigen::VectorXd z = solve_passive(a, b, passive);

      if (first) {
        first = false;
        const auto pos = std::find(passive.begin(), passive.end(), enter) - passive.begin();
        if (z(pos) <= 0.0) {
          // Positive dual value was rounding noise; skip this column until x moves.
          passive_flag[static_cast<std::size_t>(enter)] = false;
          rejected[static_cast<std::size_t>(enter)] = true;
          break;
        }
      }

      if ((z.array() > 0.0).all()) {
        x.setZero();
        for (std::size_t k = 0; k < passive.size(); ++k) x(passive[k]) = z(static_cast<Eigen::Index>(k));
        std::fill(rejected.begin(), rejected.end(), false);
        break;
      }

      double alpha = 1.0;
      Eigen::Index blocking = -1;
      for (std::size_t k = 0; k < passive.size(); ++k) {
        const double zk = z(static_cast<Eigen::Index>(k));
        const double xk = x(passive[k]);
        if (zk <= 0.0 && xk / (xk - zk) <= alpha) {
          alpha = xk / (xk - zk);
          blocking = passive[k];
        }
      }
      for (std::size_t k = 0; k < passive.size(); ++k) {
        const Eigen::Index i = passive[k];
        x(i) += alpha * (z(static_cast<Eigen::Index>(k)) - x(i));
      }
      if (blocking >= 0) x(blocking) = 0.0;
      // Columns that reached zero leave the passive set.
      for (std::size_t k = 0; k < passive.size(); ++k) {
        const Eigen::Index i = passive[k];
        if (x(i) <= 1e-15 * (1.0 + x.cwiseAbs().maxCoeff())) {
          x(i) = 0.0;
          passive_flag[static_cast<std::size_t>(i)] = false;
        }
      }
      std::fill(rejected.begin(), rejected.end(), false);
    }
  }

  out.fit = a * x;
  return out;
}

}  // namespace conangle
