#include "qp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace reluexact::detail {

namespace {

Eigen::MatrixXd to_matrix(const std::vector<std::vector<double>>& rows, std::size_t cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

// Minimum-norm least-squares solution of M q = r, treating singular values
// below `cutoff` as zero. Eigen's own thresholds are relative to the largest
// singular value, which misreads a matrix that is zero up to rounding.
Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& M, const Eigen::VectorXd& r, double cutoff) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  Eigen::VectorXd coef = svd.matrixU().transpose() * r;
  for (Eigen::Index i = 0; i < sv.size(); ++i) coef(i) = sv(i) > cutoff ? coef(i) / sv(i) : 0.0;
  return svd.matrixV() * coef;
}

}  // namespace

LsqResult constrained_least_squares(const std::vector<std::vector<double>>& A_rows, const std::vector<double>& y_in,
                                    const std::vector<std::vector<double>>& G_rows, std::size_t num_vars, double tol,
                                    std::size_t max_iterations) {
  const auto N = static_cast<Eigen::Index>(num_vars);
  const Eigen::MatrixXd A = to_matrix(A_rows, num_vars);
  const Eigen::MatrixXd G = to_matrix(G_rows, num_vars);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(y_in.data(), static_cast<Eigen::Index>(y_in.size()));
  const Eigen::Index m = G.rows();

  Eigen::VectorXd z = Eigen::VectorXd::Zero(N);
  std::vector<Eigen::Index> working;  // kept sorted
  std::vector<char> in_working(static_cast<std::size_t>(m), 0);
  const double scale = 1.0 + (A.size() ? A.cwiseAbs().maxCoeff() : 0.0) + (y.size() ? y.cwiseAbs().maxCoeff() : 0.0);
  const double g_scale = 1.0 + (G.size() ? G.cwiseAbs().maxCoeff() : 0.0);

  LsqResult out;
  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    out.iterations = iter + 1;
    const Eigen::VectorXd r = y - A * z;

    Eigen::MatrixXd basis;
    if (working.empty()) {
      basis = Eigen::MatrixXd::Identity(N, N);
    } else {
      Eigen::MatrixXd GW(static_cast<Eigen::Index>(working.size()), N);
      for (std::size_t i = 0; i < working.size(); ++i) GW.row(static_cast<Eigen::Index>(i)) = G.row(working[i]);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(GW, Eigen::ComputeFullV);
      svd.setThreshold(1e-12);
      const Eigen::Index rank = svd.rank();
      basis = svd.matrixV().rightCols(N - rank);
    }

    Eigen::VectorXd p = Eigen::VectorXd::Zero(N);
    if (basis.cols() > 0) {
      p = basis * pinv_solve(A * basis, r, 1e-11 * scale);
      // Only a step that lowers the objective counts as a move.
      if ((A * p).squaredNorm() <= 1e-28 * scale * scale) p.setZero();
    }

    if (p.norm() <= 1e-13 * (1.0 + z.norm())) {
      if (working.empty()) {
        out.converged = true;
        break;
      }
      const Eigen::VectorXd grad = A.transpose() * (A * z - y);
      Eigen::MatrixXd GWt(N, static_cast<Eigen::Index>(working.size()));
      for (std::size_t i = 0; i < working.size(); ++i) GWt.col(static_cast<Eigen::Index>(i)) = G.row(working[i]).transpose();
      const Eigen::VectorXd lambda = pinv_solve(GWt, -grad, 1e-11 * g_scale);
      const double threshold = -tol * (1.0 + grad.cwiseAbs().maxCoeff());
      std::size_t drop = working.size();
      for (std::size_t i = 0; i < working.size(); ++i) {
        if (lambda(static_cast<Eigen::Index>(i)) < threshold) {
          drop = i;
          break;
        }
      }
      if (drop == working.size()) {
        out.converged = true;
        break;
      }
      in_working[static_cast<std::size_t>(working[drop])] = 0;
      working.erase(working.begin() + static_cast<std::ptrdiff_t>(drop));
      continue;
    }

    double alpha = 1.0;
    Eigen::Index blocking = -1;
    for (Eigen::Index k = 0; k < m; ++k) {
      if (in_working[static_cast<std::size_t>(k)]) continue;
      const double gp = G.row(k).dot(p);
      if (gp <= 1e-14 * (1.0 + G.row(k).norm() * p.norm())) continue;
      const double ratio = std::max(0.0, -G.row(k).dot(z) / gp);
      if (ratio < alpha) {
        alpha = ratio;
        blocking = k;
      }
    }
    z += alpha * p;
    if (blocking >= 0) {
      in_working[static_cast<std::size_t>(blocking)] = 1;
      working.insert(std::upper_bound(working.begin(), working.end(), blocking), blocking);
    }
  }

  out.z.assign(z.data(), z.data() + N);
  out.objective = (A * z - y).squaredNorm();
  return out;
}

}  // namespace reluexact::detail
