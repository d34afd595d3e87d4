#include "spdc/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "spdc/error.hpp"
#include "spdc/io.hpp"

namespace spdc {

namespace {

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c)
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      if (r != c) sum += a(r, c) * a(r, c);
  return std::sqrt(sum);
}

}  // namespace

JacobiResult jacobi_eigen(const Eigen::MatrixXd& input, double rel_tol, int max_sweeps) {
  if (input.rows() != input.cols()) throw ContractError("jacobi_eigen needs a square matrix");
  const Eigen::Index n = input.rows();
  const double scale = input.norm();
  if ((input - input.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1e-300)) {
    throw ContractError("jacobi_eigen needs a symmetric matrix");
  }
  Eigen::MatrixXd a = input;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double threshold = rel_tol * scale;

  JacobiResult result;
  double off = off_diagonal_norm(a);
  while (off > threshold) {
    if (result.sweeps >= max_sweeps) {
      throw NumericalError("Jacobi iteration did not converge: sweeps=" +
                           std::to_string(result.sweeps) + ", off_norm=" + format_double(off) +
                           ", threshold=" + format_double(threshold));
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
    ++result.sweeps;
    off = off_diagonal_norm(a);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });
  result.values.resize(n);
  result.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    result.values[k] = a(order[k], order[k]);
    result.vectors.col(k) = v.col(order[k]);
  }
  result.off_norm = off;
  return result;
}

Eigen::VectorXd singular_values_by_embedding(const Eigen::MatrixXd& f) {
  if (f.rows() != f.cols()) throw ContractError("embedding oracle needs a square matrix");
  const Eigen::Index n = f.rows();
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  big.topRightCorner(n, n) = f;
  big.bottomLeftCorner(n, n) = f.transpose();
  const auto eig = jacobi_eigen(big);
  // The top n eigenvalues are +sigma; clamp round-off on zero singular values.
  return eig.values.head(n).cwiseMax(0.0);
}

}  // namespace spdc
