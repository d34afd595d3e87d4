#include "spdc/fit.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "spdc/error.hpp"
#include "spdc/io.hpp"

namespace spdc {

namespace {

constexpr int kMaxIterations = 500;

struct Model {
  const std::vector<ScanSample>& samples;

  // Residuals log K_model - log K and the Jacobian in (log alpha, log beta).
  double evaluate(const Eigen::Vector2d& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) const {
    const double alpha = std::exp(x[0]);
    const auto m = static_cast<Eigen::Index>(samples.size());
    r.resize(m);
    if (jac) jac->resize(m, 2);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double y = samples[i].b_sigma * alpha;
      r[i] = x[1] - std::log(4.0) + 2.0 * std::log(y + 1.0 / y) - std::log(samples[i].k);
      if (jac) {
        (*jac)(i, 0) = 2.0 * (y * y - 1.0) / (y * y + 1.0);
        (*jac)(i, 1) = 1.0;
      }
    }
    return r.squaredNorm();
  }
};

}  // namespace

RescalingFit fit_rescaling(const std::vector<ScanSample>& samples, double small_limit) {
  if (samples.size() < 4) throw DomainError("rescaling fit needs at least four samples");
  double lo = samples.front().b_sigma, hi = lo;
  for (const auto& s : samples) {
    if (!(s.b_sigma > 0.0) || !(s.k > 0.0)) throw DomainError("fit samples must be positive");
    lo = std::min(lo, s.b_sigma);
    hi = std::max(hi, s.b_sigma);
  }
  if (hi < 10.0 * lo) throw DomainError("fit samples must span a decade in b_sigma");

  const Model model{samples};
  Eigen::Vector2d x = Eigen::Vector2d::Zero();
  Eigen::VectorXd r, r_try;
  Eigen::MatrixXd jac;
  double cost = model.evaluate(x, r, &jac);
  double damping = 1e-3;
  std::vector<double> history{cost};

  RescalingFit fit;
  bool converged = false;
  for (int it = 1; it <= kMaxIterations; ++it) {
    const Eigen::Matrix2d jtj = jac.transpose() * jac;
    const Eigen::Vector2d g = jac.transpose() * r;
    if (g.norm() < 1e-15) {
      converged = true;
      fit.iterations = it;
      break;
    }
    Eigen::Matrix2d a = jtj;
    a.diagonal() *= 1.0 + damping;
    const Eigen::Vector2d step = a.ldlt().solve(-g);
    const Eigen::Vector2d x_try = x + step;
    const double cost_try = model.evaluate(x_try, r_try, nullptr);
    if (std::isfinite(cost_try) && cost_try <= cost) {
      x = x_try;
      cost = model.evaluate(x, r, &jac);
      damping = std::max(damping / 10.0, 1e-12);
      history.push_back(cost);
      if (step.norm() < 1e-13 * (1.0 + x.norm())) {
        converged = true;
        fit.iterations = it;
        break;
      }
    } else {
      damping *= 10.0;
      if (damping > 1e12) break;
    }
  }
  if (!converged) {
    std::string trace;
    const std::size_t first = history.size() > 5 ? history.size() - 5 : 0;
    for (std::size_t i = first; i < history.size(); ++i) trace += " " + format_double(history[i]);
    throw FitError("rescaling fit did not converge; last costs:" + trace);
  }
  fit.alpha = std::exp(x[0]);
  fit.beta = std::exp(x[1]);
  fit.residual = std::sqrt(cost / static_cast<double>(samples.size()));

  // log alpha' = mean(-log(2 b sigma) - log(K) / 2) is the exact minimizer.
  double sum = 0.0;
  std::vector<double> terms;
  for (const auto& s : samples) {
    if (s.b_sigma <= small_limit) {
      terms.push_back(-std::log(2.0 * s.b_sigma) - 0.5 * std::log(s.k));
      sum += terms.back();
    }
  }
  fit.small_count = terms.size();
  if (!terms.empty()) {
    const double mean = sum / static_cast<double>(terms.size());
    fit.alpha_prime = std::exp(mean);
    double ss = 0.0;
    for (double t : terms) ss += 4.0 * (t - mean) * (t - mean);
    fit.alpha_prime_residual = std::sqrt(ss / static_cast<double>(terms.size()));
  }
  return fit;
}

double interpolated_minimum(const std::vector<ScanSample>& samples) {
  if (samples.empty()) throw DomainError("no samples");
  const auto best = std::min_element(samples.begin(), samples.end(),
                                     [](const auto& a, const auto& b) { return a.k < b.k; });
  const auto i = static_cast<std::size_t>(best - samples.begin());
  if (i == 0 || i + 1 == samples.size()) return best->b_sigma;
  const double x0 = std::log(samples[i - 1].b_sigma), x1 = std::log(samples[i].b_sigma),
               x2 = std::log(samples[i + 1].b_sigma);
  const double y0 = std::log(samples[i - 1].k), y1 = std::log(samples[i].k),
               y2 = std::log(samples[i + 1].k);
  const double num = (x1 - x0) * (x1 - x0) * (y1 - y2) - (x1 - x2) * (x1 - x2) * (y1 - y0);
  const double den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0);
  if (den == 0.0) return best->b_sigma;
  return std::exp(x1 - 0.5 * num / den);
}

}  // namespace spdc
