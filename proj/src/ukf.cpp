#include "admitune/ukf.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "admitune/errors.hpp"

namespace admitune::ukf {

Weights unscented_weights(int dimension, const UnscentedParams& params) {
  if (dimension < 1) throw std::invalid_argument("unscented_weights: dimension must be >= 1");
  const double n = dimension;
  const double lambda = params.alpha * params.alpha * (n + params.kappa) - n;
  if (!(n + lambda > 0.0)) throw std::invalid_argument("unscented_weights: L + lambda must be positive");

  Weights w;
  w.mean = Eigen::VectorXd::Constant(2 * dimension + 1, 1.0 / (2.0 * (n + lambda)));
  w.covariance = w.mean;
  w.mean[0] = lambda / (n + lambda);
  w.covariance[0] = w.mean[0] + (1.0 - params.alpha * params.alpha + params.beta);
  w.spread = std::sqrt(n + lambda);
  return w;
}

Eigen::MatrixXd covariance_sqrt(const Eigen::MatrixXd& cov) {
  if (!cov.allFinite()) throw CovarianceFactorizationError("covariance has non-finite entries");
  const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw CovarianceFactorizationError("eigen-decomposition failed");
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  Eigen::MatrixXd out = eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
  if (!out.allFinite()) throw CovarianceFactorizationError("covariance square root is not finite");
  return out;
}

namespace {

Eigen::VectorXd project(Eigen::VectorXd v, double floor) { return v.cwiseMax(floor); }

}  // namespace

SigmaSet generate_sigma_points(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                               const UnscentedParams& params, double floor) {
  const auto n = mean.size();
  if (cov.rows() != n || cov.cols() != n) throw std::invalid_argument("generate_sigma_points: size mismatch");

  SigmaSet set;
  set.weights = unscented_weights(static_cast<int>(n), params);
  const Eigen::MatrixXd root = covariance_sqrt(cov);

  set.points.reserve(2 * n + 1);
  set.points.push_back(project(mean, floor));
  for (Eigen::Index j = 0; j < n; ++j) set.points.push_back(project(mean + set.weights.spread * root.col(j), floor));
  for (Eigen::Index j = 0; j < n; ++j) set.points.push_back(project(mean - set.weights.spread * root.col(j), floor));
  return set;
}

namespace {

// Weighted mean accumulated relative to the first element, so that identical
// inputs reproduce it bit-for-bit.
Eigen::VectorXd weighted_mean(const std::vector<Eigen::VectorXd>& xs, const Eigen::VectorXd& w) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(xs.front().size());
  for (std::size_t i = 1; i < xs.size(); ++i) acc += w[static_cast<Eigen::Index>(i)] * (xs[i] - xs.front());
  return xs.front() + acc;
}

Eigen::MatrixXd floor_psd(const Eigen::MatrixXd& p) {
  const Eigen::MatrixXd sym = 0.5 * (p + p.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw CovarianceFactorizationError("eigen-decomposition failed");
  if (eig.eigenvalues().minCoeff() >= 0.0) return sym;
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const Eigen::MatrixXd out = v * eig.eigenvalues().cwiseMax(0.0).asDiagonal() * v.transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace

UpdateResult kalman_update(const SigmaSet& sigma, const std::vector<Eigen::VectorXd>& outputs,
                           const Eigen::VectorXd& desired, const Eigen::MatrixXd& process_cov,
                           const Eigen::MatrixXd& observation_cov, double floor) {
  const auto count = sigma.points.size();
  if (outputs.size() != count || count == 0) {
    throw std::invalid_argument("kalman_update: expected " + std::to_string(count) + " evaluations");
  }
  const auto n = sigma.points.front().size();
  const auto m = outputs.front().size();
  if (desired.size() != m || observation_cov.rows() != m || process_cov.rows() != n) {
    throw std::invalid_argument("kalman_update: dimension mismatch");
  }
  const Eigen::VectorXd& wa = sigma.weights.mean;
  const Eigen::VectorXd& wc = sigma.weights.covariance;

  const Eigen::VectorXd theta_hat = weighted_mean(sigma.points, wa);
  const Eigen::VectorXd y_hat = weighted_mean(outputs, wa);

  Eigen::MatrixXd s = observation_cov;
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(n, m);
  Eigen::MatrixXd p_pred = process_cov;
  for (std::size_t i = 0; i < count; ++i) {
    const Eigen::VectorXd dy = outputs[i] - y_hat;
    const Eigen::VectorXd dth = sigma.points[i] - theta_hat;
    const double w = wc[static_cast<Eigen::Index>(i)];
    s.noalias() += w * dy * dy.transpose();
    cross.noalias() += w * dth * dy.transpose();
    p_pred.noalias() += w * dth * dth.transpose();
  }

  Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
  if (!lu.isInvertible()) {
    s += 1e-9 * Eigen::MatrixXd::Identity(m, m);
    lu.compute(s);
    if (!lu.isInvertible()) throw SingularInnovationError("innovation covariance is singular");
  }
  // K = C^sz S^-1  <=>  S^T K^T = (C^sz)^T
  const Eigen::MatrixXd gain = lu.solve(cross.transpose()).transpose();
  if (!gain.allFinite()) throw SingularInnovationError("Kalman gain is not finite");

  UpdateResult out;
  out.predicted_output = y_hat;
  out.gain = gain;
  // The center point is the prior estimate (after projection).
  out.mean = project(sigma.points.front() + gain * (desired - y_hat), floor);
  out.covariance = floor_psd(p_pred - gain * s * gain.transpose());
  return out;
}

}  // namespace admitune::ukf
