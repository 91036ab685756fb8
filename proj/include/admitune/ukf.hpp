#pragma once

#include <vector>

#include <Eigen/Dense>

/// Unscented-transform parameter estimation used by the gain tuner. The
/// filter tracks a parameter vector whose "measurement" is a vector of
/// objective values driven toward desired values.
namespace admitune::ukf {

/// Scaled unscented transform parameters.
struct UnscentedParams {
  double alpha = 1e-1;
  double beta = 2.0;
  double kappa = 0.0;
};

struct Weights {
  Eigen::VectorXd mean;        // w^a, sums to one
  Eigen::VectorXd covariance;  // w^c
  double spread = 0.0;         // sqrt(L + lambda)
};

Weights unscented_weights(int dimension, const UnscentedParams& params);

struct SigmaSet {
  std::vector<Eigen::VectorXd> points;  // 2L + 1, center first
  Weights weights;
};

/// Symmetric square root of a covariance after symmetrizing and flooring
/// negative eigenvalues to zero. Throws CovarianceFactorizationError if the
/// matrix is not finite or the eigen-solver fails.
Eigen::MatrixXd covariance_sqrt(const Eigen::MatrixXd& cov);

/// Center point plus mean +/- spread * columns of sqrt(P). Entries below
/// `floor` are projected up to it.
SigmaSet generate_sigma_points(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                               const UnscentedParams& params, double floor);

struct UpdateResult {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd predicted_output;  // y-hat
  Eigen::MatrixXd gain;              // K
};

/// Correction step given the evaluated objectives y^i = h(theta^i):
///   y-hat = sum w^a y^i, S = C_v + sum w^c (y^i - y-hat)(.)^T,
///   C^sz = sum w^c (theta^i - theta-hat)(y^i - y-hat)^T, K = C^sz S^-1,
///   P = C_theta + sum w^c (theta^i - theta-hat)(.)^T - K S K^T,
///   theta = theta-hat + K (y_des - y-hat), projected to `floor`.
/// A singular S gets 1e-9 I added; SingularInnovationError if that fails too.
UpdateResult kalman_update(const SigmaSet& sigma, const std::vector<Eigen::VectorXd>& outputs,
                           const Eigen::VectorXd& desired, const Eigen::MatrixXd& process_cov,
                           const Eigen::MatrixXd& observation_cov, double floor);

}  // namespace admitune::ukf
