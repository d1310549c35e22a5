#pragma once

#include <Eigen/Dense>

namespace rhobound {

struct EigExtremes {
  double min;
  double max;
};

// Rejects (NumericError) anything that is not square, finite, and symmetric
// to 1e-12 relative to the largest entry magnitude.
void require_symmetric(const Eigen::MatrixXd& m);

// Smallest and largest eigenvalue of a symmetric matrix.
EigExtremes eig_extremes(const Eigen::MatrixXd& m);

// Symmetric inverse square root. The matrix counts as positive definite when
// lambda_min > dim * 1e-12 * lambda_max; otherwise SingularMatrixError
// (carrying lambda_min) is thrown.
Eigen::MatrixXd inv_sqrt(const Eigen::MatrixXd& m);

// Symmetric square root, same definiteness contract as inv_sqrt.
Eigen::MatrixXd sqrt_spd(const Eigen::MatrixXd& m);

// (beta' Sigma beta)^{1/2}.
double sigma_norm(const Eigen::VectorXd& beta, const Eigen::MatrixXd& sigma);

}  // namespace rhobound
