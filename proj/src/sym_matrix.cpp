#include "rhobound/sym_matrix.hpp"

#include <cmath>

#include "rhobound/errors.hpp"

namespace rhobound {

namespace {

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve_checked(const Eigen::MatrixXd& m) {
  require_symmetric(m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) {
    throw NumericError("eigendecomposition did not converge");
  }
  return es;
}

}  // namespace

void require_symmetric(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw NumericError("matrix must be square and non-empty");
  }
  if (!m.allFinite()) {
    throw NumericError("matrix has non-finite entries");
  }
  double scale = m.cwiseAbs().maxCoeff();
  double skew = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (skew > 1e-12 * std::fmax(1.0, scale)) {
    throw NumericError("matrix is not symmetric");
  }
}

EigExtremes eig_extremes(const Eigen::MatrixXd& m) {
  auto es = solve_checked(m);
  const auto& ev = es.eigenvalues();
  return {ev(0), ev(ev.size() - 1)};
}

Eigen::MatrixXd inv_sqrt(const Eigen::MatrixXd& m) {
  auto es = solve_checked(m);
  const auto& ev = es.eigenvalues();
  double lo = ev(0);
  double hi = ev(ev.size() - 1);
  if (!(lo > static_cast<double>(m.rows()) * 1e-12 * hi) || !(hi > 0.0)) {
    throw SingularMatrixError("matrix is numerically singular or indefinite", lo);
  }
  Eigen::VectorXd inv_root = ev.array().rsqrt();
  return es.eigenvectors() * inv_root.asDiagonal() * es.eigenvectors().transpose();
}

Eigen::MatrixXd sqrt_spd(const Eigen::MatrixXd& m) {
  auto es = solve_checked(m);
  const auto& ev = es.eigenvalues();
  double lo = ev(0);
  double hi = ev(ev.size() - 1);
  if (!(lo > static_cast<double>(m.rows()) * 1e-12 * hi) || !(hi > 0.0)) {
    throw SingularMatrixError("matrix is numerically singular or indefinite", lo);
  }
  Eigen::VectorXd root = ev.array().sqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

double sigma_norm(const Eigen::VectorXd& beta, const Eigen::MatrixXd& sigma) {
  if (sigma.rows() != sigma.cols() || beta.size() != sigma.rows()) {
    throw NumericError("sigma_norm: dimension mismatch");
  }
  double q = beta.dot(sigma * beta);
  return std::sqrt(std::fmax(q, 0.0));
}

}  // namespace rhobound
