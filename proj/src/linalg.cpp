#include "faripa/linalg.hpp"

#include <cmath>

#include "faripa/types.hpp"

namespace faripa {

Eigen::MatrixXd random_orthogonal_matrix(int dim, Rng& rng) {
  if (dim < 1) throw ConfigError("random_orthogonal_matrix: dim >= 1 required");
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = rng.gaussian();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Folding sign(diag(R)) into Q makes the factorization unique and the
  // distribution Haar.
  for (int j = 0; j < dim; ++j)
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  return q;
}

Eigen::MatrixXd sym_inverse_sqrt(const Eigen::MatrixXd& m, double floor_eig) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    throw NumericError("sym_inverse_sqrt: eigendecomposition failed");
  Eigen::VectorXd inv = es.eigenvalues();
  for (int i = 0; i < inv.size(); ++i)
    inv(i) = 1.0 / std::sqrt(std::max(inv(i), floor_eig));
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace faripa
