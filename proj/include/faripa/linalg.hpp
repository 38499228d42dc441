#ifndef FARIPA_LINALG_HPP
#define FARIPA_LINALG_HPP

#include <Eigen/Dense>

#include "faripa/rng.hpp"

namespace faripa {

/**
 * Haar-distributed random orthogonal matrix: QR of a matrix with i.i.d.
 * standard normal entries (filled row-major from `rng`), with the signs of
 * R's diagonal folded into Q.
 */
Eigen::MatrixXd random_orthogonal_matrix(int dim, Rng& rng);

/// Symmetric inverse square root via eigendecomposition, eigenvalues
/// floored at `floor_eig` before inversion.
Eigen::MatrixXd sym_inverse_sqrt(const Eigen::MatrixXd& m, double floor_eig = 1e-12);

}  // namespace faripa

#endif  // FARIPA_LINALG_HPP
