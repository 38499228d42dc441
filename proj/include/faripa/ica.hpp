#ifndef FARIPA_ICA_HPP
#define FARIPA_ICA_HPP

#include <utility>

#include "faripa/rng.hpp"
#include "faripa/types.hpp"

namespace faripa::ica {

/// Affine whitening transform: z = V (x - mean).
struct WhiteningTransform {
  Eigen::VectorXd mean;
  Eigen::MatrixXd V;
  Eigen::MatrixXd V_inv;
};

/**
 * Centers the series and whitens it via eigendecomposition of the sample
 * covariance (T-1 normalization), so the output has zero mean and identity
 * covariance. Throws DegenerateError when the covariance is rank
 * deficient (smallest eigenvalue <= 1e-12 times the largest).
 */
std::pair<TimeSeries, WhiteningTransform> center_whiten(const TimeSeries& X);

enum class Nonlinearity { Tanh, Cube };

struct IcaResult {
  Eigen::MatrixXd W;  // D x D orthogonal demixing acting on whitened data
  int iterations = 0;
  bool converged = false;
};

/**
 * Symmetric fixed-point FastICA on whitened data. Every sweep updates all
 * rows w_i <- E[z g(w_i'z)] - E[g'(w_i'z)] w_i and re-orthogonalizes
 * W <- (W W')^(-1/2) W; iteration stops when
 * max_i |1 - |<w_i_new, w_i_old>|| < tol. The initial W is a random
 * orthogonal matrix drawn from `rng`. Non-convergence within max_iter is
 * reported through the converged flag, not an error.
 */
IcaResult fastica(const TimeSeries& Z, Nonlinearity g, double tol,
                  int max_iter, Rng& rng);

}  // namespace faripa::ica

#endif  // FARIPA_ICA_HPP
