#include "faripa/ica.hpp"

#include <cmath>

#include "faripa/linalg.hpp"

namespace faripa::ica {

std::pair<TimeSeries, WhiteningTransform> center_whiten(const TimeSeries& X) {
  X.validate();
  const long T = X.length();
  const long D = X.dim();
  if (T <= D) throw ConfigError("center_whiten: T > D required");

  WhiteningTransform wt;
  wt.mean = X.values.colwise().mean().transpose();
  const Eigen::MatrixXd centered = X.values.rowwise() - wt.mean.transpose();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(T - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  if (es.info() != Eigen::Success)
    throw NumericError("center_whiten: eigendecomposition failed");
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
  if (ev(0) <= 1e-12 * ev(D - 1))
    throw DegenerateError("center_whiten: rank-deficient sample covariance");

  const Eigen::VectorXd root = ev.cwiseSqrt();
  wt.V = root.cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
  wt.V_inv = es.eigenvectors() * root.asDiagonal();
  return {TimeSeries(centered * wt.V.transpose()), wt};
}

IcaResult fastica(const TimeSeries& Z, Nonlinearity g, double tol, int max_iter,
                  Rng& rng) {
  Z.validate();
  if (!(tol > 0.0)) throw ConfigError("fastica: tol > 0 required");
  if (max_iter < 1) throw ConfigError("fastica: max_iter >= 1 required");
  const long T = Z.length();
  const long D = Z.dim();
  const double n = static_cast<double>(T);

  IcaResult res;
  res.W = random_orthogonal_matrix(static_cast<int>(D), rng);

  for (int it = 0; it < max_iter; ++it) {
    const Eigen::MatrixXd Y = Z.values * res.W.transpose();  // T x D, col i = w_i'z
    Eigen::MatrixXd Gy(T, D);
    Eigen::VectorXd gprime_mean(D);
    if (g == Nonlinearity::Tanh) {
      Gy = Y.array().tanh();
      gprime_mean = (1.0 - Gy.array().square()).colwise().mean();
    } else {
      Gy = Y.array().cube();
      gprime_mean = 3.0 * Y.array().square().colwise().mean();
    }
    // w_i <- E[z g(w_i'z)] - E[g'(w_i'z)] w_i, all rows at once
    Eigen::MatrixXd W_new =
        (Gy.transpose() * Z.values) / n - gprime_mean.asDiagonal() * res.W;
    W_new = sym_inverse_sqrt(W_new * W_new.transpose()) * W_new;

    double delta = 0.0;
    for (long i = 0; i < D; ++i)
      delta = std::max(delta,
                       std::abs(1.0 - std::abs(W_new.row(i).dot(res.W.row(i)))));
    res.W = W_new;
    res.iterations = it + 1;
    if (delta < tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

}  // namespace faripa::ica
