#ifndef FARIPA_ISA_HPP
#define FARIPA_ISA_HPP

#include <optional>
#include <vector>

#include "faripa/far.hpp"
#include "faripa/ica.hpp"
#include "faripa/types.hpp"

namespace faripa::isa {

/**
 * Pairwise dependence scores of the one-dimensional coordinates:
 * symmetric, nonnegative, zero diagonal, entries in [0,1]. Pairs whose
 * score came from degenerate (zero-variance) input are listed.
 */
struct DependenceMatrix {
  Eigen::MatrixXd S;
  std::vector<std::pair<int, int>> degenerate;
};

struct KccaOptions {
  int subsample = 1000;  // points used for the Gram matrices
  double kappa = 0.1;    // regularizer
};

/**
 * Kernel canonical correlation between two scalar series as a dependence
 * score in [0,1]. Both series are subsampled at the same evenly spaced
 * indices, turned into centered Gaussian Gram matrices with
 * median-distance bandwidths, and the largest canonical correlation of
 * the (K + kappa I)^2-regularized problem is returned. Zero-variance
 * input yields 0 with the degenerate flag set.
 */
double kcca_dependence(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       const KccaOptions& opts, bool* degenerate = nullptr);

/// Pairwise kcca_dependence over all coordinate pairs of Y.
DependenceMatrix dependence_matrix(const TimeSeries& Y,
                                   const KccaOptions& opts = {});

/**
 * Ordered grouping of coordinate indices {0..D-1} into disjoint subspaces.
 * `canonical()` orders groups by ascending size (ties by smallest member)
 * which is the layout used for reporting and block metrics.
 */
struct Partition {
  std::vector<std::vector<int>> groups;

  std::vector<int> dims() const;
  int total() const;
  /// Throws ConfigError unless groups disjointly cover {0..D-1}.
  void validate(int D) const;
  Partition canonical() const;
  /// Contiguous assignment: first dims[0] indices, next dims[1], ...
  static Partition contiguous(const std::vector<int>& dims);
};

/**
 * Groups coordinates into subspaces of the given sizes by maximizing the
 * within-group sum of dependence scores. Starts from the contiguous
 * assignment, repeatedly applies the best improving cross-group swap
 * (ties: lowest swapped index pair), and stops at a local optimum;
 * additional seeded random restarts keep the best local optimum found.
 */
Partition greedy_cluster(const DependenceMatrix& dep, const std::vector<int>& dims,
                         int restarts = 3, std::uint64_t seed = 0);

/**
 * Spectral partitioning of the dependence graph: symmetric normalized
 * Laplacian of S (diagonal lifted by 1e-12), embedding into the
 * eigenvectors of the M smallest eigenvalues, row normalization, then
 * seeded k-means with 20 restarts. When M is absent it is chosen by the
 * largest Laplacian eigengap; a disconnected graph falls back to its
 * connected components.
 */
Partition ncut_cluster(const DependenceMatrix& dep, std::optional<int> M,
                       std::uint64_t seed = 0);

/**
 * Final demixing assembled from the pipeline stages:
 * W_isa = P * W_ica * V with P the permutation that lays the partition
 * groups out contiguously in canonical (ascending-dims) order, and
 * G = W_isa * A. The block Amari-index of G is computed against the true
 * component dimensions.
 */
struct SeparationResult {
  Eigen::MatrixXd W_isa;
  Eigen::MatrixXd G;
  Partition partition;       // canonical order, matching W_isa's row layout
  double amari = 0.0;
  Eigen::MatrixXd block_sum; // per-block absolute sums of G
  bool block_permutation = false;  // at tolerance 1e-8
  Eigen::VectorXd mean;      // whitening offset; estimates use x - mean

  /// Applies the demixing to a series: (x - mean) * W_isa'.
  TimeSeries apply(const TimeSeries& x) const;
};

SeparationResult assemble_separation(const ica::WhiteningTransform& wt,
                                     const ica::IcaResult& ica,
                                     const Partition& part,
                                     const far::MixingSpec& mixing,
                                     const std::vector<int>& true_dims);

}  // namespace faripa::isa

#endif  // FARIPA_ISA_HPP
