#ifndef FARIPA_METRICS_HPP
#define FARIPA_METRICS_HPP

#include <vector>

#include "faripa/types.hpp"

namespace faripa::metrics {

/**
 * Block layout of a global matrix G: row blocks follow the estimated
 * component dimensions, column blocks the true ones. Both lists are kept
 * sorted ascending; their sums must both equal the matrix size D.
 */
struct BlockStructure {
  std::vector<int> row_dims;
  std::vector<int> col_dims;

  /// Sorts both lists ascending and validates every dim >= 1.
  static BlockStructure of(std::vector<int> rows, std::vector<int> cols);
  /// Square layout: same dims for rows and columns.
  static BlockStructure square(const std::vector<int>& dims);

  int total_rows() const;
  int total_cols() const;
};

/**
 * Per-block absolute sums: entry (i, j) is the sum of |G| over the block
 * at row-block i, column-block j. Output is M_row x M_col.
 */
Eigen::MatrixXd block_sums(const Eigen::MatrixXd& G, const BlockStructure& blocks);

/**
 * Amari-index generalized to block structure. With g the block-sum
 * matrix and M the number of blocks per side,
 *
 *   r(G) = 1/(2M(M-1)) [ sum_i (sum_j g_ij / max_j g_ij - 1)
 *                      + sum_j (sum_i g_ij / max_i g_ij - 1) ]
 *
 * r is in [0, 1]; 0 exactly when G is a block-permutation matrix, 1 when
 * all block sums are equal. Requires an equal number of row and column
 * blocks with M >= 2, and no all-zero block row or column.
 */
double amari_index(const Eigen::MatrixXd& G, const BlockStructure& blocks);

/**
 * True when the block-sum matrix has exactly one entry per row and per
 * column above tol * (largest block sum), and every such entry sits in a
 * square block (row dim equals column dim).
 */
bool is_block_permutation(const Eigen::MatrixXd& G, const BlockStructure& blocks,
                          double tol);

}  // namespace faripa::metrics

#endif  // FARIPA_METRICS_HPP
