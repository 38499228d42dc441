#include "faripa/metrics.hpp"

#include <algorithm>
#include <numeric>

namespace faripa::metrics {

BlockStructure BlockStructure::of(std::vector<int> rows, std::vector<int> cols) {
  if (rows.empty() || cols.empty())
    throw ConfigError("BlockStructure: dimension lists must be nonempty");
  for (int d : rows)
    if (d < 1) throw ConfigError("BlockStructure: row dims must be >= 1");
  for (int d : cols)
    if (d < 1) throw ConfigError("BlockStructure: col dims must be >= 1");
  std::sort(rows.begin(), rows.end());
  std::sort(cols.begin(), cols.end());
  return BlockStructure{std::move(rows), std::move(cols)};
}

BlockStructure BlockStructure::square(const std::vector<int>& dims) {
  return of(dims, dims);
}

int BlockStructure::total_rows() const {
  return std::accumulate(row_dims.begin(), row_dims.end(), 0);
}

int BlockStructure::total_cols() const {
  return std::accumulate(col_dims.begin(), col_dims.end(), 0);
}

namespace {

void check_shape(const Eigen::MatrixXd& G, const BlockStructure& blocks) {
  if (!G.allFinite()) throw NumericError("global matrix has non-finite entries");
  if (G.rows() != blocks.total_rows() || G.cols() != blocks.total_cols())
    throw ConfigError("block structure does not match matrix shape");
}

}  // namespace

Eigen::MatrixXd block_sums(const Eigen::MatrixXd& G, const BlockStructure& blocks) {
  check_shape(G, blocks);
  const auto mr = static_cast<long>(blocks.row_dims.size());
  const auto mc = static_cast<long>(blocks.col_dims.size());
  Eigen::MatrixXd g(mr, mc);
  long r0 = 0;
  for (long i = 0; i < mr; ++i) {
    const int dr = blocks.row_dims[static_cast<size_t>(i)];
    long c0 = 0;
    for (long j = 0; j < mc; ++j) {
      const int dc = blocks.col_dims[static_cast<size_t>(j)];
      g(i, j) = G.block(r0, c0, dr, dc).cwiseAbs().sum();
      c0 += dc;
    }
    r0 += dr;
  }
  return g;
}

double amari_index(const Eigen::MatrixXd& G, const BlockStructure& blocks) {
  if (blocks.row_dims.size() != blocks.col_dims.size())
    throw ConfigError("amari_index: row and column block counts differ");
  const long M = static_cast<long>(blocks.row_dims.size());
  if (M < 2) throw DegenerateError("amari_index undefined for a single block");
  const Eigen::MatrixXd g = block_sums(G, blocks);

  for (long i = 0; i < M; ++i)
    if (g.row(i).maxCoeff() <= 0.0)
      throw DegenerateError("amari_index: all-zero block row");
  for (long j = 0; j < M; ++j)
    if (g.col(j).maxCoeff() <= 0.0)
      throw DegenerateError("amari_index: all-zero block column");

  double acc = 0.0;
  for (long i = 0; i < M; ++i)
    acc += g.row(i).sum() / g.row(i).maxCoeff() - 1.0;
  for (long j = 0; j < M; ++j)
    acc += g.col(j).sum() / g.col(j).maxCoeff() - 1.0;
  return acc / (2.0 * static_cast<double>(M) * static_cast<double>(M - 1));
}

bool is_block_permutation(const Eigen::MatrixXd& G, const BlockStructure& blocks,
                          double tol) {
  if (tol < 0.0) throw ConfigError("is_block_permutation: tol >= 0 required");
  const Eigen::MatrixXd g = block_sums(G, blocks);
  const double thresh = tol * g.maxCoeff();
  const long mr = g.rows(), mc = g.cols();
  std::vector<int> col_hits(static_cast<size_t>(mc), 0);
  for (long i = 0; i < mr; ++i) {
    int row_hits = 0;
    for (long j = 0; j < mc; ++j) {
      if (g(i, j) > thresh) {
        ++row_hits;
        ++col_hits[static_cast<size_t>(j)];
        // only square blocks may carry the mass
        if (blocks.row_dims[static_cast<size_t>(i)] !=
            blocks.col_dims[static_cast<size_t>(j)])
          return false;
      }
    }
    if (row_hits != 1) return false;
  }
  for (long j = 0; j < mc; ++j)
    if (col_hits[static_cast<size_t>(j)] != 1) return false;
  return true;
}

}  // namespace faripa::metrics
