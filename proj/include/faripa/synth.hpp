#ifndef FARIPA_SYNTH_HPP
#define FARIPA_SYNTH_HPP

#include <string>
#include <vector>

#include "faripa/rng.hpp"
#include "faripa/types.hpp"

namespace faripa::synth {

/**
 * A grayscale image treated as a 2-D probability density: `mass` holds one
 * nonnegative weight per pixel (row-major), normalized to sum 1.
 */
struct DensityGrid {
  int width = 0;
  int height = 0;
  std::vector<double> mass;  // row-major, height*width entries, sums to 1

  double at(int row, int col) const {
    return mass[static_cast<size_t>(row) * static_cast<size_t>(width) +
                static_cast<size_t>(col)];
  }

  /// Normalizes raw intensities into a density. Throws DegenerateError if
  /// the total is zero, ConfigError on bad shape.
  static DensityGrid normalized(int width, int height,
                                const std::vector<double>& intensity);
};

/// Loads a PGM image (P2 ascii or P5 binary) as a density grid.
DensityGrid load_density_image(const std::string& path);

/**
 * Draws n points from the grid density: categorical pixel choice, uniform
 * jitter inside the chosen pixel, coordinates mapped to [0,1]^2 and finally
 * centered to zero empirical mean. Returns an n x 2 series.
 *
 * Per point the generator is consumed as: pixel draw, x jitter, y jitter.
 */
TimeSeries sample_from_density(const DensityGrid& grid, int n, Rng& rng);

/// Procedurally drawn face-like density (6 expression variants, cycled by
/// `variant`), used as the stock 2-D image densities.
DensityGrid face_density(int variant, int size = 64);

enum class GeomVariant {
  SphereSurface,   // unit sphere surface in R^d, d >= 2
  CubeDiagonals,   // the 2^(d-1) corner-to-opposite-corner segments of [0,1]^d
  BrokenLine,      // path 0 -> e1 -> e1+e2 -> ... -> e1+...+ed
  SquareSkeleton,  // boundary of [0,1]^2 (d fixed to 2)
};

struct GeomForm {
  GeomVariant variant;
  int dim;
};

/**
 * Uniform samples on the given geometric form, n x d. Sphere points come
 * from normalized isotropic Gaussians; the segment-based forms pick a
 * segment and a uniform position on it (uniform arc length). Samples are
 * returned raw -- membership predicates hold exactly; centering is left to
 * the caller.
 */
TimeSeries sample_geometric(const GeomForm& form, int n, Rng& rng);

/**
 * Parameters of one 2-D ikeda-map component: scaling lambda and the
 * initial state. |lambda| < 1 keeps trajectories bounded; larger values
 * are accepted with a warning.
 */
struct IkedaParams {
  double lambda = 0.0;
  Eigen::Vector2d initial = Eigen::Vector2d::Zero();
};

/**
 * One ikeda-map step: with w = 0.4 - 6 / (1 + s1^2 + s2^2),
 *
 *   next = ( 1 + lambda (s1 cos w - s2 sin w),
 *                lambda (s1 sin w + s2 cos w) )
 */
Eigen::Vector2d ikeda_step(const Eigen::Vector2d& state, double lambda);

/**
 * Deterministic trajectories of M ikeda components stacked side by side:
 * component m occupies columns (2m, 2m+1), row 0 holds the initial points,
 * row t the t-th iterate. Returns a T x 2M series.
 */
TimeSeries generate_ikeda_sources(const std::vector<IkedaParams>& params, int T);

}  // namespace faripa::synth

#endif  // FARIPA_SYNTH_HPP
