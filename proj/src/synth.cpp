#include "faripa/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iostream>

namespace faripa::synth {

DensityGrid DensityGrid::normalized(int width, int height,
                                    const std::vector<double>& intensity) {
  if (width < 1 || height < 1)
    throw ConfigError("DensityGrid: width and height must be >= 1");
  if (intensity.size() != static_cast<size_t>(width) * static_cast<size_t>(height))
    throw ConfigError("DensityGrid: intensity size does not match dimensions");
  double total = 0.0;
  for (double v : intensity) {
    if (!(v >= 0.0)) throw ConfigError("DensityGrid: negative or NaN intensity");
    total += v;
  }
  if (total <= 0.0)
    throw DegenerateError("DensityGrid: all-zero image cannot be a density");
  DensityGrid g;
  g.width = width;
  g.height = height;
  g.mass.resize(intensity.size());
  for (size_t i = 0; i < intensity.size(); ++i) g.mass[i] = intensity[i] / total;
  return g;
}

namespace {

// Reads the next whitespace-separated token, skipping '#' comments.
std::string next_pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

int parse_pgm_int(std::istream& in, const char* what) {
  const std::string tok = next_pgm_token(in);
  if (tok.empty()) throw FormatError(std::string("PGM: missing ") + what);
  for (char ch : tok)
    if (!std::isdigit(static_cast<unsigned char>(ch)))
      throw FormatError(std::string("PGM: non-numeric ") + what + " '" + tok + "'");
  return std::stoi(tok);
}

}  // namespace

DensityGrid load_density_image(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);

  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || (m1 != '2' && m1 != '5'))
    throw FormatError("PGM: unsupported magic in " + path);
  const bool binary = (m1 == '5');

  const int width = parse_pgm_int(in, "width");
  const int height = parse_pgm_int(in, "height");
  const int maxval = parse_pgm_int(in, "maxval");
  if (width < 1 || height < 1) throw FormatError("PGM: bad dimensions in " + path);
  if (maxval < 1 || maxval > 65535) throw FormatError("PGM: bad maxval in " + path);

  const size_t n = static_cast<size_t>(width) * static_cast<size_t>(height);
  std::vector<double> intensity(n);
  if (binary) {
    // single whitespace byte separates maxval from raster
    const int bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> buf(n * static_cast<size_t>(bytes));
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    if (static_cast<size_t>(in.gcount()) != buf.size())
      throw FormatError("PGM: truncated raster in " + path);
    for (size_t i = 0; i < n; ++i)
      intensity[i] = bytes == 1 ? buf[i]
                                : 256.0 * buf[2 * i] + buf[2 * i + 1];
  } else {
    for (size_t i = 0; i < n; ++i)
      intensity[i] = parse_pgm_int(in, "pixel");
  }
  for (double v : intensity)
    if (v > maxval) throw FormatError("PGM: pixel above maxval in " + path);
  return DensityGrid::normalized(width, height, intensity);
}

TimeSeries sample_from_density(const DensityGrid& grid, int n, Rng& rng) {
  if (n < 1) throw ConfigError("sample_from_density: n >= 1 required");
  std::vector<double> cdf(grid.mass.size());
  double acc = 0.0;
  for (size_t i = 0; i < grid.mass.size(); ++i) {
    acc += grid.mass[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;

  Eigen::MatrixXd pts(n, 2);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto p = static_cast<long>(std::min<size_t>(
        static_cast<size_t>(it - cdf.begin()), cdf.size() - 1));
    const long col = p % grid.width;
    const long row = p / grid.width;
    pts(i, 0) = (static_cast<double>(col) + rng.uniform()) / grid.width;
    pts(i, 1) = (static_cast<double>(row) + rng.uniform()) / grid.height;
  }
  pts.rowwise() -= pts.colwise().mean();
  return TimeSeries(std::move(pts));
}

namespace {

// All face elements are drawn in [0,1]^2 with y pointing up.
struct FaceSpec {
  double mouth_curv;    // parabola coefficient; 0 = straight
  double mouth_width;   // half-width
  double mouth_stroke;
  bool mouth_ring;      // open-mouth variant
  double eye_radius;
  bool left_eye_bar;    // wink
};

FaceSpec face_spec(int variant) {
  switch (((variant % 6) + 6) % 6) {
    case 0: return {1.5, 0.17, 0.025, false, 0.055, false};   // smile
    case 1: return {-1.5, 0.17, 0.025, false, 0.055, false};  // frown
    case 2: return {0.0, 0.17, 0.025, false, 0.055, false};   // neutral
    case 3: return {0.0, 0.0, 0.0, true, 0.07, false};        // surprised
    case 4: return {2.2, 0.19, 0.04, false, 0.05, false};     // grin
    default: return {1.2, 0.16, 0.025, false, 0.055, true};   // wink
  }
}

}  // namespace

DensityGrid face_density(int variant, int size) {
  if (size < 8) throw ConfigError("face_density: size >= 8 required");
  const FaceSpec f = face_spec(variant);
  std::vector<double> intensity(static_cast<size_t>(size) * static_cast<size_t>(size), 0.0);
  for (int row = 0; row < size; ++row) {
    for (int col = 0; col < size; ++col) {
      const double x = (col + 0.5) / size;
      const double y = 1.0 - (row + 0.5) / size;
      bool on = false;

      const double rc = std::hypot(x - 0.5, y - 0.5);
      if (std::abs(rc - 0.42) < 0.03) on = true;  // face outline

      // eyes
      const double ey = 0.62;
      if (f.left_eye_bar) {
        if (std::abs(y - ey) < 0.018 && std::abs(x - 0.35) < 0.06) on = true;
      } else if (std::hypot(x - 0.35, y - ey) < f.eye_radius) {
        on = true;
      }
      if (std::hypot(x - 0.65, y - ey) < f.eye_radius) on = true;

      // mouth
      if (f.mouth_ring) {
        if (std::abs(std::hypot(x - 0.5, y - 0.3) - 0.07) < 0.022) on = true;
      } else {
        const double dx = x - 0.5;
        if (std::abs(dx) <= f.mouth_width &&
            std::abs(y - (0.3 + f.mouth_curv * dx * dx)) < f.mouth_stroke)
          on = true;
      }

      if (on)
        intensity[static_cast<size_t>(row) * static_cast<size_t>(size) +
                  static_cast<size_t>(col)] = 1.0;
    }
  }
  return DensityGrid::normalized(size, size, intensity);
}

TimeSeries sample_geometric(const GeomForm& form, int n, Rng& rng) {
  if (n < 1) throw ConfigError("sample_geometric: n >= 1 required");
  const int d = form.dim;
  if (d < 1) throw ConfigError("sample_geometric: dim >= 1 required");

  Eigen::MatrixXd pts;
  switch (form.variant) {
    case GeomVariant::SphereSurface: {
      if (d < 2)
        throw ConfigError("SphereSurface requires dim >= 2");
      pts.resize(n, d);
      for (int i = 0; i < n; ++i) {
        Eigen::VectorXd g(d);
        double norm = 0.0;
        do {
          for (int j = 0; j < d; ++j) g(j) = rng.gaussian();
          norm = g.norm();
        } while (norm < 1e-12);
        pts.row(i) = g.transpose() / norm;
      }
      break;
    }
    case GeomVariant::CubeDiagonals: {
      // main diagonals of [0,1]^d: corner c with c_1 = 0 to its opposite.
      pts.setZero(n, d);
      const std::uint64_t ndiag = d >= 2 ? (1ULL << (d - 1)) : 1;
      for (int i = 0; i < n; ++i) {
        const std::uint64_t corner = rng.uniform_int(ndiag);
        const double t = rng.uniform();
        pts(i, 0) = t;
        for (int j = 1; j < d; ++j)
          pts(i, j) = ((corner >> (j - 1)) & 1ULL) ? 1.0 - t : t;
      }
      break;
    }
    case GeomVariant::BrokenLine: {
      // path 0 -> e1 -> e1+e2 -> ...: d unit segments, uniform arc length.
      pts.setZero(n, d);
      for (int i = 0; i < n; ++i) {
        const double s = rng.uniform() * d;
        const int seg = std::min(static_cast<int>(s), d - 1);
        for (int j = 0; j < seg; ++j) pts(i, j) = 1.0;
        pts(i, seg) = s - seg;
      }
      break;
    }
    case GeomVariant::SquareSkeleton: {
      if (d != 2)
        throw ConfigError("SquareSkeleton requires dim == 2");
      pts.resize(n, 2);
      for (int i = 0; i < n; ++i) {
        const double s = rng.uniform() * 4.0;
        const int edge = std::min(static_cast<int>(s), 3);
        const double t = s - edge;
        switch (edge) {
          case 0: pts(i, 0) = t;       pts(i, 1) = 0.0;     break;
          case 1: pts(i, 0) = 1.0;     pts(i, 1) = t;       break;
          case 2: pts(i, 0) = 1.0 - t; pts(i, 1) = 1.0;     break;
          default: pts(i, 0) = 0.0;    pts(i, 1) = 1.0 - t; break;
        }
      }
      break;
    }
  }
  return TimeSeries(std::move(pts));
}

Eigen::Vector2d ikeda_step(const Eigen::Vector2d& state, double lambda) {
  if (!state.allFinite())
    throw NumericError("ikeda_step: non-finite state");
  const double s1 = state(0), s2 = state(1);
  const double w = 0.4 - 6.0 / (1.0 + s1 * s1 + s2 * s2);
  const double c = std::cos(w), s = std::sin(w);
  return {1.0 + lambda * (s1 * c - s2 * s), lambda * (s1 * s + s2 * c)};
}

TimeSeries generate_ikeda_sources(const std::vector<IkedaParams>& params, int T) {
  if (T < 1) throw ConfigError("generate_ikeda_sources: T >= 1 required");
  if (params.empty())
    throw ConfigError("generate_ikeda_sources: at least one component required");
  for (size_t m = 0; m < params.size(); ++m)
    if (!(std::abs(params[m].lambda) < 1.0))
      std::cerr << "warning: ikeda component " << m << " has |lambda| >= 1; "
                << "trajectory may be unbounded\n";

  const long M = static_cast<long>(params.size());
  Eigen::MatrixXd out(T, 2 * M);
  for (long m = 0; m < M; ++m) {
    Eigen::Vector2d s = params[static_cast<size_t>(m)].initial;
    out(0, 2 * m) = s(0);
    out(0, 2 * m + 1) = s(1);
    for (int t = 1; t < T; ++t) {
      s = ikeda_step(s, params[static_cast<size_t>(m)].lambda);
      out(t, 2 * m) = s(0);
      out(t, 2 * m + 1) = s(1);
    }
  }
  return TimeSeries(std::move(out));
}

}  // namespace faripa::synth
