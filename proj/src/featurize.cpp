#include "chatter/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace chatter {

double PiecewiseLinear::operator()(double x) const {
  const Eigen::Index n = nodes.rows();
  if (n < 2) return 0.0;
  if (x <= nodes(0, 0) || x >= nodes(n - 1, 0)) {
    if (x == nodes(0, 0)) return nodes(0, 1);
    if (x == nodes(n - 1, 0)) return nodes(n - 1, 1);
    return 0.0;
  }
  // first node with x-coordinate > x
  Eigen::Index lo = 0, hi = n - 1;
  while (hi - lo > 1) {
    const Eigen::Index mid = (lo + hi) / 2;
    if (nodes(mid, 0) <= x) lo = mid;
    else hi = mid;
  }
  const double x0 = nodes(lo, 0), y0 = nodes(lo, 1);
  const double x1 = nodes(hi, 0), y1 = nodes(hi, 1);
  const double t = (x - x0) / (x1 - x0);
  return y0 + t * (y1 - y0);
}

const PiecewiseLinear& Landscape::level(int k) const {
  static const PiecewiseLinear kZero{};
  if (k < 1 || std::size_t(k) > levels.size()) return kZero;
  return levels[std::size_t(k - 1)];
}

double Landscape::value(int k, double x) const { return level(k)(x); }

namespace {

double tent_value(double b, double d, double x) {
  if (x <= b || x >= d) return 0.0;
  return std::min(x - b, d - x);
}

// Trim zero runs (keep a zero node only next to a nonzero one), then drop
// interior nodes that are exactly collinear with their neighbors.
PiecewiseLinear compact_nodes(const std::vector<double>& xs,
                              const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  std::vector<std::pair<double, double>> kept;
  kept.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool near_nonzero = ys[i] != 0.0 || (i > 0 && ys[i - 1] != 0.0) ||
                              (i + 1 < n && ys[i + 1] != 0.0);
    if (!near_nonzero) continue;
    if (kept.size() >= 2) {
      const auto& a = kept[kept.size() - 2];
      const auto& m = kept.back();
      const double cross = (m.second - a.second) * (xs[i] - m.first) -
                           (ys[i] - m.second) * (m.first - a.first);
      if (cross == 0.0) kept.pop_back();
    }
    kept.emplace_back(xs[i], ys[i]);
  }
  PiecewiseLinear out;
  if (kept.size() < 2) return out;
  out.nodes.resize(Eigen::Index(kept.size()), 2);
  for (Eigen::Index r = 0; r < out.nodes.rows(); ++r) {
    out.nodes(r, 0) = kept[std::size_t(r)].first;
    out.nodes(r, 1) = kept[std::size_t(r)].second;
  }
  return out;
}

}  // namespace

Landscape compute_landscapes(const PersistenceDiagram& diag, int k_max) {
  if (k_max < 1) throw ConfigError("compute_landscapes: k_max must be >= 1");
  Landscape ls;
  ls.levels.resize(std::size_t(k_max));
  const Eigen::Index m = diag.pairs.rows();
  if (m == 0) return ls;

  // Every breakpoint of every lambda_k lies on this grid: tent endpoints
  // plus all up/down slope crossings (x - b_i = d_j - x).
  std::vector<double> grid;
  grid.reserve(std::size_t(m) * std::size_t(m) + 2 * std::size_t(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    grid.push_back(diag.pairs(i, 0));
    grid.push_back(diag.pairs(i, 1));
    for (Eigen::Index j = 0; j < m; ++j)
      grid.push_back((diag.pairs(i, 0) + diag.pairs(j, 1)) / 2.0);
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  // Sweep with an active-tent list so sparse diagrams stay cheap.
  std::vector<Eigen::Index> by_birth(static_cast<std::size_t>(m), 0);
  std::iota(by_birth.begin(), by_birth.end(), Eigen::Index(0));
  std::sort(by_birth.begin(), by_birth.end(), [&](Eigen::Index a, Eigen::Index b) {
    return diag.pairs(a, 0) < diag.pairs(b, 0);
  });

  const std::size_t g = grid.size();
  std::vector<std::vector<double>> level_vals(std::size_t(k_max),
                                              std::vector<double>(g, 0.0));
  std::vector<Eigen::Index> active;
  std::vector<double> vals;
  std::size_t next_tent = 0;
  for (std::size_t gi = 0; gi < g; ++gi) {
    const double x = grid[gi];
    while (next_tent < by_birth.size() && diag.pairs(by_birth[next_tent], 0) <= x)
      active.push_back(by_birth[next_tent++]);
    vals.clear();
    std::size_t w = 0;
    for (std::size_t a = 0; a < active.size(); ++a) {
      const Eigen::Index t = active[a];
      if (diag.pairs(t, 1) < x) continue;  // expired tent
      active[w++] = t;
      vals.push_back(tent_value(diag.pairs(t, 0), diag.pairs(t, 1), x));
    }
    active.resize(w);
    const std::size_t top = std::min<std::size_t>(std::size_t(k_max), vals.size());
    std::partial_sort(vals.begin(), vals.begin() + long(top), vals.end(),
                      std::greater<double>());
    for (std::size_t k = 0; k < top; ++k) level_vals[k][gi] = vals[k];
  }

  for (int k = 0; k < k_max; ++k)
    ls.levels[std::size_t(k)] = compact_nodes(grid, level_vals[std::size_t(k)]);
  return ls;
}

Eigen::VectorXd build_mesh(const std::vector<Landscape>& training, int k) {
  if (training.empty()) throw ConfigError("build_mesh: no training landscapes");
  std::vector<double> xs;
  for (const auto& ls : training) {
    const auto& fn = ls.level(k);
    for (Eigen::Index r = 0; r < fn.nodes.rows(); ++r) xs.push_back(fn.nodes(r, 0));
  }
  if (xs.empty()) {
    // Every training lambda_k is identically zero. A single mesh point at 0
    // keeps feature lengths stable; the feature value there is always 0.
    return Eigen::VectorXd::Zero(1);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return Eigen::Map<Eigen::VectorXd>(xs.data(), Eigen::Index(xs.size()));
}

LandscapeMesh build_meshes(const std::vector<Landscape>& training,
                           const std::vector<int>& k_set) {
  LandscapeMesh mesh;
  for (int k : k_set) mesh.grid[k] = build_mesh(training, k);
  return mesh;
}

Eigen::VectorXd landscape_features(const Landscape& ls,
                                   const LandscapeMesh& mesh,
                                   const std::vector<int>& k_set) {
  Eigen::Index total = 0;
  for (int k : k_set) {
    auto it = mesh.grid.find(k);
    if (it == mesh.grid.end())
      throw MeshMissingForK("landscape_features: no mesh for k = " + std::to_string(k));
    total += it->second.size();
  }
  Eigen::VectorXd out(total);
  Eigen::Index at = 0;
  for (int k : k_set) {
    const auto& grid = mesh.grid.at(k);
    const auto& fn = ls.level(k);
    for (Eigen::Index i = 0; i < grid.size(); ++i) out[at++] = fn(grid[i]);
  }
  return out;
}

ImageBounds training_image_bounds(const std::vector<PersistenceDiagram>& train,
                                  double sigma, double pad_sigmas) {
  if (!(sigma > 0.0)) throw ConfigError("training_image_bounds: sigma must be positive");
  double max_birth = 0.0, max_pers = 0.0;
  for (const auto& d : train)
    for (Eigen::Index r = 0; r < d.pairs.rows(); ++r) {
      max_birth = std::max(max_birth, d.pairs(r, 0));
      max_pers = std::max(max_pers, d.pairs(r, 1) - d.pairs(r, 0));
    }
  const double pad = pad_sigmas * sigma;
  ImageBounds b;
  b.birth_min = -pad;
  b.birth_max = max_birth + pad;
  b.pers_min = -pad;
  b.pers_max = max_pers + pad;
  b.w_cutoff = max_pers;
  return b;
}

double image_point_weight(double persistence, double cutoff) {
  if (persistence <= 0.0) return 0.0;
  if (cutoff <= 0.0 || persistence >= cutoff) return 1.0;
  return persistence / cutoff;
}

namespace {

inline double normal_cdf(double t) { return 0.5 * std::erfc(-t / 1.4142135623730951); }

}  // namespace

PersistenceImage persistence_image(const PersistenceDiagram& diag,
                                   double pixel_size, double sigma,
                                   const ImageBounds& bounds) {
  if (!(pixel_size > 0.0)) throw ConfigError("persistence_image: pixel_size must be positive");
  if (!(sigma > 0.0)) throw ConfigError("persistence_image: sigma must be positive");
  if (!(bounds.birth_max > bounds.birth_min) || !(bounds.pers_max > bounds.pers_min))
    throw DegenerateBounds("persistence_image: empty bounds window");

  const auto cols = Eigen::Index(std::ceil((bounds.birth_max - bounds.birth_min) / pixel_size));
  const auto rows = Eigen::Index(std::ceil((bounds.pers_max - bounds.pers_min) / pixel_size));

  PersistenceImage img;
  img.bounds = bounds;
  img.pixel_size = pixel_size;
  img.sigma = sigma;
  img.grid = Eigen::MatrixXd::Zero(rows, cols);

  Eigen::VectorXd cx(cols), cy(rows);
  for (Eigen::Index r = 0; r < diag.pairs.rows(); ++r) {
    const double b = diag.pairs(r, 0);
    const double p = diag.pairs(r, 1) - b;
    const double w = image_point_weight(p, bounds.w_cutoff);
    if (w == 0.0) continue;
    // Separable exact integral: per-axis normal CDF differences.
    double prev = normal_cdf((bounds.birth_min - b) / sigma);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const double edge = bounds.birth_min + double(c + 1) * pixel_size;
      const double cur = normal_cdf((edge - b) / sigma);
      cx[c] = cur - prev;
      prev = cur;
    }
    prev = normal_cdf((bounds.pers_min - p) / sigma);
    for (Eigen::Index q = 0; q < rows; ++q) {
      const double edge = bounds.pers_min + double(q + 1) * pixel_size;
      const double cur = normal_cdf((edge - p) / sigma);
      cy[q] = cur - prev;
      prev = cur;
    }
    img.grid.noalias() += w * cy * cx.transpose();
  }
  return img;
}

Eigen::VectorXd image_features(const PersistenceImage& img) {
  const Eigen::Index rows = img.grid.rows(), cols = img.grid.cols();
  Eigen::VectorXd out(rows * cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    out.segment(r * cols, cols) = img.grid.row(r).transpose();
  return out;
}

Eigen::Matrix<double, 5, 1> carlsson_coordinates(const PersistenceDiagram& diag) {
  Eigen::Matrix<double, 5, 1> f = Eigen::Matrix<double, 5, 1>::Zero();
  if (diag.pairs.rows() == 0) return f;
  const auto b = diag.pairs.col(0).array();
  const auto d = diag.pairs.col(1).array();
  const auto pers = (d - b).eval();
  const double d_max = d.maxCoeff();
  f[0] = (b * pers).sum();
  f[1] = ((d_max - d) * pers).sum();
  f[2] = (b.square() * pers.pow(4)).sum();
  f[3] = ((d_max - d).square() * pers.pow(4)).sum();
  f[4] = pers.maxCoeff();
  return f;
}

std::vector<std::vector<int>> coordinate_subsets() {
  std::vector<std::vector<int>> subsets;
  for (int mask = 1; mask < 32; ++mask) {
    std::vector<int> s;
    for (int i = 0; i < 5; ++i)
      if (mask & (1 << i)) s.push_back(i + 1);
    subsets.push_back(std::move(s));
  }
  std::sort(subsets.begin(), subsets.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a < b;
            });
  return subsets;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_feature_csv(const std::string& path, const FeatureMatrix& fm,
                       const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  if (!comment.empty()) out << "# " << comment << "\n";
  out << "label";
  for (Eigen::Index c = 0; c < fm.cols(); ++c) {
    out << ",";
    if (std::size_t(c) < fm.column_names.size()) out << fm.column_names[std::size_t(c)];
    else out << "f" << c;
  }
  out << "\n";
  for (Eigen::Index r = 0; r < fm.rows(); ++r) {
    out << fm.labels[r];
    for (Eigen::Index c = 0; c < fm.cols(); ++c)
      out << "," << format_double(fm.features(r, c));
    out << "\n";
  }
}

FeatureMatrix read_feature_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  std::string line;
  std::vector<std::string> names;
  bool header_done = false;
  std::vector<int> labels;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    if (!header_done) {
      bool first = true;
      while (std::getline(ss, cell, ',')) {
        if (!first) names.push_back(cell);
        first = false;
      }
      header_done = true;
      continue;
    }
    std::vector<double> row;
    bool first = true;
    int label = 0;
    while (std::getline(ss, cell, ',')) {
      if (first) {
        label = std::stoi(cell);
        first = false;
      } else {
        row.push_back(std::stod(cell));
      }
    }
    labels.push_back(label);
    rows.push_back(std::move(row));
  }
  FeatureMatrix fm;
  fm.column_names = std::move(names);
  fm.labels.resize(Eigen::Index(labels.size()));
  fm.features.resize(Eigen::Index(rows.size()), Eigen::Index(fm.column_names.size()));
  for (Eigen::Index r = 0; r < fm.features.rows(); ++r) {
    fm.labels[r] = labels[std::size_t(r)];
    for (Eigen::Index c = 0; c < fm.features.cols(); ++c)
      fm.features(r, c) = rows[std::size_t(r)][std::size_t(c)];
  }
  return fm;
}

}  // namespace chatter
