#include "chatter/persistence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <unordered_map>

namespace chatter {

DistanceMatrix distance_matrix(const PointCloud& cloud) {
  const Eigen::Index n = cloud.rows();
  if (n < 1) throw EmptyCloud("distance_matrix: empty point cloud");
  DistanceMatrix d(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double dist = (cloud.row(i) - cloud.row(j)).norm();
      d(i, j) = dist;
      d(j, i) = dist;
    }
  }
  return d;
}

double enclosing_radius(const DistanceMatrix& dist) {
  const Eigen::Index n = dist.rows();
  if (n < 1) throw EmptyInput("enclosing_radius: empty matrix");
  double radius = std::numeric_limits<double>::infinity();
  for (Eigen::Index v = 0; v < n; ++v)
    radius = std::min(radius, dist.row(v).maxCoeff());
  return radius;
}

namespace {

struct Edge {
  double w;
  std::int32_t u, v;  // u < v
};

// A triangle in the filtration order (value, lexicographic vertex tuple).
// Vertices are packed high-to-low so key comparison is the tuple comparison.
struct TriRef {
  double w;
  std::uint64_t key;

  friend bool operator==(const TriRef& a, const TriRef& b) {
    return a.w == b.w && a.key == b.key;
  }
  friend bool operator>(const TriRef& a, const TriRef& b) {
    return std::tie(a.w, a.key) > std::tie(b.w, b.key);
  }
};

std::uint64_t pack3(std::int32_t i, std::int32_t j, std::int32_t k) {
  return (std::uint64_t(i) << 40) | (std::uint64_t(j) << 20) | std::uint64_t(k);
}

struct UnionFind {
  std::vector<std::int32_t> parent;
  explicit UnionFind(std::int32_t n) : parent(std::size_t(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::int32_t find(std::int32_t x) {
    while (parent[std::size_t(x)] != x) {
      parent[std::size_t(x)] = parent[std::size_t(parent[std::size_t(x)])];
      x = parent[std::size_t(x)];
    }
    return x;
  }
  // returns false if already joined
  bool join(std::int32_t a, std::int32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::size_t(std::max(a, b))] = std::min(a, b);
    return true;
  }
};

// Min-heap column over Z2: popping the pivot cancels duplicate entries in
// pairs, so the top surviving entry is the current low.
struct HeapColumn {
  std::priority_queue<TriRef, std::vector<TriRef>, std::greater<TriRef>> heap;

  void clear() { heap = {}; }
  void push(const TriRef& t) { heap.push(t); }

  bool pop_pivot(TriRef& out) {
    while (!heap.empty()) {
      TriRef t = heap.top();
      heap.pop();
      std::size_t count = 1;
      while (!heap.empty() && heap.top() == t) {
        heap.pop();
        ++count;
      }
      if (count % 2 == 1) {
        out = t;
        return true;
      }
    }
    return false;
  }
};

PersistenceDiagram make_diagram(int hom_dim,
                                std::vector<std::pair<double, double>> pairs,
                                std::vector<double> essential) {
  PersistenceDiagram d;
  d.hom_dim = hom_dim;
  std::sort(pairs.begin(), pairs.end());
  std::sort(essential.begin(), essential.end());
  d.pairs.resize(Eigen::Index(pairs.size()), 2);
  for (Eigen::Index r = 0; r < d.pairs.rows(); ++r) {
    d.pairs(r, 0) = pairs[std::size_t(r)].first;
    d.pairs(r, 1) = pairs[std::size_t(r)].second;
  }
  d.essential = Eigen::Map<Eigen::VectorXd>(essential.data(),
                                            Eigen::Index(essential.size()));
  return d;
}

}  // namespace

std::map<int, PersistenceDiagram> rips_persistence(const DistanceMatrix& dist,
                                                   int max_hom_dim,
                                                   double max_radius) {
  const Eigen::Index n_big = dist.rows();
  if (n_big < 1) throw EmptyInput("rips_persistence: empty distance matrix");
  if (dist.rows() != dist.cols())
    throw DataError("rips_persistence: distance matrix is not square");
  if (max_hom_dim < 0 || max_hom_dim > 1)
    throw ConfigError("rips_persistence: max_hom_dim must be 0 or 1");
  if (n_big > std::numeric_limits<std::int32_t>::max())
    throw DataError("rips_persistence: cloud too large");
  const auto n = std::int32_t(n_big);

  const double radius = (max_radius == kEnclosingRadius)
                            ? (n > 1 ? enclosing_radius(dist) : 0.0)
                            : max_radius;

  // Edges at or below the truncation radius, in filtration order. Within a
  // dimension the order is (value, lexicographic vertex tuple); across
  // dimensions equal values resolve lower dimension first, which the
  // split reductions below realize implicitly.
  std::vector<Edge> edges;
  for (std::int32_t u = 0; u < n; ++u)
    for (std::int32_t v = u + 1; v < n; ++v)
      if (dist(u, v) <= radius) edges.push_back({dist(u, v), u, v});
  std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.w, a.u, a.v) < std::tie(b.w, b.u, b.v);
  });
  const auto n_edges = std::int32_t(edges.size());

  // Dimension 0: the reduction of edge columns is exactly Kruskal on the
  // sorted edges. Every vertex is born at 0; a merging edge kills the
  // younger component at its own value.
  UnionFind uf(n);
  std::vector<char> edge_positive(std::size_t(n_edges), 0);
  std::vector<std::pair<double, double>> h0_pairs;
  for (std::int32_t e = 0; e < n_edges; ++e) {
    if (uf.join(edges[std::size_t(e)].u, edges[std::size_t(e)].v)) {
      if (edges[std::size_t(e)].w > 0.0)
        h0_pairs.emplace_back(0.0, edges[std::size_t(e)].w);
    } else {
      edge_positive[std::size_t(e)] = 1;  // creates a 1-cycle
    }
  }
  std::vector<double> h0_essential;
  for (std::int32_t v = 0; v < n; ++v)
    if (uf.find(v) == v) h0_essential.push_back(0.0);

  std::map<int, PersistenceDiagram> out;
  out[0] = make_diagram(0, std::move(h0_pairs), std::move(h0_essential));
  if (max_hom_dim < 1) return out;

  // Dimension 1, reduced in the coboundary direction: process edge columns
  // in reverse filtration order, each column holding the triangle cofacets
  // of its edge, generated on demand from the distance matrix. Clearing
  // skips the negative (component-merging) edges outright, and the pairs
  // are the same as for the boundary-matrix reduction. A column whose final
  // low triangle is unclaimed pairs the edge with that triangle; a column
  // that cancels to nothing is an essential 1-cycle.
  if (n >= std::int32_t(1) << 20)
    throw DataError("rips_persistence: cloud too large for vertex packing");

  std::vector<std::pair<double, double>> h1_pairs;
  std::vector<double> h1_essential;

  std::unordered_map<std::uint64_t, std::int32_t> owner;  // triangle -> column id
  std::vector<std::vector<TriRef>> stored;                 // reduced columns
  owner.reserve(std::size_t(n_edges));

  std::vector<TriRef> cofacets;
  HeapColumn column;
  for (std::int32_t ei = n_edges - 1; ei >= 0; --ei) {
    if (!edge_positive[std::size_t(ei)]) continue;  // cleared
    const Edge& e = edges[std::size_t(ei)];

    cofacets.clear();
    for (std::int32_t k = 0; k < n; ++k) {
      if (k == e.u || k == e.v) continue;
      const double dku = dist(k, e.u), dkv = dist(k, e.v);
      if (dku > radius || dkv > radius) continue;
      const double w = std::max({e.w, dku, dkv});
      if (w > radius) continue;
      std::int32_t a = e.u, b = e.v, c = k;
      if (c < a) std::swap(a, c);
      if (c < b) std::swap(b, c);
      cofacets.push_back({w, pack3(a, b, c)});
    }
    if (cofacets.empty()) {
      h1_essential.push_back(e.w);
      continue;
    }
    const TriRef low0 = *std::min_element(
        cofacets.begin(), cofacets.end(),
        [](const TriRef& a, const TriRef& b) { return b > a; });

    // The raw column is already reduced when its smallest cofacet is
    // unclaimed; this shortcut resolves almost every column in dense
    // complexes without touching the heap.
    if (owner.find(low0.key) == owner.end()) {
      owner.emplace(low0.key, std::int32_t(stored.size()));
      stored.push_back(cofacets);
      if (e.w < low0.w) h1_pairs.emplace_back(e.w, low0.w);
      continue;
    }

    column.clear();
    for (const auto& t : cofacets) column.push(t);
    TriRef low{};
    bool essential = true;
    while (column.pop_pivot(low)) {
      auto it = owner.find(low.key);
      if (it == owner.end()) {
        // pair (edge, triangle); drain the heap into a stored column
        std::vector<TriRef> col{low};
        TriRef rest{};
        while (column.pop_pivot(rest)) col.push_back(rest);
        owner.emplace(low.key, std::int32_t(stored.size()));
        stored.push_back(std::move(col));
        if (e.w < low.w) h1_pairs.emplace_back(e.w, low.w);
        essential = false;
        break;
      }
      column.push(low);  // cancels against the copy inside the added column
      for (const auto& t : stored[std::size_t(it->second)]) column.push(t);
    }
    if (essential) h1_essential.push_back(e.w);
  }

  out[1] = make_diagram(1, std::move(h1_pairs), std::move(h1_essential));
  return out;
}

std::vector<int> maxmin_subsample_indices(const PointCloud& cloud,
                                          int max_points, int start) {
  const Eigen::Index n = cloud.rows();
  if (n < 1) throw EmptyCloud("maxmin_subsample_indices: empty cloud");
  if (max_points < 1) throw ConfigError("maxmin_subsample_indices: max_points must be >= 1");
  if (start < 0 || start >= n) throw ConfigError("maxmin_subsample_indices: bad start index");

  const Eigen::Index target = std::min<Eigen::Index>(max_points, n);
  std::vector<int> chosen;
  chosen.reserve(std::size_t(target));
  Eigen::VectorXd min_dist =
      Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  int current = start;
  chosen.push_back(current);
  while (Eigen::Index(chosen.size()) < target) {
    double best = -1.0;
    int next = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = (cloud.row(i) - cloud.row(current)).norm();
      if (d < min_dist[i]) min_dist[i] = d;
      if (min_dist[i] > best) {  // strict: ties fall to the lowest index
        best = min_dist[i];
        next = int(i);
      }
    }
    if (next < 0 || best <= 0.0) break;  // all remaining points coincide with chosen ones
    chosen.push_back(next);
    current = next;
  }
  return chosen;
}

PointCloud cap_cloud(const PointCloud& cloud, int max_points, bool* subsampled) {
  if (subsampled) *subsampled = false;
  if (max_points <= 0 || cloud.rows() <= max_points) return cloud;
  const auto idx = maxmin_subsample_indices(cloud, max_points);
  PointCloud out(Eigen::Index(idx.size()), cloud.cols());
  for (Eigen::Index r = 0; r < out.rows(); ++r) out.row(r) = cloud.row(idx[std::size_t(r)]);
  if (subsampled) *subsampled = true;
  return out;
}

nlohmann::json diagram_to_json(const PersistenceDiagram& d) {
  nlohmann::json j;
  j["hom_dim"] = d.hom_dim;
  auto pairs = nlohmann::json::array();
  for (Eigen::Index r = 0; r < d.pairs.rows(); ++r)
    pairs.push_back({d.pairs(r, 0), d.pairs(r, 1)});
  j["pairs"] = std::move(pairs);
  auto ess = nlohmann::json::array();
  for (Eigen::Index i = 0; i < d.essential.size(); ++i) ess.push_back(d.essential[i]);
  j["essential"] = std::move(ess);
  j["provenance"] = {{"chunk_id", d.provenance.chunk_id},
                     {"tau", d.provenance.tau},
                     {"dim", d.provenance.dim},
                     {"subsampled", d.provenance.subsampled}};
  return j;
}

PersistenceDiagram diagram_from_json(const nlohmann::json& j) {
  PersistenceDiagram d;
  d.hom_dim = j.at("hom_dim").get<int>();
  const auto& pairs = j.at("pairs");
  d.pairs.resize(Eigen::Index(pairs.size()), 2);
  for (Eigen::Index r = 0; r < d.pairs.rows(); ++r) {
    d.pairs(r, 0) = pairs[std::size_t(r)][0].get<double>();
    d.pairs(r, 1) = pairs[std::size_t(r)][1].get<double>();
  }
  const auto& ess = j.at("essential");
  d.essential.resize(Eigen::Index(ess.size()));
  for (Eigen::Index i = 0; i < d.essential.size(); ++i)
    d.essential[i] = ess[std::size_t(i)].get<double>();
  if (j.contains("provenance")) {
    const auto& p = j.at("provenance");
    d.provenance.chunk_id = p.value("chunk_id", std::string());
    d.provenance.tau = p.value("tau", 0);
    d.provenance.dim = p.value("dim", 0);
    d.provenance.subsampled = p.value("subsampled", false);
  }
  return d;
}

}  // namespace chatter
