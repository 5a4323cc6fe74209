#include "brute_force_persistence.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace chatter::oracle {

namespace {

// Rank of a list of Z2 vectors (bitmasks): xor basis keyed by highest set
// bit. Each xor clears the current highest bit, so insertion terminates.
int z2_rank(std::vector<std::uint64_t> vecs) {
  std::uint64_t basis[64] = {0};
  int rank = 0;
  for (std::uint64_t v : vecs) {
    while (v) {
      const int h = 63 - __builtin_clzll(v);
      if (!basis[h]) {
        basis[h] = v;
        ++rank;
        break;
      }
      v ^= basis[h];
    }
  }
  return rank;
}

int z2_rank_joint(const std::vector<std::uint64_t>& a,
                  const std::vector<std::uint64_t>& b) {
  std::vector<std::uint64_t> all = a;
  all.insert(all.end(), b.begin(), b.end());
  return z2_rank(std::move(all));
}

struct EdgeRef {
  double w;
  int u, v;
};

}  // namespace

std::map<int, PersistenceDiagram> brute_force_rips(const DistanceMatrix& dist,
                                                   double max_radius) {
  const int n = int(dist.rows());
  if (n < 1) throw std::invalid_argument("brute_force_rips: empty input");
  if (n > 8) throw std::invalid_argument("brute_force_rips: more than 8 points");

  std::vector<EdgeRef> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (dist(u, v) <= max_radius) edges.push_back({dist(u, v), u, v});
  std::sort(edges.begin(), edges.end(), [](const EdgeRef& a, const EdgeRef& b) {
    return std::tie(a.w, a.u, a.v) < std::tie(b.w, b.u, b.v);
  });
  const std::size_t n_edges = edges.size();
  if (n_edges > 63) throw std::invalid_argument("brute_force_rips: too many edges");

  auto edge_index = [&](int u, int v) {
    if (u > v) std::swap(u, v);
    for (std::size_t e = 0; e < n_edges; ++e)
      if (edges[e].u == u && edges[e].v == v) return int(e);
    throw std::logic_error("edge not found");
  };

  struct Tri {
    double w;
    std::uint64_t boundary;  // over the edge indexing
  };
  std::vector<Tri> tris;
  {
    struct Tmp {
      double w;
      int i, j, k;
    };
    std::vector<Tmp> raw;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
          const double w = std::max({dist(i, j), dist(i, k), dist(j, k)});
          if (w <= max_radius) raw.push_back({w, i, j, k});
        }
    std::sort(raw.begin(), raw.end(), [](const Tmp& a, const Tmp& b) {
      return std::tie(a.w, a.i, a.j, a.k) < std::tie(b.w, b.i, b.j, b.k);
    });
    for (const auto& t : raw)
      tris.push_back({t.w, (std::uint64_t(1) << edge_index(t.i, t.j)) |
                               (std::uint64_t(1) << edge_index(t.i, t.k)) |
                               (std::uint64_t(1) << edge_index(t.j, t.k))});
  }

  // distinct filtration values; all vertices enter at 0
  std::vector<double> values{0.0};
  for (const auto& e : edges) values.push_back(e.w);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  const int L = int(values.size());

  std::vector<std::size_t> edges_at(std::size_t(L), 0), tris_at(std::size_t(L), 0);
  for (int a = 0; a < L; ++a) {
    std::size_t me = 0;
    while (me < n_edges && edges[me].w <= values[std::size_t(a)]) ++me;
    edges_at[std::size_t(a)] = me;
    std::size_t mt = 0;
    while (mt < tris.size() && tris[mt].w <= values[std::size_t(a)]) ++mt;
    tris_at[std::size_t(a)] = mt;
  }

  // Z1(K_a): kernel basis of the vertex boundary map restricted to the
  // first edges_at[a] edges, expressed over the edge indexing.
  auto cycle_basis = [&](std::size_t m_edges) {
    std::vector<std::uint64_t> cols(m_edges), combs(m_edges);
    for (std::size_t e = 0; e < m_edges; ++e) {
      cols[e] = (std::uint64_t(1) << edges[e].u) | (std::uint64_t(1) << edges[e].v);
      combs[e] = std::uint64_t(1) << e;
    }
    std::vector<int> pivot_of_vertex(std::size_t(n), -1);
    std::vector<std::uint64_t> out;
    for (std::size_t e = 0; e < m_edges; ++e) {
      while (cols[e]) {
        const int vtx = __builtin_ctzll(cols[e]);
        const int p = pivot_of_vertex[std::size_t(vtx)];
        if (p < 0) {
          pivot_of_vertex[std::size_t(vtx)] = int(e);
          break;
        }
        cols[e] ^= cols[std::size_t(p)];
        combs[e] ^= combs[std::size_t(p)];
      }
      if (!cols[e]) out.push_back(combs[e]);
    }
    return out;
  };

  // dimension 0: every vertex is present from value 0, so the induced maps
  // are surjective and beta0(a, b) is the component count of K_b.
  std::vector<int> b0(std::size_t(L), 0);
  for (int b = 0; b < L; ++b) {
    std::vector<std::uint64_t> gens;
    for (std::size_t e = 0; e < edges_at[std::size_t(b)]; ++e)
      gens.push_back((std::uint64_t(1) << edges[e].u) |
                     (std::uint64_t(1) << edges[e].v));
    b0[std::size_t(b)] = n - z2_rank(std::move(gens));
  }
  auto beta0 = [&](int a, int b) -> int {
    if (a < 0) return 0;
    return b0[std::size_t(b)];
  };

  std::vector<std::vector<std::uint64_t>> z1(static_cast<std::size_t>(L)), b1(static_cast<std::size_t>(L));
  std::vector<int> z1_dim(std::size_t(L), 0), b1_dim(std::size_t(L), 0);
  for (int a = 0; a < L; ++a) {
    z1[std::size_t(a)] = cycle_basis(edges_at[std::size_t(a)]);
    z1_dim[std::size_t(a)] = int(z1[std::size_t(a)].size());
    for (std::size_t t = 0; t < tris_at[std::size_t(a)]; ++t)
      b1[std::size_t(a)].push_back(tris[t].boundary);
    b1_dim[std::size_t(a)] = z2_rank(b1[std::size_t(a)]);
  }
  // beta1(a, b) = dim Z1(K_a) - dim(Z1(K_a) cap B1(K_b)), with the
  // intersection dimension obtained from dim(Z1 + B1) by inclusion-exclusion.
  auto beta1 = [&](int a, int b) -> int {
    if (a < 0) return 0;
    const int joint = z2_rank_joint(z1[std::size_t(a)], b1[std::size_t(b)]);
    const int cap = z1_dim[std::size_t(a)] + b1_dim[std::size_t(b)] - joint;
    return z1_dim[std::size_t(a)] - cap;
  };

  auto build = [&](int hom_dim, auto&& beta) {
    std::vector<std::pair<double, double>> pairs;
    std::vector<double> essential;
    for (int a = 0; a < L; ++a) {
      for (int b = a + 1; b < L; ++b) {
        const int mu =
            (beta(a, b - 1) - beta(a, b)) - (beta(a - 1, b - 1) - beta(a - 1, b));
        for (int c = 0; c < mu; ++c)
          pairs.emplace_back(values[std::size_t(a)], values[std::size_t(b)]);
      }
      const int inf = beta(a, L - 1) - beta(a - 1, L - 1);
      for (int c = 0; c < inf; ++c) essential.push_back(values[std::size_t(a)]);
    }
    std::sort(pairs.begin(), pairs.end());
    std::sort(essential.begin(), essential.end());
    PersistenceDiagram d;
    d.hom_dim = hom_dim;
    d.pairs.resize(Eigen::Index(pairs.size()), 2);
    for (Eigen::Index r = 0; r < d.pairs.rows(); ++r) {
      d.pairs(r, 0) = pairs[std::size_t(r)].first;
      d.pairs(r, 1) = pairs[std::size_t(r)].second;
    }
    d.essential = Eigen::Map<Eigen::VectorXd>(essential.data(),
                                              Eigen::Index(essential.size()));
    return d;
  };

  std::map<int, PersistenceDiagram> out;
  out[0] = build(0, beta0);
  out[1] = build(1, beta1);
  return out;
}

}  // namespace chatter::oracle
