#include <doctest.h>

#include <cmath>

#include "chatter/persistence.hpp"
#include "chatter/rng.hpp"
#include "oracles/brute_force_persistence.hpp"

using namespace chatter;

namespace {

PointCloud unit_square() {
  PointCloud p(4, 2);
  p << 0, 0, 1, 0, 1, 1, 0, 1;
  return p;
}

bool diagrams_equal(const PersistenceDiagram& a, const PersistenceDiagram& b) {
  if (a.pairs.rows() != b.pairs.rows()) return false;
  if (a.essential.size() != b.essential.size()) return false;
  for (Eigen::Index r = 0; r < a.pairs.rows(); ++r)
    if (a.pairs(r, 0) != b.pairs(r, 0) || a.pairs(r, 1) != b.pairs(r, 1))
      return false;
  for (Eigen::Index i = 0; i < a.essential.size(); ++i)
    if (a.essential[i] != b.essential[i]) return false;
  return true;
}

PointCloud random_cloud(Rng& rng, int n, int dim) {
  PointCloud p(n, dim);
  for (int i = 0; i < n; ++i)
    for (int c = 0; c < dim; ++c) p(i, c) = rng.uniform(-1.0, 1.0);
  return p;
}

}  // namespace

TEST_SUITE("persistence") {

TEST_CASE("distance matrix basics") {
  PointCloud two(2, 1);
  two << 0, 3;
  DistanceMatrix d = distance_matrix(two);
  CHECK(d(0, 1) == doctest::Approx(3.0));
  CHECK(d(1, 0) == doctest::Approx(3.0));
  CHECK(d(0, 0) == 0.0);

  DistanceMatrix sq = distance_matrix(unit_square());
  std::vector<double> off;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) off.push_back(sq(i, j));
  std::sort(off.begin(), off.end());
  CHECK(off[0] == doctest::Approx(1.0));
  CHECK(off[3] == doctest::Approx(1.0));
  CHECK(off[4] == doctest::Approx(std::sqrt(2.0)));
  CHECK(off[5] == doctest::Approx(std::sqrt(2.0)));

  PointCloud one(1, 3);
  one << 1, 2, 3;
  DistanceMatrix s = distance_matrix(one);
  CHECK(s.rows() == 1);
  CHECK(s(0, 0) == 0.0);

  CHECK_THROWS_AS(distance_matrix(PointCloud(0, 2)), EmptyCloud);
}

TEST_CASE("unit square fixture") {
  auto d = rips_persistence(distance_matrix(unit_square()), 1);
  REQUIRE(d[1].size() == 1);
  CHECK(d[1].pairs(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(d[1].pairs(0, 1) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(d[1].essential.size() == 0);
  // three finite H0 classes dying at 1 plus one essential
  REQUIRE(d[0].size() == 3);
  for (int r = 0; r < 3; ++r) {
    CHECK(d[0].pairs(r, 0) == 0.0);
    CHECK(d[0].pairs(r, 1) == doctest::Approx(1.0));
  }
  CHECK(d[0].essential.size() == 1);
  CHECK(d[0].essential[0] == 0.0);
}

TEST_CASE("three collinear points") {
  PointCloud p(3, 1);
  p << 0, 1, 2;
  auto d = rips_persistence(distance_matrix(p), 1);
  CHECK(d[1].size() == 0);
  CHECK(d[1].essential.size() == 0);
  REQUIRE(d[0].size() == 2);
  CHECK(d[0].pairs(0, 1) == doctest::Approx(1.0));
  CHECK(d[0].pairs(1, 1) == doctest::Approx(1.0));
  CHECK(d[0].essential.size() == 1);
}

TEST_CASE("single point") {
  PointCloud p(1, 2);
  p << 0.5, -2.0;
  auto d = rips_persistence(distance_matrix(p), 1);
  CHECK(d[0].size() == 0);
  REQUIRE(d[0].essential.size() == 1);
  CHECK(d[0].essential[0] == 0.0);
  CHECK(d[1].size() == 0);
}

TEST_CASE("empty input throws") {
  CHECK_THROWS_AS(rips_persistence(DistanceMatrix(0, 0), 1), EmptyInput);
}

TEST_CASE("oracle equivalence on random clouds") {
  Rng rng(20260810);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + int(rng.uniform_int(8));
    const int dim = 1 + int(rng.uniform_int(3));
    const PointCloud cloud = random_cloud(rng, n, dim);
    const DistanceMatrix dist = distance_matrix(cloud);
    const double radius = enclosing_radius(dist);
    auto got = rips_persistence(dist, 1);
    auto want = oracle::brute_force_rips(dist, radius);
    CAPTURE(trial);
    CAPTURE(n);
    CAPTURE(dim);
    CHECK(diagrams_equal(got[0], want[0]));
    CHECK(diagrams_equal(got[1], want[1]));
  }
}

TEST_CASE("oracle equivalence with truncated radius and essential classes") {
  Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + int(rng.uniform_int(6));
    const PointCloud cloud = random_cloud(rng, n, 2);
    const DistanceMatrix dist = distance_matrix(cloud);
    // radius below enclosing so some cycles and components stay open
    const double radius = 0.6 * enclosing_radius(dist);
    auto got = rips_persistence(dist, 1, radius);
    auto want = oracle::brute_force_rips(dist, radius);
    CAPTURE(trial);
    CHECK(diagrams_equal(got[0], want[0]));
    CHECK(diagrams_equal(got[1], want[1]));
  }
}

TEST_CASE("H1 births are edge values and deaths are triangle values") {
  Rng rng(5);
  const PointCloud cloud = random_cloud(rng, 30, 2);
  const DistanceMatrix dist = distance_matrix(cloud);
  auto d = rips_persistence(dist, 1);
  // collect the distance multiset
  std::vector<double> dv;
  for (int i = 0; i < 30; ++i)
    for (int j = i + 1; j < 30; ++j) dv.push_back(dist(i, j));
  std::sort(dv.begin(), dv.end());
  auto is_distance = [&](double x) {
    return std::binary_search(dv.begin(), dv.end(), x);
  };
  for (Eigen::Index r = 0; r < d[1].pairs.rows(); ++r) {
    CHECK(is_distance(d[1].pairs(r, 0)));
    CHECK(is_distance(d[1].pairs(r, 1)));  // triangle value = its max edge
    CHECK(d[1].pairs(r, 0) < d[1].pairs(r, 1));
  }
}

TEST_CASE("scale equivariance") {
  Rng rng(11);
  const PointCloud cloud = random_cloud(rng, 25, 3);
  const double c = 3.5;
  auto base = rips_persistence(distance_matrix(cloud), 1);
  auto scaled = rips_persistence(distance_matrix(PointCloud(c * cloud)), 1);
  REQUIRE(base[1].size() == scaled[1].size());
  for (Eigen::Index r = 0; r < base[1].pairs.rows(); ++r) {
    CHECK(scaled[1].pairs(r, 0) == doctest::Approx(c * base[1].pairs(r, 0)).epsilon(1e-12));
    CHECK(scaled[1].pairs(r, 1) == doctest::Approx(c * base[1].pairs(r, 1)).epsilon(1e-12));
  }
}

TEST_CASE("H0 essential count equals components at the truncation radius") {
  // two clusters far apart; truncation below the gap keeps them separate
  Rng rng(42);
  PointCloud cloud(12, 2);
  for (int i = 0; i < 6; ++i) {
    cloud(i, 0) = rng.uniform(0.0, 0.5);
    cloud(i, 1) = rng.uniform(0.0, 0.5);
    cloud(6 + i, 0) = 10.0 + rng.uniform(0.0, 0.5);
    cloud(6 + i, 1) = rng.uniform(0.0, 0.5);
  }
  auto d = rips_persistence(distance_matrix(cloud), 0, 2.0);
  CHECK(d[0].essential.size() == 2);
  auto full = rips_persistence(distance_matrix(cloud), 0);
  CHECK(full[0].essential.size() == 1);
}

TEST_CASE("maxmin subsample") {
  Rng rng(8);
  const PointCloud cloud = random_cloud(rng, 100, 2);
  auto idx = maxmin_subsample_indices(cloud, 10);
  CHECK(idx.size() == 10);
  CHECK(idx[0] == 0);
  // chosen points are distinct
  std::vector<int> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());

  bool subsampled = false;
  PointCloud capped = cap_cloud(cloud, 10, &subsampled);
  CHECK(subsampled);
  CHECK(capped.rows() == 10);
  PointCloud small = cap_cloud(cloud, 200, &subsampled);
  CHECK_FALSE(subsampled);
  CHECK(small.rows() == 100);

  // greedy max-min: each newly chosen point is at least as far from the
  // chosen set as every later one (the selection radii are non-increasing)
  std::vector<double> radii;
  for (std::size_t s = 1; s < idx.size(); ++s) {
    double best = 1e300;
    for (std::size_t t = 0; t < s; ++t)
      best = std::min(best, (cloud.row(idx[s]) - cloud.row(idx[t])).norm());
    radii.push_back(best);
  }
  for (std::size_t s = 1; s < radii.size(); ++s)
    CHECK(radii[s] <= radii[s - 1] + 1e-12);
}

TEST_CASE("diagram json round trip") {
  PersistenceDiagram d;
  d.hom_dim = 1;
  d.pairs.resize(2, 2);
  d.pairs << 0.1234567890123456789, 1.0 / 3.0, 0.5, std::sqrt(2.0);
  d.essential.resize(1);
  d.essential << 0.7071067811865476;
  d.provenance = {"rec#3", 5, 2, true};
  const auto j = diagram_to_json(d);
  const auto back = diagram_from_json(nlohmann::json::parse(j.dump()));
  CHECK(diagrams_equal(d, back));  // bitwise: serialization must round-trip
  CHECK(back.provenance.chunk_id == "rec#3");
  CHECK(back.provenance.tau == 5);
  CHECK(back.provenance.dim == 2);
  CHECK(back.provenance.subsampled == true);
}

}  // TEST_SUITE
