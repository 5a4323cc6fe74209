#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "chatter/embedding.hpp"
#include "chatter/ingest.hpp"
#include "chatter/rng.hpp"

using namespace chatter;

namespace {

Eigen::VectorXd sine(double fs, double freq, Eigen::Index n, double amp = 1.0,
                     double phase = 0.0) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i)
    x[i] = amp * std::sin(2.0 * 3.14159265358979323846 * freq * double(i) / fs + phase);
  return x;
}

// Independent spectral-peak oracle.
double fft_peak_freq(const Eigen::VectorXd& x, double fs) {
  Eigen::FFT<double> fft;
  std::vector<double> in(x.data(), x.data() + x.size());
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, in);
  std::size_t best = 1;
  for (std::size_t k = 1; k <= std::size_t(x.size() / 2); ++k)
    if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
  return double(best) * fs / double(x.size());
}

}  // namespace

TEST_SUITE("embedding") {

TEST_CASE("delay from FFT spectrum: pure tone") {
  const auto x = sine(1000.0, 50.0, 1000);
  CHECK(fft_peak_freq(x, 1000.0) == doctest::Approx(50.0));  // oracle sanity
  CHECK(estimate_delay_fft_lms(x, 1000.0) == 5);  // floor(1000 / (4 * 50))
}

TEST_CASE("delay from FFT spectrum: two tones uses the highest significant") {
  const auto x = sine(1000.0, 50.0, 1000) + sine(1000.0, 120.0, 1000);
  CHECK(estimate_delay_fft_lms(x, 1000.0) == 2);  // floor(1000 / 480)
}

TEST_CASE("delay estimation error paths") {
  CHECK_THROWS_AS(estimate_delay_fft_lms(Eigen::VectorXd::Ones(1000), 1000.0),
                  ConstantSignal);
  CHECK_THROWS_AS(estimate_delay_fft_lms(Eigen::VectorXd::Random(32), 1000.0),
                  TooShort);
}

TEST_CASE("delay is invariant under amplitude scaling") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd x = sine(1000.0, 20.0 + 40.0 * rng.uniform(), 1024);
    for (Eigen::Index i = 0; i < x.size(); ++i) x[i] += 0.05 * rng.normal();
    const int tau1 = estimate_delay_fft_lms(x, 1000.0);
    const int tau2 = estimate_delay_fft_lms(Eigen::VectorXd(7.0 * x), 1000.0);
    CHECK(tau1 == tau2);
  }
}

TEST_CASE("mutual information delay on a sine dips near quarter period") {
  const int period = 40;
  const auto x = sine(double(period), 1.0, 2000);  // period = 40 samples
  const int tau = estimate_delay_mutual_info(x, 30);

  // direct MI-curve oracle: recompute the curve and find its first dip
  auto mi_at = [&](int t) {
    const int bins = 16;
    const double lo = x.minCoeff(), hi = x.maxCoeff();
    Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(bins, bins);
    for (Eigen::Index i = 0; i + t < x.size(); ++i) {
      auto b = [&](double v) {
        return std::min(bins - 1, int((v - lo) / (hi - lo) * bins));
      };
      joint(b(x[i]), b(x[i + t])) += 1.0;
    }
    joint /= joint.sum();
    Eigen::VectorXd r = joint.rowwise().sum(), c = joint.colwise().sum();
    double mi = 0;
    for (int a = 0; a < bins; ++a)
      for (int bcol = 0; bcol < bins; ++bcol)
        if (joint(a, bcol) > 0)
          mi += joint(a, bcol) * std::log(joint(a, bcol) / (r[a] * c[bcol]));
    return mi;
  };
  int oracle_tau = -1;
  for (int t = 1; t < 30; ++t)
    if (mi_at(t) < mi_at(t - 1) && mi_at(t) < mi_at(t + 1)) {
      oracle_tau = t;
      break;
    }
  CHECK(tau == oracle_tau);
  CHECK(std::abs(tau - period / 4) <= 1);

  CHECK_THROWS_AS(estimate_delay_mutual_info(x, 1), ConfigError);
}

TEST_CASE("mutual information with no interior minimum") {
  // strictly monotone signal: MI decreases monotonically with lag
  Eigen::VectorXd ramp = Eigen::VectorXd::LinSpaced(512, 0.0, 1.0);
  CHECK_THROWS_AS(estimate_delay_mutual_info(ramp, 6), NoMinimumFound);
}

TEST_CASE("FNN dimension: noiseless sine needs two dimensions") {
  const auto x = sine(100.0, 1.0, 1000);  // period 100, tau = 25
  const auto res = estimate_dim_fnn(x, 25);
  CHECK(res.dim == 2);
  CHECK_FALSE(res.saturated);
}

TEST_CASE("FNN dimension: constant signal returns one") {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(100);
  const auto res = estimate_dim_fnn(c, 3);
  CHECK(res.dim == 1);  // zero distances are never false neighbors
  CHECK_FALSE(res.saturated);
}

TEST_CASE("FNN dimension: white noise saturates the cap") {
  Rng rng(4);
  Eigen::VectorXd x(600);
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = rng.normal();
  const auto res = estimate_dim_fnn(x, 1, 10, 10.0, 0.01);
  CHECK(res.dim == 10);
  CHECK(res.saturated);
}

TEST_CASE("FNN false-neighbor fraction non-increasing for the sine fixture") {
  const auto x = sine(100.0, 1.0, 800);
  // oracle: recompute the FNN fraction per dimension directly
  auto fraction_at = [&](int d, int tau) {
    const Eigen::Index n_ext = x.size() - Eigen::Index(d) * tau;
    PointCloud cloud = delay_embed(x, {tau, d});
    Eigen::Index false_count = 0;
    for (Eigen::Index i = 0; i < n_ext; ++i) {
      Eigen::Index best = -1;
      double best_d = 1e300;
      for (Eigen::Index j = 0; j < n_ext; ++j) {
        if (i == j) continue;
        const double dd = (cloud.row(i) - cloud.row(j)).norm();
        if (dd < best_d) {
          best_d = dd;
          best = j;
        }
      }
      if (best_d == 0.0) continue;
      if (std::abs(x[i + d * tau] - x[best + d * tau]) / best_d > 10.0) ++false_count;
    }
    return double(false_count) / double(n_ext);
  };
  double prev = 2.0;
  for (int d = 1; d <= 4; ++d) {
    const double f = fraction_at(d, 25);
    CHECK(f <= prev + 1e-12);
    prev = f;
  }

  CHECK_THROWS_AS(estimate_dim_fnn(sine(100.0, 1.0, 8), 1), TooShort);
}

TEST_CASE("delay_embed definition") {
  Eigen::VectorXd x(5);
  x << 1, 2, 3, 4, 5;
  PointCloud c = delay_embed(x, {1, 2});
  REQUIRE(c.rows() == 4);
  REQUIRE(c.cols() == 2);
  CHECK(c(0, 0) == 1);
  CHECK(c(0, 1) == 2);
  CHECK(c(3, 0) == 4);
  CHECK(c(3, 1) == 5);

  Eigen::VectorXd y(7);
  y << 0, 1, 2, 3, 4, 5, 6;
  PointCloud c2 = delay_embed(y, {2, 3});
  REQUIRE(c2.rows() == 3);
  CHECK(c2(0, 0) == 0);
  CHECK(c2(0, 1) == 2);
  CHECK(c2(0, 2) == 4);
  CHECK(c2(2, 0) == 2);
  CHECK(c2(2, 1) == 4);
  CHECK(c2(2, 2) == 6);

  CHECK_THROWS_AS(delay_embed(x, {2, 4}), SignalTooShort);  // needs n >= 7
}

TEST_CASE("delay_embed count property and d=1 identity") {
  Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + int(rng.uniform_int(200));
    const int tau = 1 + int(rng.uniform_int(10));
    const int d = 1 + int(rng.uniform_int(6));
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.normal();
    if (n <= (d - 1) * tau) {
      CHECK_THROWS_AS(delay_embed(x, {tau, d}), SignalTooShort);
      continue;
    }
    PointCloud c = delay_embed(x, {tau, d});
    CHECK(c.rows() == n - (d - 1) * tau);
    CHECK(c.cols() == d);
  }
  Eigen::VectorXd x(6);
  x << 3, 1, 4, 1, 5, 9;
  PointCloud c = delay_embed(x, {4, 1});
  REQUIRE(c.rows() == 6);
  for (int i = 0; i < 6; ++i) CHECK(c(i, 0) == x[i]);
}

}  // TEST_SUITE
