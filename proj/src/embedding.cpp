#include "chatter/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "chatter/ingest.hpp"  // ConstantSignal

namespace chatter {

namespace {

double population_variance(const Eigen::VectorXd& x) {
  const double mean = x.mean();
  return (x.array() - mean).square().sum() / double(x.size());
}

// Exact least-median-of-squares location fit: the constant minimizing the
// median of squared residuals is the midpoint of the shortest half of the
// sorted sample.
double lms_level(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t m = values.size();
  const std::size_t h = m / 2 + 1;
  if (h >= m) return (values.front() + values.back()) / 2.0;
  std::size_t best = 0;
  double best_width = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + h <= m; ++i) {
    const double width = values[i + h - 1] - values[i];
    if (width < best_width) {
      best_width = width;
      best = i;
    }
  }
  return (values[best] + values[best + h - 1]) / 2.0;
}

}  // namespace

int estimate_delay_fft_lms(const Eigen::VectorXd& samples, double fs_hz,
                           double margin_db) {
  if (samples.size() < 64)
    throw TooShort("estimate_delay_fft_lms: need at least 64 samples");
  if (!(fs_hz > 0.0)) throw ConfigError("estimate_delay_fft_lms: fs must be positive");
  if (!(population_variance(samples) > 0.0))
    throw ConstantSignal("estimate_delay_fft_lms: constant signal");

  const Eigen::Index n = samples.size();
  Eigen::FFT<double> fft;
  std::vector<double> in(samples.data(), samples.data() + n);
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, in);

  // One-sided spectrum, DC excluded. Log magnitudes feed the LMS floor fit;
  // the tiny offset keeps exact-zero bins finite without moving real ones.
  const Eigen::Index half = n / 2;
  std::vector<double> log_mag(static_cast<std::size_t>(half), 0.0);
  for (Eigen::Index k = 1; k <= half; ++k)
    log_mag[std::size_t(k - 1)] = 20.0 * std::log10(std::abs(spec[std::size_t(k)]) + 1e-300);

  const double floor_db = lms_level(log_mag);
  double f_max = -1.0;
  for (Eigen::Index k = 1; k <= half; ++k)
    if (log_mag[std::size_t(k - 1)] > floor_db + margin_db)
      f_max = double(k) * fs_hz / double(n);
  if (f_max <= 0.0)
    throw NoSignificantFrequency("estimate_delay_fft_lms: no bin exceeds the noise floor by " +
                                 std::to_string(margin_db) + " dB");
  return std::max(1, int(std::floor(fs_hz / (4.0 * f_max))));
}

namespace {

// Binned mutual information of (x_t, x_{t+tau}) in nats; marginals come
// from the joint histogram.
double binned_mutual_info(const Eigen::VectorXd& x, int tau, int bins,
                          double lo, double inv_width) {
  const Eigen::Index n = x.size() - tau;
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(bins, bins);
  auto bin_of = [&](double v) {
    int b = int((v - lo) * inv_width);
    return std::clamp(b, 0, bins - 1);
  };
  for (Eigen::Index t = 0; t < n; ++t)
    joint(bin_of(x[t]), bin_of(x[t + tau])) += 1.0;
  joint /= double(n);
  const Eigen::VectorXd rows = joint.rowwise().sum();
  const Eigen::VectorXd cols = joint.colwise().sum();
  double mi = 0.0;
  for (int i = 0; i < bins; ++i)
    for (int j = 0; j < bins; ++j) {
      const double p = joint(i, j);
      if (p > 0.0) mi += p * std::log(p / (rows[i] * cols[j]));
    }
  return mi;
}

}  // namespace

int estimate_delay_mutual_info(const Eigen::VectorXd& samples, int max_tau,
                               int bins) {
  if (max_tau < 2) throw ConfigError("estimate_delay_mutual_info: max_tau must be >= 2");
  if (samples.size() < max_tau + 2)
    throw TooShort("estimate_delay_mutual_info: signal shorter than max_tau + 2");
  const double lo = samples.minCoeff();
  const double hi = samples.maxCoeff();
  if (!(hi > lo)) throw ConstantSignal("estimate_delay_mutual_info: constant signal");
  const double inv_width = double(bins) / (hi - lo);

  std::vector<double> mi(std::size_t(max_tau) + 1);
  for (int tau = 0; tau <= max_tau; ++tau)
    mi[std::size_t(tau)] = binned_mutual_info(samples, tau, bins, lo, inv_width);

  for (int tau = 1; tau < max_tau; ++tau)
    if (mi[std::size_t(tau)] < mi[std::size_t(tau - 1)] &&
        mi[std::size_t(tau)] < mi[std::size_t(tau + 1)])
      return tau;
  throw NoMinimumFound("estimate_delay_mutual_info: no interior minimum up to tau = " +
                       std::to_string(max_tau));
}

FnnResult estimate_dim_fnn(const Eigen::VectorXd& samples, int tau,
                           int dim_cap, double r_tol, double pct_threshold) {
  if (tau < 1) throw ConfigError("estimate_dim_fnn: tau must be >= 1");
  if (dim_cap < 1) throw ConfigError("estimate_dim_fnn: dim_cap must be >= 1");
  if (!(r_tol > 0.0) || !(pct_threshold > 0.0) || !(pct_threshold < 1.0))
    throw ConfigError("estimate_dim_fnn: bad tolerance parameters");
  const Eigen::Index n = samples.size();
  if (n < 10) throw TooShort("estimate_dim_fnn: fewer than 10 points at d = 1");

  for (int d = 1; d <= dim_cap; ++d) {
    // Points that still exist at dimension d+1; both ends of a neighbor
    // pair must extend for the ratio test.
    const Eigen::Index n_ext = n - Eigen::Index(d) * tau;
    if (n_ext < 2) return {d, true};

    PointCloud cloud = delay_embed(samples, {tau, d});
    Eigen::Index false_count = 0;
    for (Eigen::Index i = 0; i < n_ext; ++i) {
      Eigen::Index best = -1;
      double best_sq = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n_ext; ++j) {
        if (j == i) continue;
        const double sq = (cloud.row(i) - cloud.row(j)).squaredNorm();
        if (sq < best_sq) {
          best_sq = sq;
          best = j;
        }
      }
      const double dist = std::sqrt(best_sq);
      if (dist == 0.0) continue;  // coincident points are never false neighbors
      const double extra = std::abs(samples[i + Eigen::Index(d) * tau] -
                                    samples[best + Eigen::Index(d) * tau]);
      if (extra / dist > r_tol) ++false_count;
    }
    if (double(false_count) / double(n_ext) < pct_threshold) return {d, false};
  }
  return {dim_cap, true};
}

PointCloud delay_embed(const Eigen::VectorXd& samples,
                       const EmbeddingParams& params) {
  if (params.tau < 1 || params.dim < 1)
    throw ConfigError("delay_embed: tau and dim must be >= 1");
  const Eigen::Index n = samples.size();
  const Eigen::Index span = Eigen::Index(params.dim - 1) * params.tau;
  if (n <= span)
    throw SignalTooShort("delay_embed: need more than (dim-1)*tau = " +
                         std::to_string(span) + " samples, have " + std::to_string(n));
  const Eigen::Index count = n - span;
  PointCloud cloud(count, params.dim);
  for (int c = 0; c < params.dim; ++c)
    cloud.col(c) = samples.segment(Eigen::Index(c) * params.tau, count);
  return cloud;
}

}  // namespace chatter
