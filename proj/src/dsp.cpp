#include "chatter/dsp.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace chatter::dsp {

std::vector<BiquadSection> butterworth_lowpass_sos(int order, double cutoff_hz,
                                                   double fs_hz) {
  if (order < 2 || order % 2 != 0)
    throw std::invalid_argument("butterworth_lowpass_sos: order must be even and >= 2");
  if (!(cutoff_hz > 0.0) || !(cutoff_hz < fs_hz / 2.0))
    throw std::invalid_argument("butterworth_lowpass_sos: cutoff must lie in (0, fs/2)");

  const double pi = 3.14159265358979323846;
  // Prewarp so the bilinear transform puts the -3 dB point exactly at cutoff_hz.
  const double wa = 2.0 * fs_hz * std::tan(pi * cutoff_hz / fs_hz);
  const double K = 2.0 * fs_hz;

  std::vector<BiquadSection> sos;
  sos.reserve(order / 2);
  for (int k = 1; k <= order / 2; ++k) {
    // Analog prototype pole pair at angle theta on the unit circle (left
    // half plane), scaled to wa: s^2 + 2 zeta wa s + wa^2.
    const double theta = pi * (2.0 * k + order - 1.0) / (2.0 * order);
    const double zeta = -std::cos(theta);
    const double a1s = 2.0 * zeta * wa;
    const double w2 = wa * wa;

    // Bilinear transform of w2 / (s^2 + a1s s + w2); two zeros at z = -1.
    const double den0 = K * K + a1s * K + w2;
    BiquadSection s{};
    s.b0 = w2 / den0;
    s.b1 = 2.0 * w2 / den0;
    s.b2 = w2 / den0;
    s.a1 = (2.0 * w2 - 2.0 * K * K) / den0;
    s.a2 = (K * K - a1s * K + w2) / den0;
    sos.push_back(s);
  }
  return sos;
}

Eigen::VectorXd sosfilt(const std::vector<BiquadSection>& sos,
                        const Eigen::VectorXd& x) {
  Eigen::VectorXd y = x;
  for (const auto& s : sos) {
    double z1 = 0.0, z2 = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double in = y[i];
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      y[i] = out;
    }
  }
  return y;
}

Eigen::VectorXd sosfiltfilt(const std::vector<BiquadSection>& sos,
                            const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  if (n == 0) return x;
  const Eigen::Index pad = std::min<Eigen::Index>(n - 1, 1024);

  Eigen::VectorXd ext(n + 2 * pad);
  // Odd reflection about the endpoints keeps the extension continuous in
  // value and slope, which bounds the startup transient.
  for (Eigen::Index i = 0; i < pad; ++i)
    ext[i] = 2.0 * x[0] - x[pad - i];
  ext.segment(pad, n) = x;
  for (Eigen::Index i = 0; i < pad; ++i)
    ext[pad + n + i] = 2.0 * x[n - 1] - x[n - 2 - i];

  Eigen::VectorXd y = sosfilt(sos, ext);
  y.reverseInPlace();
  y = sosfilt(sos, y);
  y.reverseInPlace();
  return y.segment(pad, n);
}

}  // namespace chatter::dsp
