#pragma once

#include <Eigen/Dense>
#include <vector>

namespace chatter::dsp {

// One second-order IIR section, direct form II transposed.
struct BiquadSection {
  double b0, b1, b2;  // numerator
  double a1, a2;      // denominator (a0 normalized to 1)
};

// Digital Butterworth low-pass of even order `order` with cutoff `cutoff_hz`
// at sample rate `fs_hz`, returned as a cascade of order/2 biquads. Designed
// from the analog prototype by bilinear transform with cutoff prewarping;
// each section has unit DC gain.
std::vector<BiquadSection> butterworth_lowpass_sos(int order, double cutoff_hz,
                                                   double fs_hz);

// Single forward pass of the cascade.
Eigen::VectorXd sosfilt(const std::vector<BiquadSection>& sos,
                        const Eigen::VectorXd& x);

// Zero-phase filtering: forward pass, reverse, forward pass again, reverse.
// The signal is extended at both ends by an odd reflection before filtering
// to suppress edge transients; the extension is stripped from the output.
Eigen::VectorXd sosfiltfilt(const std::vector<BiquadSection>& sos,
                            const Eigen::VectorXd& x);

}  // namespace chatter::dsp
