#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chatter/errors.hpp"
#include "chatter/ingest.hpp"

namespace chatter {

struct InvalidSpec : ConfigError {
  using ConfigError::ConfigError;
};

enum class SynthClass { Stable, Chatter };

// Synthetic cutting-signal spec with known ground truth. Stable signals are
// a low-amplitude spindle tone buried in noise; chatter signals add a
// dominant limit-cycle tone at the chatter frequency, at least five times
// the stable amplitude, so their delay embeddings carry a clean loop.
struct SynthSpec {
  SynthClass cls = SynthClass::Stable;
  double fs = 2000.0;         // Hz
  double duration = 1.0;      // s
  double spindle_freq = 20.0;  // Hz
  double chatter_freq = 130.0; // Hz
  double noise_sigma = 0.05;
  std::uint64_t seed = 0;
  std::string id;  // record id; defaulted from class and seed when empty
};

// Tone amplitudes used by the generator.
inline constexpr double kStableToneAmp = 0.05;
inline constexpr double kChatterToneAmp = 1.0;

// Deterministic for a fixed spec (bit-identical samples for equal seeds).
TimeSeriesRecord generate(const SynthSpec& spec);

// Writes one record as the ingest contract: <id>.csv (one sample per line)
// plus <id>.json metadata sidecar.
void write_record(const std::string& dir, const TimeSeriesRecord& rec);

// Generates n_stable + n_chatter records with per-record seeds derived from
// base.seed and writes them under dir. Returns the record ids.
std::vector<std::string> write_synth_dataset(const std::string& dir,
                                             int n_stable, int n_chatter,
                                             const SynthSpec& base);

}  // namespace chatter
