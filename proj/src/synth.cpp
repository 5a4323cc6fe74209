#include "chatter/synth.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "chatter/rng.hpp"

namespace fs = std::filesystem;

namespace chatter {

namespace {

void validate(const SynthSpec& s) {
  if (!(s.fs > 0.0) || !(s.duration > 0.0))
    throw InvalidSpec("synth: fs and duration must be positive");
  if (s.noise_sigma < 0.0) throw InvalidSpec("synth: negative noise sigma");
  if (s.chatter_freq == s.spindle_freq)
    throw InvalidSpec("synth: chatter and spindle frequencies must differ");
  const double f_max = std::max(s.spindle_freq, s.chatter_freq);
  if (!(s.fs > 4.0 * f_max))
    throw InvalidSpec("synth: fs must exceed 4x the highest tone frequency");
  if (s.fs * s.duration < 2.0) throw InvalidSpec("synth: fewer than two samples");
}

}  // namespace

TimeSeriesRecord generate(const SynthSpec& spec) {
  validate(spec);
  const auto n = Eigen::Index(std::llround(spec.fs * spec.duration));
  Rng rng(spec.seed);
  const double phase_spindle = rng.uniform(0.0, 6.283185307179586);
  const double phase_chatter = rng.uniform(0.0, 6.283185307179586);
  const bool chatter = spec.cls == SynthClass::Chatter;

  Eigen::VectorXd x(n);
  const double w_s = 2.0 * 3.14159265358979323846 * spec.spindle_freq / spec.fs;
  const double w_c = 2.0 * 3.14159265358979323846 * spec.chatter_freq / spec.fs;
  for (Eigen::Index i = 0; i < n; ++i) {
    double v = kStableToneAmp * std::sin(w_s * double(i) + phase_spindle);
    if (chatter) v += kChatterToneAmp * std::sin(w_c * double(i) + phase_chatter);
    if (spec.noise_sigma > 0.0) v += rng.normal(0.0, spec.noise_sigma);
    x[i] = v;
  }

  TimeSeriesRecord rec;
  rec.samples = std::move(x);
  rec.sample_rate = spec.fs;
  rec.label = chatter ? Label::Chatter : Label::Stable;
  rec.meta.stickout_cm = 5.08;
  rec.meta.rpm = spec.spindle_freq * 60.0;
  rec.meta.depth_of_cut_cm = 0.0127;
  rec.meta.id = spec.id.empty()
                    ? (chatter ? "c" : "s") + std::to_string(spec.seed)
                    : spec.id;
  return rec;
}

void write_record(const std::string& dir, const TimeSeriesRecord& rec) {
  fs::create_directories(dir);
  const fs::path csv = fs::path(dir) / (rec.meta.id + ".csv");
  std::ofstream out(csv);
  if (!out) throw DataError("cannot write " + csv.string());
  char buf[40];
  for (Eigen::Index i = 0; i < rec.samples.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g", rec.samples[i]);
    out << buf << "\n";
  }
  out.close();

  nlohmann::json meta;
  meta["sample_rate"] = rec.sample_rate;
  meta["label"] = label_string(rec.label);
  meta["stickout_cm"] = rec.meta.stickout_cm;
  meta["rpm"] = rec.meta.rpm;
  meta["depth_of_cut_cm"] = rec.meta.depth_of_cut_cm;
  const fs::path mj = fs::path(dir) / (rec.meta.id + ".json");
  std::ofstream mout(mj);
  if (!mout) throw DataError("cannot write " + mj.string());
  mout << meta.dump(2) << "\n";
}

std::vector<std::string> write_synth_dataset(const std::string& dir,
                                             int n_stable, int n_chatter,
                                             const SynthSpec& base) {
  if (n_stable < 0 || n_chatter < 0) throw InvalidSpec("synth: negative record count");
  std::vector<std::string> ids;
  char name[32];
  for (int i = 0; i < n_stable + n_chatter; ++i) {
    SynthSpec spec = base;
    spec.cls = i < n_stable ? SynthClass::Stable : SynthClass::Chatter;
    spec.seed = splitmix64(base.seed) + std::uint64_t(i) + 1;
    std::snprintf(name, sizeof(name), "%s%03d",
                  spec.cls == SynthClass::Stable ? "stable" : "chatter",
                  i < n_stable ? i : i - n_stable);
    spec.id = name;
    write_record(dir, generate(spec));
    ids.emplace_back(name);
  }
  return ids;
}

}  // namespace chatter
