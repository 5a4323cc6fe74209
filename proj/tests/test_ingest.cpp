#include <doctest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "chatter/ingest.hpp"
#include "chatter/rng.hpp"

using namespace chatter;
namespace fs = std::filesystem;

namespace {

// FFT amplitude of the bin at freq_hz (signal length must make the bin exact).
double tone_amplitude(const Eigen::VectorXd& x, double fs, double freq_hz) {
  Eigen::FFT<double> fft;
  std::vector<double> in(x.data(), x.data() + x.size());
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, in);
  const auto bin = Eigen::Index(std::llround(freq_hz * double(x.size()) / fs));
  return 2.0 * std::abs(spec[std::size_t(bin)]) / double(x.size());
}

int fft_peak_bin(const Eigen::VectorXd& x) {
  Eigen::FFT<double> fft;
  std::vector<double> in(x.data(), x.data() + x.size());
  std::vector<std::complex<double>> spec;
  fft.fwd(spec, in);
  int best = 1;
  for (std::size_t k = 1; k <= std::size_t(x.size() / 2); ++k)
    if (std::abs(spec[k]) > std::abs(spec[std::size_t(best)])) best = int(k);
  return best;
}

Eigen::VectorXd tone(double fs, double freq, Eigen::Index n, double amp = 1.0) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i)
    x[i] = amp * std::sin(2.0 * 3.14159265358979323846 * freq * double(i) / fs);
  return x;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("chatter_ingest_" + std::to_string(::getpid()) + "_" +
            std::to_string(rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

}  // namespace

TEST_SUITE("ingest") {

TEST_CASE("label parsing") {
  CHECK(parse_label("stable") == Label::Stable);
  CHECK(parse_label("Stable") == Label::Stable);
  CHECK(parse_label("MILD") == Label::MildChatter);
  CHECK(parse_label("chatter") == Label::Chatter);
  CHECK(parse_label("Unknown") == Label::Unknown);
  CHECK_THROWS_AS(parse_label("chattery"), UnknownLabelString);
  CHECK(binary_label(Label::Stable) == 0);
  CHECK(binary_label(Label::Chatter) == 1);
  CHECK(binary_label(Label::MildChatter) == 1);
  CHECK(binary_label(Label::MildChatter, false) == 0);
}

TEST_CASE("load_dataset round trip") {
  TempDir tmp;
  write_file(tmp.path / "a.csv", "1\n2\n3\n4\n5\n6\n7\n8\n9\n10\n");
  write_file(tmp.path / "a.json",
             "{\"sample_rate\":160000,\"label\":\"chatter\",\"stickout_cm\":5.08,"
             "\"rpm\":570,\"depth_of_cut_cm\":0.00508}");
  write_file(tmp.path / "b.csv", "0.0,1.5\n0.1,2.5\n");  // time,sample form
  write_file(tmp.path / "b.json",
             "{\"sample_rate\":10,\"label\":\"unknown\",\"stickout_cm\":5.08,"
             "\"rpm\":570,\"depth_of_cut_cm\":0.00508}");

  auto records = load_dataset(tmp.path.string());
  REQUIRE(records.size() == 2);
  CHECK(records[0].meta.id == "a");
  CHECK(records[0].samples.size() == 10);
  CHECK(records[0].sample_rate == 160000.0);
  CHECK(records[0].label == Label::Chatter);
  CHECK_FALSE(records[0].excluded_from_training);
  // unknown-labeled record is loaded but flagged excluded
  CHECK(records[1].label == Label::Unknown);
  CHECK(records[1].excluded_from_training);
  CHECK(records[1].samples.size() == 2);
  CHECK(records[1].samples[0] == doctest::Approx(1.5));
}

TEST_CASE("ingest error paths") {
  TempDir tmp;
  write_file(tmp.path / "x.csv", "1\n2\n");
  CHECK_THROWS_AS(load_record((tmp.path / "x.csv").string()), MissingMetadata);

  write_file(tmp.path / "x.json",
             "{\"sample_rate\":10,\"label\":\"stable\",\"stickout_cm\":1,"
             "\"rpm\":1,\"depth_of_cut_cm\":1}");
  CHECK_NOTHROW(load_record((tmp.path / "x.csv").string()));

  write_file(tmp.path / "bad.csv", "1\nnope\n3\n");
  write_file(tmp.path / "bad.json",
             "{\"sample_rate\":10,\"label\":\"stable\",\"stickout_cm\":1,"
             "\"rpm\":1,\"depth_of_cut_cm\":1}");
  try {
    load_record((tmp.path / "bad.csv").string());
    FAIL("expected MalformedCsv");
  } catch (const MalformedCsv& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }

  write_file(tmp.path / "nolabel.csv", "1\n2\n");
  write_file(tmp.path / "nolabel.json",
             "{\"sample_rate\":10,\"label\":\"wild\",\"stickout_cm\":1,"
             "\"rpm\":1,\"depth_of_cut_cm\":1}");
  CHECK_THROWS_AS(load_record((tmp.path / "nolabel.csv").string()),
                  UnknownLabelString);

  write_file(tmp.path / "missing.csv", "1\n2\n");
  write_file(tmp.path / "missing.json", "{\"sample_rate\":10,\"label\":\"stable\"}");
  CHECK_THROWS_AS(load_record((tmp.path / "missing.csv").string()),
                  MissingMetadata);
}

TEST_CASE("lowpass_decimate length and rate") {
  TimeSeriesRecord rec;
  rec.sample_rate = 160000.0;
  rec.samples = tone(160000.0, 1000.0, 160000);
  rec.label = Label::Stable;
  auto out = lowpass_decimate(rec, 10000.0, 5000.0);
  CHECK(out.sample_rate == 10000.0);
  CHECK(out.samples.size() == 10000);  // ceil(160000 / 16)

  rec.samples = tone(160000.0, 1000.0, 160001);
  CHECK(lowpass_decimate(rec, 10000.0, 5000.0).samples.size() == 10001);

  CHECK_THROWS_AS(lowpass_decimate(rec, 7000.0, 3000.0), NonIntegerDecimation);
  CHECK_THROWS_AS(lowpass_decimate(rec, 10000.0, 5001.0), CutoffAboveNyquist);
}

TEST_CASE("lowpass_decimate passband tone survives") {
  TimeSeriesRecord rec;
  rec.sample_rate = 160000.0;
  rec.samples = tone(160000.0, 1000.0, 160000);
  auto out = lowpass_decimate(rec, 10000.0, 5000.0);
  // FFT oracle on the output: same physical frequency, amplitude within 1%
  const double amp = tone_amplitude(out.samples, 10000.0, 1000.0);
  CHECK(amp == doctest::Approx(1.0).epsilon(0.01));
  CHECK(fft_peak_bin(out.samples) == 1000);  // 1 Hz bins
}

TEST_CASE("lowpass_decimate stopband tone dies") {
  TimeSeriesRecord rec;
  rec.sample_rate = 160000.0;
  rec.samples = tone(160000.0, 7000.0, 160000);
  auto out = lowpass_decimate(rec, 10000.0, 5000.0);
  // the 7 kHz tone aliases to 3 kHz after decimation; it must arrive
  // attenuated by at least 60 dB
  const double alias_amp = tone_amplitude(out.samples, 10000.0, 3000.0);
  CHECK(alias_amp < 1e-3);
}

TEST_CASE("normalize") {
  Eigen::VectorXd two(2);
  two << 0, 2;
  Eigen::VectorXd n2 = normalize(two);
  CHECK(n2[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(n2[1] == doctest::Approx(1.0).epsilon(1e-12));

  Eigen::VectorXd c(3);
  c << 1, 1, 1;
  CHECK_THROWS_AS(normalize(c), ConstantSignal);

  Eigen::VectorXd v(4);
  v << 1, 2, 3, 4;
  Eigen::VectorXd nv = normalize(v);
  CHECK(std::abs(nv.mean()) < 1e-12);
  const double sd = std::sqrt((nv.array() - nv.mean()).square().sum() / 4.0);
  CHECK(std::abs(sd - 1.0) < 1e-12);

  // idempotent up to 1e-9
  Eigen::VectorXd twice = normalize(nv);
  CHECK((twice - nv).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("split_chunks") {
  TimeSeriesRecord rec;
  rec.meta.id = "r";
  rec.label = Label::MildChatter;
  rec.samples = Eigen::VectorXd::LinSpaced(10, 0, 9);
  auto chunks = split_chunks(rec, 4);
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0].samples[0] == 0.0);
  CHECK(chunks[0].samples[3] == 3.0);
  CHECK(chunks[1].samples[0] == 4.0);
  CHECK(chunks[1].samples[3] == 7.0);
  CHECK(chunks[0].parent_id == "r");
  CHECK(chunks[1].index == 1);
  CHECK(chunks[1].label == Label::MildChatter);
  CHECK(chunks[1].id() == "r#1");

  rec.samples = Eigen::VectorXd::LinSpaced(4, 0, 3);
  CHECK(split_chunks(rec, 4).size() == 1);
  rec.samples = Eigen::VectorXd::LinSpaced(3, 0, 2);
  CHECK_THROWS_AS(split_chunks(rec, 4), ChunkLongerThanSignal);
}

TEST_CASE("split_chunks count property") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + int(rng.uniform_int(500));
    const int len = 2 + int(rng.uniform_int(60));
    TimeSeriesRecord rec;
    rec.meta.id = "p";
    rec.samples = Eigen::VectorXd::Random(n);
    if (n / len == 0) {
      CHECK_THROWS_AS(split_chunks(rec, len), ChunkLongerThanSignal);
      continue;
    }
    auto chunks = split_chunks(rec, len);
    CHECK(int(chunks.size()) == n / len);
    // concatenated chunks reproduce the head of the signal
    Eigen::Index at = 0;
    for (const auto& ch : chunks) {
      CHECK(ch.samples.size() == len);
      for (Eigen::Index i = 0; i < len; ++i)
        CHECK(ch.samples[i] == rec.samples[at + i]);
      at += len;
    }
  }
}

}  // TEST_SUITE
