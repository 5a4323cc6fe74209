#include "chatter/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "chatter/dsp.hpp"

namespace fs = std::filesystem;

namespace chatter {

Label parse_label(const std::string& s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "stable") return Label::Stable;
  if (lower == "mild") return Label::MildChatter;
  if (lower == "chatter") return Label::Chatter;
  if (lower == "unknown") return Label::Unknown;
  throw UnknownLabelString("unrecognized label string: \"" + s + "\"");
}

std::string label_string(Label label) {
  switch (label) {
    case Label::Stable: return "stable";
    case Label::MildChatter: return "mild";
    case Label::Chatter: return "chatter";
    case Label::Unknown: return "unknown";
  }
  return "unknown";
}

int binary_label(Label label, bool mild_is_chatter) {
  switch (label) {
    case Label::Stable: return 0;
    case Label::Chatter: return 1;
    case Label::MildChatter: return mild_is_chatter ? 1 : 0;
    case Label::Unknown: break;
  }
  throw DataError("binary_label: Unknown has no binary class");
}

namespace {

double parse_field(const std::string& text, std::size_t begin, std::size_t end,
                   std::size_t line_no) {
  // trim ASCII whitespace (tolerates \r\n line endings)
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  double value = 0.0;
  auto res = std::from_chars(text.data() + begin, text.data() + end, value);
  if (res.ec != std::errc{} || res.ptr != text.data() + end)
    throw MalformedCsv("non-numeric value at row " + std::to_string(line_no));
  return value;
}

Eigen::VectorXd read_sample_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MalformedCsv("cannot open CSV: " + path);
  std::vector<double> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    bool blank = line.find_first_not_of(" \t\r\n") == std::string::npos;
    if (blank) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) {
      samples.push_back(parse_field(line, 0, line.size(), line_no));
    } else {
      // two columns: time,sample; keep the sample
      if (line.find(',', comma + 1) != std::string::npos)
        throw MalformedCsv("more than two columns at row " + std::to_string(line_no));
      parse_field(line, 0, comma, line_no);  // validate the time column
      samples.push_back(parse_field(line, comma + 1, line.size(), line_no));
    }
  }
  if (samples.empty()) throw MalformedCsv("empty CSV: " + path);
  return Eigen::Map<Eigen::VectorXd>(samples.data(), Eigen::Index(samples.size()));
}

}  // namespace

TimeSeriesRecord load_record(const std::string& csv_path) {
  fs::path csv(csv_path);
  fs::path meta_path = csv;
  meta_path.replace_extension(".json");
  if (!fs::exists(meta_path))
    throw MissingMetadata("no metadata sidecar for " + csv_path);

  std::ifstream meta_in(meta_path);
  nlohmann::json meta;
  try {
    meta_in >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw MissingMetadata("unreadable metadata " + meta_path.string() + ": " + e.what());
  }
  for (const char* key : {"sample_rate", "label", "stickout_cm", "rpm", "depth_of_cut_cm"})
    if (!meta.contains(key))
      throw MissingMetadata(std::string("metadata key missing: ") + key + " in " +
                            meta_path.string());

  TimeSeriesRecord rec;
  rec.samples = read_sample_csv(csv_path);
  rec.sample_rate = meta.at("sample_rate").get<double>();
  if (!(rec.sample_rate > 0.0))
    throw MissingMetadata("sample_rate must be positive in " + meta_path.string());
  rec.label = parse_label(meta.at("label").get<std::string>());
  rec.meta.stickout_cm = meta.at("stickout_cm").get<double>();
  rec.meta.rpm = meta.at("rpm").get<double>();
  rec.meta.depth_of_cut_cm = meta.at("depth_of_cut_cm").get<double>();
  rec.meta.id = csv.stem().string();
  rec.excluded_from_training = (rec.label == Label::Unknown);
  return rec;
}

std::vector<TimeSeriesRecord> load_dataset(const std::string& dir) {
  if (!fs::is_directory(dir)) throw DataError("dataset directory not found: " + dir);
  std::vector<std::string> csvs;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv")
      csvs.push_back(entry.path().string());
  std::sort(csvs.begin(), csvs.end());
  std::vector<TimeSeriesRecord> records;
  records.reserve(csvs.size());
  for (const auto& p : csvs) records.push_back(load_record(p));
  return records;
}

TimeSeriesRecord lowpass_decimate(const TimeSeriesRecord& rec,
                                  double target_rate_hz, double cutoff_hz,
                                  int filter_order) {
  if (!(target_rate_hz > 0.0))
    throw NonIntegerDecimation("target rate must be positive");
  const double ratio = rec.sample_rate / target_rate_hz;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio)
    throw NonIntegerDecimation("sample rate " + std::to_string(rec.sample_rate) +
                               " is not an integer multiple of target " +
                               std::to_string(target_rate_hz));
  if (cutoff_hz > target_rate_hz / 2.0)
    throw CutoffAboveNyquist("cutoff " + std::to_string(cutoff_hz) +
                             " exceeds target Nyquist " +
                             std::to_string(target_rate_hz / 2.0));
  const auto factor = Eigen::Index(rounded);

  TimeSeriesRecord out = rec;
  out.sample_rate = target_rate_hz;
  if (factor == 1 && cutoff_hz >= rec.sample_rate / 2.0) return out;

  const auto sos = dsp::butterworth_lowpass_sos(filter_order, cutoff_hz, rec.sample_rate);
  Eigen::VectorXd filtered = dsp::sosfiltfilt(sos, rec.samples);

  const Eigen::Index n_out = (rec.samples.size() + factor - 1) / factor;
  Eigen::VectorXd dec(n_out);
  for (Eigen::Index i = 0; i < n_out; ++i) dec[i] = filtered[i * factor];
  out.samples = std::move(dec);
  return out;
}

Eigen::VectorXd normalize(const Eigen::VectorXd& samples) {
  const Eigen::Index n = samples.size();
  if (n < 2) throw DataError("normalize: need at least two samples");
  const double mean = samples.mean();
  const double var = (samples.array() - mean).square().sum() / double(n);
  if (!(var > 0.0)) throw ConstantSignal("normalize: zero variance");
  return (samples.array() - mean) / std::sqrt(var);
}

std::vector<Chunk> split_chunks(const TimeSeriesRecord& rec, int chunk_len) {
  if (chunk_len < 2) throw ConfigError("split_chunks: chunk_len must be >= 2");
  const Eigen::Index n = rec.samples.size();
  const Eigen::Index count = n / chunk_len;
  if (count == 0)
    throw ChunkLongerThanSignal("chunk_len " + std::to_string(chunk_len) +
                                " exceeds signal length " + std::to_string(n));
  std::vector<Chunk> chunks;
  chunks.reserve(std::size_t(count));
  for (Eigen::Index c = 0; c < count; ++c) {
    Chunk ch;
    ch.samples = rec.samples.segment(c * chunk_len, chunk_len);
    ch.parent_id = rec.meta.id;
    ch.index = int(c);
    ch.label = rec.label;
    chunks.push_back(std::move(ch));
  }
  return chunks;
}

}  // namespace chatter
