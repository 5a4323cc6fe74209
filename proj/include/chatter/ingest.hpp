#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "chatter/errors.hpp"

namespace chatter {

enum class Label { Stable, MildChatter, Chatter, Unknown };

// Case-insensitive mapping from the on-disk strings
// {"stable","mild","chatter","unknown"}; throws UnknownLabelString otherwise.
Label parse_label(const std::string& s);
std::string label_string(Label label);

// Binary class used by the classifiers: Stable -> 0, MildChatter/Chatter -> 1.
// The merge of mild chatter into the positive class is configurable at the
// evaluation layer; Unknown has no binary label and is excluded upstream.
int binary_label(Label label, bool mild_is_chatter = true);

struct RecordMeta {
  double stickout_cm = 0.0;
  double rpm = 0.0;
  double depth_of_cut_cm = 0.0;
  std::string id;
};

// A labeled, rate-stamped 1-D acceleration signal.
struct TimeSeriesRecord {
  Eigen::VectorXd samples;
  double sample_rate = 0.0;  // Hz
  Label label = Label::Unknown;
  RecordMeta meta;
  bool excluded_from_training = false;  // set for Unknown-labeled records
};

// A contiguous, non-overlapping slice of a (normalized) parent record.
struct Chunk {
  Eigen::VectorXd samples;
  std::string parent_id;
  int index = 0;
  Label label = Label::Unknown;
  std::string id() const { return parent_id + "#" + std::to_string(index); }
};

struct MissingMetadata : DataError {
  using DataError::DataError;
};
struct MalformedCsv : DataError {
  using DataError::DataError;
};
struct UnknownLabelString : DataError {
  using DataError::DataError;
};
struct NonIntegerDecimation : DataError {
  using DataError::DataError;
};
struct CutoffAboveNyquist : DataError {
  using DataError::DataError;
};
struct ConstantSignal : DataError {
  using DataError::DataError;
};
struct ChunkLongerThanSignal : DataError {
  using DataError::DataError;
};

// Loads every *.csv in `dir` (single column of samples, or two columns
// time,sample) with its sibling .json metadata file carrying exactly
// {sample_rate, label, stickout_cm, rpm, depth_of_cut_cm}. Files are visited
// in sorted name order so the result is stable across platforms.
std::vector<TimeSeriesRecord> load_dataset(const std::string& dir);

// Reads a single CSV/JSON pair; `csv_path` must end in ".csv".
TimeSeriesRecord load_record(const std::string& csv_path);

// Anti-aliased integer-factor downsampling: zero-phase Butterworth low-pass
// (cascaded second-order sections, applied forward-backward) followed by
// decimation. Requires sample_rate / target_rate to be an integer and
// cutoff <= target_rate / 2. Output length is ceil(n / factor).
TimeSeriesRecord lowpass_decimate(const TimeSeriesRecord& rec,
                                  double target_rate_hz, double cutoff_hz,
                                  int filter_order = 12);

// Zero mean, unit population standard deviation. Throws ConstantSignal when
// the variance is zero; requires at least two samples.
Eigen::VectorXd normalize(const Eigen::VectorXd& samples);

// floor(n / chunk_len) contiguous non-overlapping chunks; a tail shorter
// than chunk_len is discarded. Throws ChunkLongerThanSignal when no chunk
// fits. The record's samples are used as-is (normalize first if desired).
std::vector<Chunk> split_chunks(const TimeSeriesRecord& rec, int chunk_len);

}  // namespace chatter
