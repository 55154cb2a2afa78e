#ifndef RCD_INGEST_HPP
#define RCD_INGEST_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rcd/types.hpp"

namespace rcd::ingest {

// NASA IMS run-to-failure recordings: whitespace-delimited ASCII files of
// 20480 rows, one column per accelerometer channel, named by dotted
// timestamps (year.month.day.hour.minute.second).
struct ImsExperimentLayout {
  int channel_count{8};
  double sampling_rate_hz{20000.0};
  int samples_per_file{20480};

  // Experiment 1: bearings 1..4 x accelerometers x/y -> 8 columns.
  // Experiments 2..3: one accelerometer per bearing -> 4 columns.
  static ImsExperimentLayout experiment(int id);

  // Column for (bearing 1..4, accelerometer index); throws when the layout
  // has no such channel.
  int column_for(int bearing, int accel_index) const;
};

struct TrialRecord {
  std::string timestamp;  // normalized dotted form from the filename
  std::vector<std::vector<double>> channels;  // channel_count x samples_per_file
};

TrialRecord read_ims_file(const std::filesystem::path& path, const ImsExperimentLayout& layout);

// Directory scan: files yielded in timestamp order. Unparseable filenames
// are skipped (and counted); a timestamp regression after sorting is a hard
// error since lexicographic order must equal chronological order.
class ImsStream {
 public:
  ImsStream(const std::filesystem::path& dir, ImsExperimentLayout layout);

  int trial_count() const { return static_cast<int>(files_.size()); }
  int skipped_count() const { return skipped_; }
  const std::vector<std::filesystem::path>& files() const { return files_; }
  const ImsExperimentLayout& layout() const { return layout_; }

  // Parses file i (0-based, in time order).
  TrialRecord read(int i) const;

 private:
  ImsExperimentLayout layout_;
  std::vector<std::filesystem::path> files_;
  int skipped_{0};
};

// Single-channel dataset at the layout's sampling rate, optionally decimated
// by keeping every `decimate`-th sample.
MultiTrialDataset select_channel(const ImsStream& stream, int bearing, int accel_index,
                                 int decimate = 1);

}  // namespace rcd::ingest

#endif  // RCD_INGEST_HPP
