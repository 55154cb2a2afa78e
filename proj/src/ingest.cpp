#include "rcd/ingest.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rcd::ingest {

namespace fs = std::filesystem;

ImsExperimentLayout ImsExperimentLayout::experiment(int id) {
  ImsExperimentLayout layout;
  if (id == 1) {
    layout.channel_count = 8;
  } else if (id == 2 || id == 3) {
    layout.channel_count = 4;
  } else {
    throw std::invalid_argument("ims: experiment id must be 1, 2 or 3");
  }
  return layout;
}

int ImsExperimentLayout::column_for(int bearing, int accel_index) const {
  if (bearing < 1 || bearing > 4) throw std::invalid_argument("ims: bearing must be 1..4");
  if (channel_count == 8) {
    if (accel_index < 0 || accel_index > 1) {
      throw std::invalid_argument("ims: accelerometer index must be 0 or 1");
    }
    return (bearing - 1) * 2 + accel_index;
  }
  if (accel_index != 0) {
    throw std::invalid_argument("ims: this layout has one accelerometer per bearing");
  }
  return bearing - 1;
}

TrialRecord read_ims_file(const fs::path& path, const ImsExperimentLayout& layout) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ims: cannot open " + path.string());

  TrialRecord rec;
  rec.timestamp = path.filename().string();
  rec.channels.assign(layout.channel_count,
                      std::vector<double>(layout.samples_per_file, 0.0));

  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    if (row >= layout.samples_per_file) {
      throw std::runtime_error("ims: " + path.string() + " row " + std::to_string(row + 1) +
                               ": more than " + std::to_string(layout.samples_per_file) +
                               " rows");
    }
    std::istringstream ls(line);
    for (int c = 0; c < layout.channel_count; ++c) {
      std::string token;
      if (!(ls >> token)) {
        throw std::runtime_error("ims: " + path.string() + " row " + std::to_string(row + 1) +
                                 ": expected " + std::to_string(layout.channel_count) +
                                 " columns, got " + std::to_string(c));
      }
      double value = 0.0;
      const char* begin = token.data();
      const char* end = begin + token.size();
      auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw std::runtime_error("ims: " + path.string() + " row " + std::to_string(row + 1) +
                                 ": bad numeric token '" + token + "'");
      }
      rec.channels[c][row] = value;
    }
    std::string extra;
    if (ls >> extra) {
      throw std::runtime_error("ims: " + path.string() + " row " + std::to_string(row + 1) +
                               ": expected " + std::to_string(layout.channel_count) +
                               " columns, found extra token '" + extra + "'");
    }
    ++row;
  }
  if (row != layout.samples_per_file) {
    throw std::runtime_error("ims: " + path.string() + ": short file, expected " +
                             std::to_string(layout.samples_per_file) + " rows, got " +
                             std::to_string(row));
  }
  return rec;
}

namespace {

// Dotted timestamp -> comparable key; nullopt-like failure signalled by the
// bool. Accepts exactly six numeric fields.
bool parse_timestamp(const std::string& name, std::array<int, 6>& out) {
  std::istringstream in(name);
  std::string part;
  int i = 0;
  while (std::getline(in, part, '.')) {
    if (i >= 6) return false;
    if (part.empty() ||
        !std::all_of(part.begin(), part.end(), [](unsigned char c) { return std::isdigit(c); })) {
      return false;
    }
    out[i++] = std::stoi(part);
  }
  return i == 6;
}

}  // namespace

ImsStream::ImsStream(const fs::path& dir, ImsExperimentLayout layout) : layout_(layout) {
  if (!fs::is_directory(dir)) {
    throw std::runtime_error("ims: not a directory: " + dir.string());
  }
  struct Entry {
    std::array<int, 6> ts;
    fs::path path;
  };
  std::vector<Entry> entries;
  for (const auto& de : fs::directory_iterator(dir)) {
    if (!de.is_regular_file()) continue;
    std::array<int, 6> ts{};
    if (!parse_timestamp(de.path().filename().string(), ts)) {
      ++skipped_;
      continue;
    }
    entries.push_back({ts, de.path()});
  }
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.path.filename().string() < b.path.filename().string();
  });
  // Lexicographic order must agree with chronological order.
  for (size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].ts < entries[i - 1].ts) {
      throw std::runtime_error("ims: timestamp regression between " +
                               entries[i - 1].path.filename().string() + " and " +
                               entries[i].path.filename().string());
    }
  }
  files_.reserve(entries.size());
  for (auto& e : entries) files_.push_back(std::move(e.path));
}

TrialRecord ImsStream::read(int i) const {
  if (i < 0 || i >= trial_count()) throw std::out_of_range("ims: trial index out of range");
  return read_ims_file(files_[i], layout_);
}

MultiTrialDataset select_channel(const ImsStream& stream, int bearing, int accel_index,
                                 int decimate) {
  if (decimate < 1) throw std::invalid_argument("ims: decimation factor must be >= 1");
  const int column = stream.layout().column_for(bearing, accel_index);
  MultiTrialDataset data;
  data.fs_hz = stream.layout().sampling_rate_hz / decimate;
  data.trials.reserve(stream.trial_count());
  for (int i = 0; i < stream.trial_count(); ++i) {
    const TrialRecord rec = stream.read(i);
    const std::vector<double>& full = rec.channels[column];
    TrialSeries trial;
    trial.fs_hz = data.fs_hz;
    for (size_t t = 0; t < full.size(); t += decimate) trial.samples.push_back(full[t]);
    data.trials.push_back(std::move(trial));
  }
  return data;
}

}  // namespace rcd::ingest
