#include "rcd/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace rcd::io {

namespace {

std::string fmt_g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void write_dataset_csv(std::ostream& out, const MultiTrialDataset& data) {
  out << "# " << kCsvSchemaVersion << " dataset fs_hz=" << fmt_g17(data.fs_hz)
      << " trials=" << data.trial_count();
  if (!data.trials.empty()) out << " trial_length=" << data.trials.front().length();
  if (data.true_change_trial) out << " eta=" << *data.true_change_trial;
  out << "\n";
  for (int r = 0; r < data.trial_count(); ++r) out << (r ? "," : "") << "trial_" << (r + 1);
  out << "\n";
  if (data.trials.empty()) return;
  const int T = data.trials.front().length();
  for (int t = 0; t < T; ++t) {
    for (int r = 0; r < data.trial_count(); ++r) {
      out << (r ? "," : "") << fmt_g17(data.trials[r].samples[t]);
    }
    out << "\n";
  }
}

MultiTrialDataset read_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# rcd-csv", 0) != 0) {
    throw std::runtime_error("dataset csv: missing schema comment line");
  }
  MultiTrialDataset data;
  {
    std::istringstream meta(line);
    std::string tok;
    while (meta >> tok) {
      if (tok.rfind("fs_hz=", 0) == 0) data.fs_hz = std::stod(tok.substr(6));
      if (tok.rfind("eta=", 0) == 0) data.true_change_trial = std::stoi(tok.substr(4));
    }
  }
  if (!std::getline(in, line)) throw std::runtime_error("dataset csv: missing header");
  int columns = 1;
  for (char c : line) {
    if (c == ',') ++columns;
  }
  data.trials.assign(columns, TrialSeries{{}, data.fs_hz});
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    for (int c = 0; c < columns; ++c) {
      if (!std::getline(ls, cell, ',')) {
        throw std::runtime_error("dataset csv: short row");
      }
      data.trials[c].samples.push_back(std::stod(cell));
    }
  }
  return data;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  out << "# " << kCsvSchemaVersion << " spectrum T=" << s.series_length
      << " fs_hz=" << fmt_g17(s.fs_hz) << " smoothing_m=" << s.smoothing_m << "\n";
  out << "freq_hz,power\n";
  for (int k = 0; k < s.bins(); ++k) {
    out << fmt_g17(s.freqs_hz[k]) << "," << fmt_g17(s.power[k]) << "\n";
  }
}

void write_spectrogram_csv(std::ostream& out, const Spectrogram& sg) {
  out << "# " << kCsvSchemaVersion << " spectrogram half_window=" << sg.half_window
      << " hop=" << sg.hop << " fs_hz=" << fmt_g17(sg.fs_hz) << "\n";
  out << "time_s";
  for (double f : sg.freqs_hz) out << "," << fmt_g17(f);
  out << "\n";
  for (int ti = 0; ti < sg.n_times(); ++ti) {
    out << fmt_g17(sg.times_s[ti]);
    for (int fi = 0; fi < sg.n_freqs(); ++fi) out << "," << fmt_g17(sg.at(ti, fi));
    out << "\n";
  }
}

namespace {

void put_u64_le(std::ostream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint64_t get_u64_le(std::istream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

}  // namespace

void write_spg1(std::ostream& out, const std::vector<double>& values, std::uint64_t rows,
                std::uint64_t cols) {
  if (values.size() != rows * cols) throw std::invalid_argument("spg1: shape mismatch");
  out.write("SPG1", 4);
  put_u64_le(out, rows);
  put_u64_le(out, cols);
  for (double x : values) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(x));
    std::memcpy(&bits, &x, 8);
    put_u64_le(out, bits);
  }
}

std::vector<double> read_spg1(std::istream& in, std::uint64_t& rows, std::uint64_t& cols) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::string(magic, 4) != "SPG1") throw std::runtime_error("spg1: bad magic");
  rows = get_u64_le(in);
  cols = get_u64_le(in);
  std::vector<double> values(rows * cols);
  for (auto& x : values) {
    const std::uint64_t bits = get_u64_le(in);
    std::memcpy(&x, &bits, 8);
  }
  if (!in) throw std::runtime_error("spg1: truncated payload");
  return values;
}

void write_diagram_csv(std::ostream& out, const PersistenceDiagram& d) {
  out << "# " << kCsvSchemaVersion << " diagram\n";
  out << "dim,birth,death\n";
  for (const auto& p : d.points) {
    out << d.dim << "," << fmt_g17(p.birth) << "," << fmt_g17(p.death) << "\n";
  }
}

PersistenceDiagram read_diagram_csv(std::istream& in) {
  PersistenceDiagram d;
  std::string line;
  bool have_dim = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("dim,", 0) == 0) continue;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    const int dim = std::stoi(cell);
    if (!have_dim) {
      d.dim = dim;
      have_dim = true;
    } else if (dim != d.dim) {
      throw std::runtime_error("diagram csv: mixed dimensions in one diagram");
    }
    PersistencePoint p;
    std::getline(ls, cell, ',');
    p.birth = std::stod(cell);
    std::getline(ls, cell, ',');
    p.death = std::stod(cell);
    d.points.push_back(p);
  }
  d.essential_closed = true;
  return d;
}

void write_boundary_csv(std::ostream& out, const detect::Report& report) {
  out << "# " << kCsvSchemaVersion << " boundaries scenario=" << report.scenario << "\n";
  out << "r";
  for (const auto& m : report.metrics) {
    out << ",D_" << m.metric_name << ",C_" << m.metric_name << ",alarm_" << m.metric_name;
  }
  out << "\n";
  const size_t n = report.metrics.empty() ? 0 : report.metrics.front().distances.values.size();
  for (size_t r = 0; r < n; ++r) {
    out << (r + 1);
    for (const auto& m : report.metrics) {
      const bool alarm = m.cusum.statistics[r] > m.cusum.threshold;
      out << "," << fmt_g17(m.distances.values[r]) << "," << fmt_g17(m.cusum.statistics[r]) << ","
          << (alarm ? 1 : 0);
    }
    out << "\n";
  }
}

std::string report_to_json(const detect::Report& report) {
  nlohmann::json j;
  j["scenario"] = report.scenario;
  j["trial_count"] = report.trial_count;
  if (report.true_change_trial) j["true_change_trial"] = *report.true_change_trial;
  j["metrics"] = nlohmann::json::array();
  for (const auto& m : report.metrics) {
    nlohmann::json jm;
    jm["name"] = m.metric_name;
    jm["distances"] = m.distances.values;
    jm["cusum"] = {{"statistics", m.cusum.statistics},
                   {"mu_d", m.cusum.mu_d},
                   {"sigma_d", m.cusum.sigma_d},
                   {"threshold", m.cusum.threshold},
                   {"alarms", m.cusum.alarms}};
    if (m.cusum.first_alarm) jm["first_alarm"] = *m.cusum.first_alarm;
    if (m.detection_delay) jm["detection_delay"] = *m.detection_delay;
    jm["false_alarm_count"] = m.false_alarm_count;
    j["metrics"].push_back(std::move(jm));
  }
  return j.dump(2);
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("hash: cannot open " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016" PRIx64, h);
  return hex;
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace rcd::io
