#ifndef RCD_TYPES_HPP
#define RCD_TYPES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rcd {

// One trial's uniformly sampled real-valued signal.
struct TrialSeries {
  std::vector<double> samples;
  double fs_hz{1.0};

  int length() const { return static_cast<int>(samples.size()); }
  double duration_s() const { return samples.size() / fs_hz; }
};

struct MultiTrialDataset {
  std::vector<TrialSeries> trials;
  double fs_hz{1.0};
  std::optional<int> true_change_trial;  // ground-truth eta (1-based)

  int trial_count() const { return static_cast<int>(trials.size()); }
};

// Nonnegative power on the one-sided frequency grid k/T*fs, k = 0..floor(T/2).
struct Spectrum {
  std::vector<double> freqs_hz;
  std::vector<double> power;
  int series_length{0};  // T of the underlying trial
  double fs_hz{1.0};
  int smoothing_m{0};  // moving-average half-bandwidth already applied

  int bins() const { return static_cast<int>(power.size()); }
};

// Nonnegative power on a (time, frequency) grid; power is row-major,
// rows indexed by window center time.
struct Spectrogram {
  std::vector<double> times_s;
  std::vector<double> freqs_hz;
  std::vector<double> power;  // times_s.size() * freqs_hz.size(), row-major
  int half_window{0};         // L; taper width is 2L+1
  int hop{1};
  double fs_hz{1.0};

  int n_times() const { return static_cast<int>(times_s.size()); }
  int n_freqs() const { return static_cast<int>(freqs_hz.size()); }
  double at(int ti, int fi) const { return power[static_cast<size_t>(ti) * freqs_hz.size() + fi]; }
  double& at(int ti, int fi) { return power[static_cast<size_t>(ti) * freqs_hz.size() + fi]; }
};

struct PersistencePoint {
  double birth{0.0};
  double death{0.0};

  double persistence() const { return death - birth; }
  friend bool operator==(const PersistencePoint& a, const PersistencePoint& b) {
    return a.birth == b.birth && a.death == b.death;
  }
};

// Finite multiset of (birth, death) pairs for one homology dimension.
// The essential component is closed as (global min, global max) so every
// point is finite; essential_closed records that this was done.
struct PersistenceDiagram {
  int dim{0};
  std::vector<PersistencePoint> points;
  bool essential_closed{false};

  int size() const { return static_cast<int>(points.size()); }
};

}  // namespace rcd

#endif  // RCD_TYPES_HPP
