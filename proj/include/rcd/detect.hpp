#ifndef RCD_DETECT_HPP
#define RCD_DETECT_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rcd/metrics.hpp"
#include "rcd/types.hpp"

namespace rcd::detect {

// Scenario 1: stationary within and across trials; running mean of smoothed
//             periodograms (l0 = 1) vs the next trial's periodogram.
// Scenario 2: stationary within trials only; consecutive smoothed
//             periodograms (l0 = r).
// Scenario 3: locally stationary within trials; consecutive spectrograms.
struct DetectorConfig {
  int scenario{1};
  metrics::MetricKind metric{};

  int burn_in{20};  // boundaries assumed change-free, used for mu_D/sigma_D

  enum class ThresholdPolicy { kappa_sigma, absolute };
  ThresholdPolicy threshold_policy{ThresholdPolicy::kappa_sigma};
  double kappa{5.0};
  double absolute_h{0.0};

  // Spectral estimation; negative values resolve to defaults at run time
  // (smoothing m = ceil(sqrt(T)/2), taper width 2L+1 ~ fs, hop = (2L+1)/4).
  int smoothing_m{-1};
  int spec_half_window{-1};
  int spec_hop{-1};
  int sg_smooth_time{3};  // box half-bandwidths; 0 disables
  int sg_smooth_freq{3};

  // Diagram denoising before Wasserstein: epsilon = filter_frac * the
  // diagram's own value range; an absolute epsilon >= 0 overrides when set.
  double diagram_filter_frac{0.01};
  double diagram_filter_abs{-1.0};

  bool log10_transform{false};       // applied to diagram inputs only
  bool standardize_increments{false};  // CUSUM increments (D - mu)/sigma

  void validate() const;  // throws std::invalid_argument
  int resolved_smoothing_m(int trial_length) const;
  int resolved_half_window(double fs_hz, int trial_length) const;
  int resolved_hop(double fs_hz, int trial_length) const;
};

struct DistanceSeries {
  std::vector<double> values;  // D_r, r = 1..R-1
  std::string metric_name;
};

struct CusumResult {
  std::vector<double> statistics;  // C_r, same index set as the distances
  double mu_d{0.0};
  double sigma_d{0.0};
  double threshold{0.0};
  // Alarm at boundary r is recorded as trial index r+1, the first trial of
  // the suspected new regime; first_alarm estimates eta+1.
  std::vector<int> alarms;
  std::optional<int> first_alarm;
};

struct MetricReport {
  std::string metric_name;
  DistanceSeries distances;
  CusumResult cusum;
  std::optional<int> detection_delay;  // first_alarm - eta
  int false_alarm_count{0};            // alarms at or before eta
};

struct Report {
  int scenario{1};
  int trial_count{0};
  std::optional<int> true_change_trial;
  std::vector<MetricReport> metrics;
};

// Online detector: feed trials in order; from the second trial on, push()
// returns D_r for the boundary just completed (one value per metric).
// Trial r+1 is consumed exactly once and D_r is emitted before trial r+2.
class Detector {
 public:
  Detector(const DetectorConfig& cfg, std::vector<metrics::MetricKind> metric_kinds);
  ~Detector();
  Detector(Detector&&) noexcept;
  Detector& operator=(Detector&&) noexcept;

  std::optional<std::vector<double>> push(const TrialSeries& trial);
  const std::vector<metrics::MetricKind>& metric_kinds() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  friend Report run_pipeline(const MultiTrialDataset&, const DetectorConfig&,
                             const std::vector<metrics::MetricKind>&, int);
};

// Batch distance series for cfg.metric.
DistanceSeries distance_series(const MultiTrialDataset& data, const DetectorConfig& cfg);

CusumResult cusum(const DistanceSeries& series, const DetectorConfig& cfg);

// End to end over several metrics; per-trial features shared across metrics.
// With jobs > 1, per-trial spectral and diagram work runs concurrently ahead
// of the sequential detector fold; results are identical to jobs = 1.
Report run_pipeline(const MultiTrialDataset& data, const DetectorConfig& cfg,
                    const std::vector<metrics::MetricKind>& metric_kinds, int jobs = 1);

}  // namespace rcd::detect

#endif  // RCD_DETECT_HPP
