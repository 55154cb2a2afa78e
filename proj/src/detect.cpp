#include "rcd/detect.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "rcd/spectral.hpp"
#include "rcd/tda.hpp"

namespace rcd::detect {

namespace {

void check_metric_compat(int scenario, const metrics::MetricKind& kind) {
  using metrics::MetricFamily;
  if (kind.family == MetricFamily::w1_fn && scenario == 3) {
    throw std::invalid_argument("metric W1_fn requires periodograms (scenarios 1 or 2)");
  }
  if (kind.family == MetricFamily::w2_diagram && kind.dim == 1 && scenario != 3) {
    throw std::invalid_argument("H1 diagrams require spectrograms (scenario 3)");
  }
}

double value_range(const PersistenceDiagram& d) {
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& p : d.points) {
    if (first) {
      lo = p.birth;
      hi = p.death;
      first = false;
    } else {
      lo = std::min(lo, p.birth);
      hi = std::max(hi, p.death);
    }
  }
  return hi - lo;
}

}  // namespace

void DetectorConfig::validate() const {
  if (scenario < 1 || scenario > 3) throw std::invalid_argument("scenario must be 1, 2 or 3");
  if (burn_in < 2) throw std::invalid_argument("burn-in must be >= 2");
  if (threshold_policy == ThresholdPolicy::kappa_sigma && !(kappa > 0.0)) {
    throw std::invalid_argument("kappa must be positive");
  }
  if (threshold_policy == ThresholdPolicy::absolute && !(absolute_h > 0.0)) {
    throw std::invalid_argument("absolute threshold must be positive");
  }
  if (diagram_filter_frac < 0.0) throw std::invalid_argument("diagram filter fraction < 0");
  check_metric_compat(scenario, metric);
}

int DetectorConfig::resolved_smoothing_m(int trial_length) const {
  return smoothing_m >= 0 ? smoothing_m : spectral::default_half_bandwidth(trial_length);
}

int DetectorConfig::resolved_half_window(double fs_hz, int trial_length) const {
  if (spec_half_window >= 0) return spec_half_window;
  int half = static_cast<int>(std::lround(fs_hz)) / 2;  // width 2L+1 ~ one second
  while (2 * half + 1 > trial_length && half > 0) --half;
  return half;
}

int DetectorConfig::resolved_hop(double fs_hz, int trial_length) const {
  if (spec_hop >= 1) return spec_hop;
  return std::max(1, (2 * resolved_half_window(fs_hz, trial_length) + 1) / 4);
}

// ---------------------------------------------------------------------------
// Streaming detector.

struct Detector::Impl {
  DetectorConfig cfg;
  std::vector<metrics::MetricKind> kinds;
  bool need_diagrams{false};

  // Per-trial features of the previous trial (scenarios 2/3) and the running
  // stack of smoothed periodograms (scenario 1).
  struct Features {
    Spectrum spec;
    Spectrogram sg;
    PersistenceDiagram d0;
    PersistenceDiagram d1;
  };

  spectral::SpectralStack stack;
  Features prev;
  bool has_prev{false};
  int trial_length{0};
  double fs_hz{0.0};

  PersistenceDiagram denoise(const PersistenceDiagram& d) const {
    const double eps = cfg.diagram_filter_abs >= 0.0
                           ? cfg.diagram_filter_abs
                           : cfg.diagram_filter_frac * value_range(d);
    return tda::filter_diagram(d, eps);
  }

  template <typename Field>
  Field maybe_log10(Field field) const {
    if (cfg.log10_transform) {
      for (double& v : field.values) v = std::log10(v + 1e-300);
    }
    return field;
  }

  Features featurize(const TrialSeries& trial) const {
    Features f;
    if (cfg.scenario == 3) {
      f.sg = spectral::spectrogram(trial, cfg.resolved_half_window(fs_hz, trial_length),
                                   cfg.resolved_hop(fs_hz, trial_length));
      if (cfg.sg_smooth_time > 0 || cfg.sg_smooth_freq > 0) {
        f.sg = spectral::smooth_spectrogram(f.sg, cfg.sg_smooth_time, cfg.sg_smooth_freq);
      }
      if (need_diagrams) {
        auto [d0, d1] = tda::sublevel_ph_2d(maybe_log10(tda::to_field(f.sg)));
        f.d0 = denoise(d0);
        f.d1 = denoise(d1);
      }
    } else {
      f.spec = spectral::smooth(spectral::periodogram(trial),
                                cfg.resolved_smoothing_m(trial_length));
      if (need_diagrams) {
        f.d0 = denoise(tda::sublevel_ph_1d(maybe_log10(tda::to_field(f.spec))));
      }
    }
    return f;
  }

  double evaluate(const metrics::MetricKind& kind, const Features& current,
                  const Features& next) const {
    using metrics::MetricFamily;
    switch (kind.family) {
      case MetricFamily::l1_fn:
        return cfg.scenario == 3 ? metrics::fn_distance(current.sg, next.sg, 1)
                                 : metrics::fn_distance(current.spec, next.spec, 1);
      case MetricFamily::l2_fn:
        return cfg.scenario == 3 ? metrics::fn_distance(current.sg, next.sg, 2)
                                 : metrics::fn_distance(current.spec, next.spec, 2);
      case MetricFamily::w1_fn:
        return metrics::emd_1d(current.spec, next.spec);
      case MetricFamily::w2_diagram:
        return kind.dim == 0 ? metrics::wasserstein_diagrams(current.d0, next.d0)
                             : metrics::wasserstein_diagrams(current.d1, next.d1);
    }
    throw std::logic_error("unreachable metric family");
  }

  std::optional<std::vector<double>> push(const TrialSeries& trial) {
    if (trial_length == 0) {
      trial_length = trial.length();
      fs_hz = trial.fs_hz;
    } else if (trial.length() != trial_length || trial.fs_hz != fs_hz) {
      throw std::invalid_argument("detector: trial length or sampling rate mismatch");
    }
    return feed(featurize(trial));
  }

  std::optional<std::vector<double>> feed(Features next) {
    std::optional<std::vector<double>> result;
    if (cfg.scenario == 1) {
      if (has_prev) {
        // Current reference is the running mean of smoothed periodograms.
        Features ref;
        ref.spec = stack.mean();
        if (need_diagrams) {
          ref.d0 = denoise(tda::sublevel_ph_1d(maybe_log10(tda::to_field(ref.spec))));
        }
        std::vector<double> out;
        out.reserve(kinds.size());
        for (const auto& kind : kinds) out.push_back(evaluate(kind, ref, next));
        result = std::move(out);
      }
      stack.add(next.spec);
    } else {
      if (has_prev) {
        std::vector<double> out;
        out.reserve(kinds.size());
        for (const auto& kind : kinds) out.push_back(evaluate(kind, prev, next));
        result = std::move(out);
      }
      prev = std::move(next);
    }
    has_prev = true;
    return result;
  }
};

Detector::Detector(const DetectorConfig& cfg, std::vector<metrics::MetricKind> metric_kinds)
    : impl_(std::make_unique<Impl>()) {
  impl_->cfg = cfg;
  if (metric_kinds.empty()) metric_kinds = {cfg.metric};
  for (const auto& kind : metric_kinds) {
    DetectorConfig probe = cfg;
    probe.metric = kind;
    probe.validate();
    if (kind.is_diagram_metric()) impl_->need_diagrams = true;
  }
  impl_->kinds = std::move(metric_kinds);
}

Detector::~Detector() = default;
Detector::Detector(Detector&&) noexcept = default;
Detector& Detector::operator=(Detector&&) noexcept = default;

std::optional<std::vector<double>> Detector::push(const TrialSeries& trial) {
  return impl_->push(trial);
}

const std::vector<metrics::MetricKind>& Detector::metric_kinds() const { return impl_->kinds; }

// ---------------------------------------------------------------------------

DistanceSeries distance_series(const MultiTrialDataset& data, const DetectorConfig& cfg) {
  cfg.validate();
  if (data.trial_count() < 3) throw std::invalid_argument("need at least 3 trials");
  Detector det(cfg, {cfg.metric});
  DistanceSeries out;
  out.metric_name = cfg.metric.name();
  for (const auto& trial : data.trials) {
    if (auto d = det.push(trial)) out.values.push_back((*d)[0]);
  }
  return out;
}

CusumResult cusum(const DistanceSeries& series, const DetectorConfig& cfg) {
  const int n = static_cast<int>(series.values.size());
  const int burn = cfg.burn_in;
  if (burn >= n) throw std::invalid_argument("cusum: burn-in longer than distance series");

  CusumResult res;
  double mu = 0.0;
  for (int i = 0; i < burn; ++i) mu += series.values[i];
  mu /= burn;
  double ss = 0.0;
  for (int i = 0; i < burn; ++i) {
    const double d = series.values[i] - mu;
    ss += d * d;
  }
  res.mu_d = mu;
  res.sigma_d = std::sqrt(ss / (burn - 1));

  const bool standardized = cfg.standardize_increments;
  if (standardized && !(res.sigma_d > 0.0)) {
    throw std::invalid_argument("cusum: zero burn-in sigma with standardized increments");
  }
  if (cfg.threshold_policy == DetectorConfig::ThresholdPolicy::kappa_sigma) {
    const double scale = standardized ? 1.0 : res.sigma_d;
    if (!(scale > 0.0)) {
      throw std::invalid_argument("cusum: zero burn-in sigma with kappa*sigma threshold");
    }
    res.threshold = cfg.kappa * scale;
  } else {
    res.threshold = cfg.absolute_h;
  }

  res.statistics.resize(n);
  double c = 0.0;
  for (int r = 0; r < n; ++r) {
    double increment = series.values[r] - mu;
    if (standardized) increment /= res.sigma_d;
    c = std::max(0.0, c + increment);
    res.statistics[r] = c;
    if (c > res.threshold) {
      res.alarms.push_back(r + 2);  // boundary r (1-based r+1) flags trial r+2
    }
  }
  if (!res.alarms.empty()) res.first_alarm = res.alarms.front();
  return res;
}

Report run_pipeline(const MultiTrialDataset& data, const DetectorConfig& cfg,
                    const std::vector<metrics::MetricKind>& metric_kinds, int jobs) {
  if (data.trial_count() < 3) throw std::invalid_argument("need at least 3 trials");
  Detector det(cfg, metric_kinds);
  const auto& kinds = det.metric_kinds();
  Detector::Impl& impl = *det.impl_;

  std::vector<DistanceSeries> series(kinds.size());
  for (size_t m = 0; m < kinds.size(); ++m) series[m].metric_name = kinds[m].name();

  auto collect = [&](std::optional<std::vector<double>> d) {
    if (!d) return;
    for (size_t m = 0; m < kinds.size(); ++m) series[m].values.push_back((*d)[m]);
  };

  if (jobs <= 1) {
    for (const auto& trial : data.trials) collect(det.push(trial));
  } else {
    // Per-trial features are pure; compute them ahead, fold sequentially.
    impl.trial_length = data.trials.front().length();
    impl.fs_hz = data.trials.front().fs_hz;
    for (const auto& trial : data.trials) {
      if (trial.length() != impl.trial_length || trial.fs_hz != impl.fs_hz) {
        throw std::invalid_argument("detector: trial length or sampling rate mismatch");
      }
    }
    const int n = data.trial_count();
    std::vector<Detector::Impl::Features> features(n);
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        features[i] = impl.featurize(data.trials[i]);
      }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < std::min(jobs, n); ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& f : features) collect(impl.feed(std::move(f)));
  }

  Report report;
  report.scenario = cfg.scenario;
  report.trial_count = data.trial_count();
  report.true_change_trial = data.true_change_trial;
  for (size_t m = 0; m < kinds.size(); ++m) {
    MetricReport mr;
    mr.metric_name = kinds[m].name();
    mr.distances = std::move(series[m]);
    mr.cusum = cusum(mr.distances, cfg);
    if (data.true_change_trial) {
      const int eta = *data.true_change_trial;
      if (mr.cusum.first_alarm) mr.detection_delay = *mr.cusum.first_alarm - eta;
      for (int a : mr.cusum.alarms) {
        if (a <= eta) ++mr.false_alarm_count;
      }
    }
    report.metrics.push_back(std::move(mr));
  }
  return report;
}

}  // namespace rcd::detect
