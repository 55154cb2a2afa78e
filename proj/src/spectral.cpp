#include "rcd/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace rcd::spectral {

namespace {

// FFTW plan creation is not thread-safe; execution on private buffers is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffer {
  double* in{nullptr};
  fftw_complex* out{nullptr};
  fftw_plan plan{};
  int n{0};

  explicit FftwBuffer(int length) : n(length) {
    in = fftw_alloc_real(n);
    out = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  }
  ~FftwBuffer() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
};

void check_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument("spectral: non-finite input sample");
  }
}

std::vector<double> hann_taper(int half_window) {
  const int width = 2 * half_window + 1;
  std::vector<double> w(width, 1.0);
  if (half_window > 0) {
    for (int h = -half_window; h <= half_window; ++h) {
      w[h + half_window] =
          0.5 * (1.0 + std::cos(std::numbers::pi * h / static_cast<double>(half_window)));
    }
  }
  double energy = 0.0;
  for (double x : w) energy += x * x;
  const double scale = 1.0 / std::sqrt(energy);
  for (double& x : w) x *= scale;
  return w;
}

}  // namespace

Spectrum periodogram(const TrialSeries& trial) {
  const int T = trial.length();
  if (T < 8) throw std::invalid_argument("periodogram: trial length must be >= 8");
  check_finite(trial.samples);

  FftwBuffer buf(T);
  for (int t = 0; t < T; ++t) buf.in[t] = trial.samples[t];
  fftw_execute(buf.plan);

  Spectrum s;
  s.series_length = T;
  s.fs_hz = trial.fs_hz;
  const int bins = T / 2 + 1;
  s.freqs_hz.resize(bins);
  s.power.resize(bins);
  for (int k = 0; k < bins; ++k) {
    s.freqs_hz[k] = static_cast<double>(k) / T * trial.fs_hz;
    const double re = buf.out[k][0];
    const double im = buf.out[k][1];
    s.power[k] = (re * re + im * im) / T;
  }
  return s;
}

Spectrum smooth(const Spectrum& spectrum, int half_bandwidth) {
  if (half_bandwidth < 0 || half_bandwidth >= spectrum.bins()) {
    throw std::invalid_argument("smooth: half bandwidth out of range");
  }
  if (half_bandwidth == 0) return spectrum;

  const int T = spectrum.series_length;
  // Two-sided grid via real-input symmetry I(T-k) = I(k).
  std::vector<double> two_sided(T);
  for (int j = 0; j < T; ++j) {
    two_sided[j] = spectrum.power[std::min(j, T - j)];
  }
  const int m = half_bandwidth;
  const double inv = 1.0 / (2 * m + 1);
  Spectrum out = spectrum;
  out.smoothing_m = spectrum.smoothing_m + m;
  for (int k = 0; k < spectrum.bins(); ++k) {
    double acc = 0.0;
    for (int d = -m; d <= m; ++d) {
      acc += two_sided[((k + d) % T + T) % T];
    }
    out.power[k] = acc * inv;
  }
  return out;
}

int default_half_bandwidth(int series_length) {
  return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(series_length)) / 2.0));
}

double two_sided_mass(const Spectrum& spectrum) {
  const int T = spectrum.series_length;
  double total = spectrum.power[0];
  const int last = spectrum.bins() - 1;
  for (int k = 1; k <= last; ++k) {
    const bool self_conjugate = (2 * k == T);
    total += self_conjugate ? spectrum.power[k] : 2.0 * spectrum.power[k];
  }
  return total;
}

Spectrogram spectrogram(const TrialSeries& trial, int half_window, int hop) {
  const int T = trial.length();
  const int width = 2 * half_window + 1;
  if (half_window < 0 || width > T) {
    throw std::invalid_argument("spectrogram: window wider than trial");
  }
  if (hop < 1) throw std::invalid_argument("spectrogram: hop must be >= 1");
  check_finite(trial.samples);

  const std::vector<double> w = hann_taper(half_window);
  FftwBuffer buf(width);
  const int bins = width / 2 + 1;

  Spectrogram sg;
  sg.half_window = half_window;
  sg.hop = hop;
  sg.fs_hz = trial.fs_hz;
  sg.freqs_hz.resize(bins);
  for (int k = 0; k < bins; ++k) sg.freqs_hz[k] = static_cast<double>(k) / width * trial.fs_hz;

  for (int center = half_window; center + half_window < T; center += hop) {
    for (int h = -half_window; h <= half_window; ++h) {
      buf.in[h + half_window] = trial.samples[center + h] * w[h + half_window];
    }
    fftw_execute(buf.plan);
    sg.times_s.push_back(center / trial.fs_hz);
    for (int k = 0; k < bins; ++k) {
      const double re = buf.out[k][0];
      const double im = buf.out[k][1];
      sg.power.push_back(re * re + im * im);
    }
  }
  return sg;
}

Spectrogram smooth_spectrogram(const Spectrogram& sg, int time_half_bandwidth,
                               int freq_half_bandwidth) {
  if (time_half_bandwidth < 0 || freq_half_bandwidth < 0) {
    throw std::invalid_argument("smooth_spectrogram: negative half bandwidth");
  }
  if (time_half_bandwidth == 0 && freq_half_bandwidth == 0) return sg;
  const int nt = sg.n_times();
  const int nf = sg.n_freqs();
  Spectrogram tmp = sg;
  for (int ti = 0; ti < nt; ++ti) {
    for (int fi = 0; fi < nf; ++fi) {
      double acc = 0.0;
      int n = 0;
      for (int d = -time_half_bandwidth; d <= time_half_bandwidth; ++d) {
        const int tj = ti + d;
        if (tj < 0 || tj >= nt) continue;
        acc += sg.at(tj, fi);
        ++n;
      }
      tmp.at(ti, fi) = acc / n;
    }
  }
  Spectrogram out = tmp;
  for (int ti = 0; ti < nt; ++ti) {
    for (int fi = 0; fi < nf; ++fi) {
      double acc = 0.0;
      int n = 0;
      for (int d = -freq_half_bandwidth; d <= freq_half_bandwidth; ++d) {
        const int fj = fi + d;
        if (fj < 0 || fj >= nf) continue;
        acc += tmp.at(ti, fj);
        ++n;
      }
      out.at(ti, fi) = acc / n;
    }
  }
  return out;
}

void SpectralStack::add(const Spectrum& s) {
  if (count_ == 0) {
    sum_ = s;
    count_ = 1;
    return;
  }
  if (s.bins() != sum_.bins() || s.series_length != sum_.series_length ||
      s.fs_hz != sum_.fs_hz) {
    throw std::invalid_argument("spectral stack: grid mismatch");
  }
  for (int k = 0; k < sum_.bins(); ++k) sum_.power[k] += s.power[k];
  ++count_;
}

Spectrum SpectralStack::mean() const {
  if (count_ == 0) throw std::logic_error("spectral stack: empty");
  Spectrum out = sum_;
  for (double& p : out.power) p /= count_;
  return out;
}

}  // namespace rcd::spectral
