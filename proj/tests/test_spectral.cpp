#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "rcd/simgen.hpp"
#include "rcd/spectral.hpp"

using namespace rcd;
using namespace rcd::spectral;

namespace {

TrialSeries make_trial(std::vector<double> samples, double fs = 1.0) {
  TrialSeries t;
  t.samples = std::move(samples);
  t.fs_hz = fs;
  return t;
}

TrialSeries random_trial(int T, std::uint64_t seed, double fs = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> x(T);
  for (auto& v : x) v = normal(rng);
  return make_trial(std::move(x), fs);
}

int argmax_bin(const Spectrum& s) {
  int best = 0;
  for (int k = 1; k < s.bins(); ++k) {
    if (s.power[k] > s.power[best]) best = k;
  }
  return best;
}

}  // namespace

TEST_CASE("periodogram of the zero signal is zero") {
  const Spectrum s = periodogram(make_trial(std::vector<double>(64, 0.0)));
  CHECK(s.bins() == 33);
  for (double p : s.power) CHECK(p == 0.0);
}

TEST_CASE("constant series concentrates at DC") {
  const double c = 1.7;
  const int T = 64;
  const Spectrum s = periodogram(make_trial(std::vector<double>(T, c)));
  CHECK(s.power[0] == doctest::Approx(T * c * c).epsilon(1e-12));
  for (int k = 1; k < s.bins(); ++k) CHECK(std::abs(s.power[k]) < 1e-9);
}

TEST_CASE("pure cosine at an exact bin") {
  const int T = 64;
  std::vector<double> x(T);
  for (int t = 0; t < T; ++t) x[t] = std::cos(2.0 * std::numbers::pi * 8.0 * t / T);
  const Spectrum s = periodogram(make_trial(std::move(x)));
  CHECK(s.power[8] == doctest::Approx(T / 4.0).epsilon(1e-12));
  for (int k = 0; k < s.bins(); ++k) {
    if (k != 8) CHECK(std::abs(s.power[k]) < 1e-9);
  }
}

TEST_CASE("periodogram matches the direct DFT sum") {
  for (int T : {8, 37, 64, 100}) {
    const TrialSeries t = random_trial(T, 1000 + T);
    const Spectrum s = periodogram(t);
    const auto dft = oracles::dft_direct(t.samples);
    for (int k = 0; k < s.bins(); ++k) {
      CHECK(s.power[k] == doctest::Approx(std::norm(dft[k])).epsilon(1e-9));
    }
  }
}

TEST_CASE("Parseval identity on the two-sided grid") {
  for (int T : {64, 256, 1024}) {
    for (int rep = 0; rep < 20; ++rep) {
      const TrialSeries t = random_trial(T, 17 * T + rep);
      double energy = 0.0;
      for (double x : t.samples) energy += x * x;
      CHECK(two_sided_mass(periodogram(t)) == doctest::Approx(energy).epsilon(1e-9));
    }
  }
}

TEST_CASE("time reversal leaves the periodogram unchanged") {
  const TrialSeries t = random_trial(100, 5);
  TrialSeries rev = t;
  std::reverse(rev.samples.begin(), rev.samples.end());
  const Spectrum a = periodogram(t), b = periodogram(rev);
  for (int k = 0; k < a.bins(); ++k) {
    CHECK(a.power[k] == doctest::Approx(b.power[k]).epsilon(1e-9));
  }
}

TEST_CASE("periodogram rejects bad input") {
  CHECK_THROWS_AS(periodogram(make_trial({1, 2, 3})), std::invalid_argument);
  std::vector<double> x(16, 0.0);
  x[3] = std::nan("");
  CHECK_THROWS_AS(periodogram(make_trial(std::move(x))), std::invalid_argument);
}

TEST_CASE("smoothing with m=0 is the identity") {
  const Spectrum s = periodogram(random_trial(64, 8));
  const Spectrum sm = smooth(s, 0);
  CHECK(sm.power == s.power);
}

TEST_CASE("smoothing keeps a constant spectrum constant") {
  Spectrum s = periodogram(make_trial(std::vector<double>(32, 0.0)));
  for (double& p : s.power) p = 2.5;
  for (int m : {1, 2, 5}) {
    const Spectrum sm = smooth(s, m);
    for (double p : sm.power) CHECK(p == doctest::Approx(2.5).epsilon(1e-12));
  }
}

TEST_CASE("unit mass spreads evenly over the kernel support") {
  Spectrum s = periodogram(make_trial(std::vector<double>(16, 0.0)));
  s.power.assign(s.power.size(), 0.0);
  s.power[3] = 1.0;
  const Spectrum sm = smooth(s, 1);
  CHECK(sm.power[2] == doctest::Approx(1.0 / 3.0));
  CHECK(sm.power[3] == doctest::Approx(1.0 / 3.0));
  CHECK(sm.power[4] == doctest::Approx(1.0 / 3.0));
  CHECK(sm.power[1] == doctest::Approx(0.0));
  CHECK(sm.power[5] == doctest::Approx(0.0));
}

TEST_CASE("smoothing preserves two-sided mass") {
  const Spectrum s = periodogram(random_trial(128, 21));
  for (int m : {1, 3, 7}) {
    CHECK(two_sided_mass(smooth(s, m)) == doctest::Approx(two_sided_mass(s)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(smooth(s, s.bins() + 10), std::invalid_argument);
}

TEST_CASE("default half-bandwidth follows the square-root rule") {
  CHECK(default_half_bandwidth(200) == static_cast<int>(std::ceil(std::sqrt(200.0) / 2.0)));
  CHECK(default_half_bandwidth(64) == 4);
}

TEST_CASE("spectrogram of the zero signal is zero and shapes are right") {
  const int T = 200, L = 20, hop = 10;
  const Spectrogram sg = spectrogram(make_trial(std::vector<double>(T, 0.0), 100.0), L, hop);
  CHECK(sg.n_freqs() == L + 1);  // window width 41 -> bins 0..20
  CHECK(sg.n_times() == (T - 1 - L - L) / hop + 1);
  for (double p : sg.power) CHECK(p == 0.0);
  CHECK_THROWS_AS(spectrogram(make_trial(std::vector<double>(10, 0.0)), 20, 1),
                  std::invalid_argument);
}

TEST_CASE("single-window spectrogram matches the periodogram argmax") {
  const int T = 101;
  std::vector<double> x(T);
  for (int t = 0; t < T; ++t) x[t] = std::sin(2.0 * std::numbers::pi * 0.22 * t);
  const TrialSeries trial = make_trial(std::move(x));
  const Spectrogram sg = spectrogram(trial, (T - 1) / 2, T);
  CHECK(sg.n_times() == 1);
  const Spectrum s = periodogram(trial);
  int sg_best = 0;
  for (int fi = 1; fi < sg.n_freqs(); ++fi) {
    if (sg.at(0, fi) > sg.at(0, sg_best)) sg_best = fi;
  }
  CHECK(sg.freqs_hz[sg_best] == doctest::Approx(s.freqs_hz[argmax_bin(s)]).epsilon(1e-12));
}

TEST_CASE("stationary trial has a stable spectrogram ridge") {
  simgen::Ar2Spec spec;
  spec.peak_freq_hz = 40.0;
  spec.sampling_rate_hz = 100.0;
  spec.modulus = 0.95;
  const TrialSeries t = simgen::generate_ar2(spec, 1000, 2024);
  const Spectrogram sg = spectrogram(t, 50, 25);
  std::vector<double> ridge(sg.n_times());
  for (int ti = 0; ti < sg.n_times(); ++ti) {
    int best = 0;
    for (int fi = 1; fi < sg.n_freqs(); ++fi) {
      if (sg.at(ti, fi) > sg.at(ti, best)) best = fi;
    }
    ridge[ti] = sg.freqs_hz[best];
  }
  double mean = 0.0;
  for (double r : ridge) mean += r;
  mean /= ridge.size();
  double ss = 0.0;
  for (double r : ridge) ss += (r - mean) * (r - mean);
  CHECK(std::sqrt(ss / (ridge.size() - 1)) < 5.0);
}

TEST_CASE("spectrogram smoothing keeps nonnegativity and shape") {
  const TrialSeries t = random_trial(300, 4, 100.0);
  const Spectrogram sg = spectrogram(t, 30, 15);
  const Spectrogram sm = smooth_spectrogram(sg, 1, 2);
  CHECK(sm.n_times() == sg.n_times());
  CHECK(sm.n_freqs() == sg.n_freqs());
  for (double p : sm.power) CHECK(p >= 0.0);
}

TEST_CASE("spectral stack averages pushed spectra") {
  const Spectrum a = periodogram(random_trial(64, 1));
  SpectralStack stack;
  stack.add(a);
  CHECK(stack.mean().power == a.power);

  Spectrum b = a;
  for (double& p : b.power) p *= 3.0;
  stack.add(b);
  const Spectrum m = stack.mean();
  for (int k = 0; k < a.bins(); ++k) {
    CHECK(m.power[k] == doctest::Approx(2.0 * a.power[k]).epsilon(1e-12));
  }
  CHECK(stack.count() == 2);

  const Spectrum wrong = periodogram(random_trial(32, 2));
  CHECK_THROWS_AS(stack.add(wrong), std::invalid_argument);
  SpectralStack empty;
  CHECK_THROWS_AS(empty.mean(), std::logic_error);
}

TEST_CASE("averaged periodograms approach the closed-form spectrum") {
  simgen::Ar2Spec spec;
  spec.peak_freq_hz = 10.0;
  spec.sampling_rate_hz = 100.0;
  spec.modulus = 0.9;
  // Each bin of a single periodogram has ~100% relative sd, so a pointwise
  // bound over ~500 bins needs heavy averaging: 1500 replicates bring the
  // worst-case relative error down to ~10% (measured), well inside 20%.
  const int T = 1024;
  SpectralStack stack;
  for (int i = 0; i < 1500; ++i) {
    stack.add(periodogram(simgen::generate_ar2(spec, T, 777 + i)));
  }
  const Spectrum mean = stack.mean();
  for (int k = 2; k < mean.bins(); ++k) {
    const double truth = simgen::ar2_spectrum(spec, mean.freqs_hz[k]);
    CHECK(std::abs(mean.power[k] - truth) <= 0.2 * truth);
  }
}
