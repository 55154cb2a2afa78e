#ifndef RCD_SIMGEN_HPP
#define RCD_SIMGEN_HPP

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <variant>
#include <vector>

#include "rcd/types.hpp"

namespace rcd::simgen {

// AR(2) process parametrized by its spectral peak: complex root pair at
// modulus rho and angle 2*pi*f/fs.
struct Ar2Spec {
  double peak_freq_hz{10.0};
  double sampling_rate_hz{100.0};
  double modulus{0.95};
  double innovation_sd{1.0};
};

// Piecewise frequency trajectory over trial time.
struct FreqPath {
  enum class Interp { step, linear };

  struct Breakpoint {
    double time_s{0.0};
    double freq_hz{0.0};
  };

  std::vector<Breakpoint> breakpoints;
  Interp interpolation{Interp::linear};

  // Instantaneous frequency at time t (clamped to the first/last breakpoint).
  double at(double time_s) const;
};

// Per-trial generators making up a scenario segment.
struct GenAr2 {
  Ar2Spec spec;
};
struct GenMixture {
  std::vector<Ar2Spec> components;
  std::vector<double> weights;  // same length; need not be normalized
};
// Per-trial fixed peak drifting linearly across the segment's trials.
struct GenDrift {
  Ar2Spec base;
  double from_hz{40.0};
  double to_hz{10.0};
};
// Per-trial fixed peak drawn i.i.d. uniform on [lo, hi].
struct GenRandomPeak {
  Ar2Spec base;
  double lo_hz{5.0};
  double hi_hz{15.0};
};
// Within-trial smooth rise-and-fall: base -> peak -> base over `duration_s`
// starting at a random onset uniform on [onset_lo_s, onset_hi_s].
struct GenBump {
  Ar2Spec base;
  double peak_hz{35.0};
  double onset_lo_s{2.0};
  double onset_hi_s{9.0};
  double duration_s{6.0};
};
// Alternating trials: even offsets fixed at base, odd offsets switch
// abruptly base <-> high `switches` times, equally spaced.
struct GenAlternate {
  Ar2Spec base;
  double high_hz{35.0};
  int switches{3};
};

using TrialGenerator =
    std::variant<GenAr2, GenMixture, GenDrift, GenRandomPeak, GenBump, GenAlternate>;

struct Segment {
  int first_trial{1};  // inclusive, 1-based
  int last_trial{1};   // inclusive
  TrialGenerator generator;
};

struct ScenarioSpec {
  int trials{0};
  int trial_length{0};
  double sampling_rate_hz{100.0};
  std::vector<Segment> segments;
  std::optional<int> true_change_trial;
  std::uint64_t seed{0};

  // Throws std::invalid_argument on violated invariants (segments must
  // partition 1..trials, eta must sit on a segment boundary, ...).
  void validate() const;
};

// phi1 = 2*rho*cos(2*pi f/fs), phi2 = -rho^2.
std::pair<double, double> ar2_coefficients(const Ar2Spec& spec);

// Closed-form AR(2) spectral density sd^2 / |1 - phi1 e^{-i2pw} - phi2 e^{-i4pw}|^2
// at cycles-per-sample frequency omega = f_hz / fs.
double ar2_spectrum(const Ar2Spec& spec, double freq_hz);

TrialSeries generate_ar2(const Ar2Spec& spec, int length, std::uint64_t seed);
TrialSeries generate_tvar2(const FreqPath& path, const Ar2Spec& spec_template, int length,
                           std::uint64_t seed);
TrialSeries generate_mixture(const std::vector<Ar2Spec>& components,
                             const std::vector<double>& weights, int length, std::uint64_t seed);

// The four built-in scenarios; throws std::invalid_argument on unknown id.
ScenarioSpec build_example(int example_id);

// Deterministic: equal (spec, seed) gives bit-identical output.
MultiTrialDataset generate(const ScenarioSpec& spec);

// Plain-text scenario config (key-value lines plus a segment table).
ScenarioSpec parse_scenario(std::istream& in);
void write_scenario(std::ostream& out, const ScenarioSpec& spec);

}  // namespace rcd::simgen

#endif  // RCD_SIMGEN_HPP
