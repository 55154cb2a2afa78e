#include "rcd/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace rcd::simgen {

namespace {

constexpr int kBurnIn = 500;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 1));
}

// Box-Muller on top of mt19937_64; pinned here so generated datasets are
// reproducible independently of the standard library's normal_distribution.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : engine_(seed) {}

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  double uniform() {  // [0, 1)
    return (engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
  double spare_{0.0};
  bool have_spare_{false};
};

void check_spec(const Ar2Spec& spec) {
  if (!(spec.sampling_rate_hz > 0.0)) {
    throw std::invalid_argument("ar2: sampling rate must be positive");
  }
  if (!(spec.peak_freq_hz > 0.0) || spec.peak_freq_hz >= spec.sampling_rate_hz / 2.0) {
    throw std::invalid_argument("ar2: peak frequency must lie in (0, fs/2)");
  }
  if (!(spec.modulus > 0.0) || !(spec.modulus < 1.0)) {
    throw std::invalid_argument("ar2: root modulus must lie in (0, 1)");
  }
  if (spec.innovation_sd < 0.0) {
    throw std::invalid_argument("ar2: innovation sd must be nonnegative");
  }
}

// AR(2) recursion with per-sample coefficients and a discarded burn-in.
template <typename PhiAt>
TrialSeries run_ar2(PhiAt&& phi_at, double innovation_sd, double fs_hz, int length,
                    std::uint64_t seed) {
  if (length <= 0) throw std::invalid_argument("ar2: trial length must be positive");
  GaussianRng rng(seed);
  double x1 = 0.0, x2 = 0.0;
  const auto [phi1_0, phi2_0] = phi_at(0);
  for (int t = 0; t < kBurnIn; ++t) {
    const double x = phi1_0 * x1 + phi2_0 * x2 + innovation_sd * rng.normal();
    x2 = x1;
    x1 = x;
  }
  TrialSeries out;
  out.fs_hz = fs_hz;
  out.samples.resize(length);
  for (int t = 0; t < length; ++t) {
    const auto [phi1, phi2] = phi_at(t);
    const double x = phi1 * x1 + phi2 * x2 + innovation_sd * rng.normal();
    out.samples[t] = x;
    x2 = x1;
    x1 = x;
  }
  return out;
}

double sample_sd(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / v.size());
}

}  // namespace

std::pair<double, double> ar2_coefficients(const Ar2Spec& spec) {
  check_spec(spec);
  const double angle = 2.0 * std::numbers::pi * spec.peak_freq_hz / spec.sampling_rate_hz;
  return {2.0 * spec.modulus * std::cos(angle), -spec.modulus * spec.modulus};
}

double ar2_spectrum(const Ar2Spec& spec, double freq_hz) {
  const auto [phi1, phi2] = ar2_coefficients(spec);
  const double w = 2.0 * std::numbers::pi * freq_hz / spec.sampling_rate_hz;
  const double re = 1.0 - phi1 * std::cos(w) - phi2 * std::cos(2.0 * w);
  const double im = phi1 * std::sin(w) + phi2 * std::sin(2.0 * w);
  return spec.innovation_sd * spec.innovation_sd / (re * re + im * im);
}

double FreqPath::at(double time_s) const {
  if (breakpoints.empty()) throw std::invalid_argument("freq path: no breakpoints");
  if (time_s <= breakpoints.front().time_s) return breakpoints.front().freq_hz;
  if (time_s >= breakpoints.back().time_s) return breakpoints.back().freq_hz;
  for (size_t i = 1; i < breakpoints.size(); ++i) {
    if (time_s < breakpoints[i].time_s) {
      const auto& a = breakpoints[i - 1];
      const auto& b = breakpoints[i];
      if (interpolation == Interp::step) return a.freq_hz;
      const double u = (time_s - a.time_s) / (b.time_s - a.time_s);
      return a.freq_hz + u * (b.freq_hz - a.freq_hz);
    }
  }
  return breakpoints.back().freq_hz;
}

TrialSeries generate_ar2(const Ar2Spec& spec, int length, std::uint64_t seed) {
  const auto phi = ar2_coefficients(spec);
  return run_ar2([&](int) { return phi; }, spec.innovation_sd, spec.sampling_rate_hz, length,
                 seed);
}

TrialSeries generate_tvar2(const FreqPath& path, const Ar2Spec& spec_template, int length,
                           std::uint64_t seed) {
  if (path.breakpoints.empty()) throw std::invalid_argument("freq path: no breakpoints");
  double prev = -1.0;
  for (const auto& bp : path.breakpoints) {
    if (!(bp.freq_hz > 0.0) || bp.freq_hz >= spec_template.sampling_rate_hz / 2.0) {
      throw std::invalid_argument("freq path: breakpoint frequency outside (0, Nyquist)");
    }
    if (bp.time_s < 0.0 || bp.time_s <= prev) {
      throw std::invalid_argument("freq path: breakpoint times must be strictly increasing");
    }
    prev = bp.time_s;
  }
  const double fs = spec_template.sampling_rate_hz;
  Ar2Spec inst = spec_template;
  return run_ar2(
      [&](int t) {
        inst.peak_freq_hz = path.at(t / fs);
        return ar2_coefficients(inst);
      },
      spec_template.innovation_sd, fs, length, seed);
}

TrialSeries generate_mixture(const std::vector<Ar2Spec>& components,
                             const std::vector<double>& weights, int length, std::uint64_t seed) {
  if (components.empty()) throw std::invalid_argument("mixture: no components");
  if (weights.size() != components.size()) {
    throw std::invalid_argument("mixture: weights/components length mismatch");
  }
  TrialSeries out;
  out.fs_hz = components.front().sampling_rate_hz;
  out.samples.assign(length, 0.0);
  for (size_t i = 0; i < components.size(); ++i) {
    const TrialSeries part = generate_ar2(components[i], length, mix_seed(seed, i));
    for (int t = 0; t < length; ++t) out.samples[t] += weights[i] * part.samples[t];
  }
  const double sd = sample_sd(out.samples);
  if (sd > 0.0) {
    for (double& x : out.samples) x /= sd;
  }
  return out;
}

void ScenarioSpec::validate() const {
  if (trials <= 0) throw std::invalid_argument("scenario: trials must be positive");
  if (trial_length <= 0) throw std::invalid_argument("scenario: trial_length must be positive");
  if (!(sampling_rate_hz > 0.0)) throw std::invalid_argument("scenario: bad sampling rate");
  if (segments.empty()) throw std::invalid_argument("scenario: no segments");
  int expect = 1;
  for (const auto& seg : segments) {
    if (seg.first_trial != expect || seg.last_trial < seg.first_trial) {
      throw std::invalid_argument("scenario: segments must partition 1..trials in order");
    }
    expect = seg.last_trial + 1;
  }
  if (expect != trials + 1) {
    throw std::invalid_argument("scenario: segments must partition 1..trials");
  }
  if (true_change_trial) {
    const int eta = *true_change_trial;
    bool on_boundary = false;
    for (const auto& seg : segments) {
      if (seg.last_trial == eta && eta < trials) on_boundary = true;
    }
    if (!on_boundary) {
      throw std::invalid_argument("scenario: true_change_trial must be a segment boundary");
    }
  }
}

ScenarioSpec build_example(int example_id) {
  ScenarioSpec s;
  s.sampling_rate_hz = 100.0;
  Ar2Spec base;
  base.sampling_rate_hz = 100.0;
  switch (example_id) {
    case 1: {
      s.trials = 200;
      s.trial_length = 200;
      s.true_change_trial = 100;
      Ar2Spec lo = base, hi = base;
      lo.peak_freq_hz = 10.0;
      hi.peak_freq_hz = 40.0;
      s.segments = {{1, 100, GenAr2{lo}}, {101, 200, GenAr2{hi}}};
      break;
    }
    case 2: {
      s.trials = 200;
      s.trial_length = 200;
      s.true_change_trial = 100;
      Ar2Spec lo = base, hi = base;
      lo.peak_freq_hz = 10.0;
      hi.peak_freq_hz = 40.0;
      s.segments = {{1, 100, GenAr2{lo}},
                    {101, 200, GenMixture{{lo, hi}, {1.0, 1.0}}}};
      break;
    }
    case 3: {
      s.trials = 400;
      s.trial_length = 500;
      s.true_change_trial = 300;
      Ar2Spec lo = base, hi = base;
      lo.peak_freq_hz = 10.0;
      hi.peak_freq_hz = 40.0;
      s.segments = {{1, 100, GenAr2{hi}},
                    {101, 200, GenDrift{base, 40.0, 10.0}},
                    {201, 300, GenRandomPeak{base, 5.0, 15.0}},
                    {301, 400, GenMixture{{lo, hi}, {1.0, 1.0}}}};
      break;
    }
    case 4: {
      s.trials = 200;
      s.trial_length = 1500;
      s.true_change_trial = 100;
      Ar2Spec b15 = base;
      b15.peak_freq_hz = 15.0;
      s.segments = {{1, 100, GenBump{b15, 35.0, 2.0, 9.0, 6.0}},
                    {101, 200, GenAlternate{b15, 35.0, 3}}};
      break;
    }
    default:
      throw std::invalid_argument("build_example: example id must be 1..4");
  }
  s.validate();
  return s;
}

namespace {

TrialSeries generate_trial(const ScenarioSpec& spec, const Segment& seg, int trial_1based) {
  const int T = spec.trial_length;
  const double fs = spec.sampling_rate_hz;
  const std::uint64_t trial_seed = mix_seed(spec.seed, static_cast<std::uint64_t>(trial_1based));
  // Separate stream for per-trial random parameters so parameter draws do
  // not perturb the innovation stream.
  GaussianRng param_rng(mix_seed(trial_seed, 0xfeedULL));
  const int offset = trial_1based - seg.first_trial;
  const int seg_len = seg.last_trial - seg.first_trial + 1;

  return std::visit(
      [&](const auto& gen) -> TrialSeries {
        using G = std::decay_t<decltype(gen)>;
        if constexpr (std::is_same_v<G, GenAr2>) {
          Ar2Spec sp = gen.spec;
          sp.sampling_rate_hz = fs;
          return generate_ar2(sp, T, trial_seed);
        } else if constexpr (std::is_same_v<G, GenMixture>) {
          std::vector<Ar2Spec> comps = gen.components;
          for (auto& c : comps) c.sampling_rate_hz = fs;
          return generate_mixture(comps, gen.weights, T, trial_seed);
        } else if constexpr (std::is_same_v<G, GenDrift>) {
          Ar2Spec sp = gen.base;
          sp.sampling_rate_hz = fs;
          const double u = seg_len > 1 ? static_cast<double>(offset) / (seg_len - 1) : 0.0;
          sp.peak_freq_hz = gen.from_hz + u * (gen.to_hz - gen.from_hz);
          return generate_ar2(sp, T, trial_seed);
        } else if constexpr (std::is_same_v<G, GenRandomPeak>) {
          Ar2Spec sp = gen.base;
          sp.sampling_rate_hz = fs;
          sp.peak_freq_hz = gen.lo_hz + param_rng.uniform() * (gen.hi_hz - gen.lo_hz);
          return generate_ar2(sp, T, trial_seed);
        } else if constexpr (std::is_same_v<G, GenBump>) {
          Ar2Spec sp = gen.base;
          sp.sampling_rate_hz = fs;
          const double onset =
              gen.onset_lo_s + param_rng.uniform() * (gen.onset_hi_s - gen.onset_lo_s);
          FreqPath path;
          path.interpolation = FreqPath::Interp::linear;
          path.breakpoints = {{0.0, sp.peak_freq_hz},
                              {onset, sp.peak_freq_hz},
                              {onset + gen.duration_s / 2.0, gen.peak_hz},
                              {onset + gen.duration_s, sp.peak_freq_hz}};
          return generate_tvar2(path, sp, T, trial_seed);
        } else {
          static_assert(std::is_same_v<G, GenAlternate>);
          Ar2Spec sp = gen.base;
          sp.sampling_rate_hz = fs;
          if (offset % 2 == 0) {
            return generate_ar2(sp, T, trial_seed);
          }
          FreqPath path;
          path.interpolation = FreqPath::Interp::step;
          const double dur = T / fs;
          path.breakpoints.push_back({0.0, sp.peak_freq_hz});
          for (int k = 1; k <= gen.switches; ++k) {
            const double f = (k % 2 == 1) ? gen.high_hz : sp.peak_freq_hz;
            path.breakpoints.push_back({dur * k / (gen.switches + 1), f});
          }
          return generate_tvar2(path, sp, T, trial_seed);
        }
      },
      seg.generator);
}

}  // namespace

MultiTrialDataset generate(const ScenarioSpec& spec) {
  spec.validate();
  MultiTrialDataset data;
  data.fs_hz = spec.sampling_rate_hz;
  data.true_change_trial = spec.true_change_trial;
  data.trials.reserve(spec.trials);
  for (const auto& seg : spec.segments) {
    for (int r = seg.first_trial; r <= seg.last_trial; ++r) {
      data.trials.push_back(generate_trial(spec, seg, r));
    }
  }
  return data;
}

// ---------------------------------------------------------------------------
// Plain-text scenario config.

namespace {

std::map<std::string, std::string> parse_kv_tokens(std::istringstream& in) {
  std::map<std::string, std::string> kv;
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("scenario config: expected key=value, got '" + tok + "'");
    }
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

double kv_num(const std::map<std::string, std::string>& kv, const std::string& key,
              double fallback) {
  auto it = kv.find(key);
  return it == kv.end() ? fallback : std::stod(it->second);
}

std::vector<double> parse_num_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(std::stod(item));
  return out;
}

Ar2Spec base_from_kv(const std::map<std::string, std::string>& kv) {
  Ar2Spec sp;
  sp.modulus = kv_num(kv, "modulus", sp.modulus);
  sp.innovation_sd = kv_num(kv, "sd", sp.innovation_sd);
  return sp;
}

TrialGenerator parse_generator(const std::string& kind,
                               const std::map<std::string, std::string>& kv) {
  Ar2Spec base = base_from_kv(kv);
  if (kind == "ar2") {
    base.peak_freq_hz = kv_num(kv, "freq", 10.0);
    return GenAr2{base};
  }
  if (kind == "mixture") {
    auto it = kv.find("freqs");
    if (it == kv.end()) throw std::invalid_argument("scenario config: mixture needs freqs=");
    std::vector<Ar2Spec> comps;
    for (double f : parse_num_list(it->second)) {
      Ar2Spec c = base;
      c.peak_freq_hz = f;
      comps.push_back(c);
    }
    std::vector<double> weights(comps.size(), 1.0);
    if (auto w = kv.find("weights"); w != kv.end()) weights = parse_num_list(w->second);
    return GenMixture{std::move(comps), std::move(weights)};
  }
  if (kind == "drift") {
    return GenDrift{base, kv_num(kv, "from", 40.0), kv_num(kv, "to", 10.0)};
  }
  if (kind == "random_peak") {
    return GenRandomPeak{base, kv_num(kv, "lo", 5.0), kv_num(kv, "hi", 15.0)};
  }
  if (kind == "bump") {
    base.peak_freq_hz = kv_num(kv, "base", 15.0);
    return GenBump{base, kv_num(kv, "peak", 35.0), kv_num(kv, "onset_lo", 2.0),
                   kv_num(kv, "onset_hi", 9.0), kv_num(kv, "duration", 6.0)};
  }
  if (kind == "alternate") {
    base.peak_freq_hz = kv_num(kv, "base", 15.0);
    return GenAlternate{base, kv_num(kv, "high", 35.0),
                        static_cast<int>(kv_num(kv, "switches", 3.0))};
  }
  throw std::invalid_argument("scenario config: unknown generator '" + kind + "'");
}

void write_generator(std::ostream& out, const TrialGenerator& gen) {
  std::visit(
      [&](const auto& g) {
        using G = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<G, GenAr2>) {
          out << "ar2 freq=" << g.spec.peak_freq_hz << " modulus=" << g.spec.modulus
              << " sd=" << g.spec.innovation_sd;
        } else if constexpr (std::is_same_v<G, GenMixture>) {
          out << "mixture freqs=";
          for (size_t i = 0; i < g.components.size(); ++i) {
            out << (i ? "," : "") << g.components[i].peak_freq_hz;
          }
          out << " weights=";
          for (size_t i = 0; i < g.weights.size(); ++i) out << (i ? "," : "") << g.weights[i];
          out << " modulus=" << g.components.front().modulus
              << " sd=" << g.components.front().innovation_sd;
        } else if constexpr (std::is_same_v<G, GenDrift>) {
          out << "drift from=" << g.from_hz << " to=" << g.to_hz << " modulus=" << g.base.modulus
              << " sd=" << g.base.innovation_sd;
        } else if constexpr (std::is_same_v<G, GenRandomPeak>) {
          out << "random_peak lo=" << g.lo_hz << " hi=" << g.hi_hz
              << " modulus=" << g.base.modulus << " sd=" << g.base.innovation_sd;
        } else if constexpr (std::is_same_v<G, GenBump>) {
          out << "bump base=" << g.base.peak_freq_hz << " peak=" << g.peak_hz
              << " onset_lo=" << g.onset_lo_s << " onset_hi=" << g.onset_hi_s
              << " duration=" << g.duration_s << " modulus=" << g.base.modulus
              << " sd=" << g.base.innovation_sd;
        } else {
          static_assert(std::is_same_v<G, GenAlternate>);
          out << "alternate base=" << g.base.peak_freq_hz << " high=" << g.high_hz
              << " switches=" << g.switches << " modulus=" << g.base.modulus
              << " sd=" << g.base.innovation_sd;
        }
      },
      gen);
}

}  // namespace

ScenarioSpec parse_scenario(std::istream& in) {
  ScenarioSpec spec;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    try {
      if (first == "segment") {
        Segment seg;
        std::string kind;
        if (!(ls >> seg.first_trial >> seg.last_trial >> kind)) {
          throw std::invalid_argument("scenario config: malformed segment line");
        }
        seg.generator = parse_generator(kind, parse_kv_tokens(ls));
        spec.segments.push_back(std::move(seg));
      } else {
        std::string eq, value;
        if (!(ls >> eq >> value) || eq != "=") {
          throw std::invalid_argument("scenario config: expected 'key = value'");
        }
        if (first == "trials") {
          spec.trials = std::stoi(value);
        } else if (first == "trial_length") {
          spec.trial_length = std::stoi(value);
        } else if (first == "sampling_rate_hz") {
          spec.sampling_rate_hz = std::stod(value);
        } else if (first == "seed") {
          spec.seed = std::stoull(value);
        } else if (first == "true_change_trial") {
          spec.true_change_trial = std::stoi(value);
        } else {
          throw std::invalid_argument("scenario config: unknown key '" + first + "'");
        }
      }
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("scenario config: parse error at line " +
                                  std::to_string(lineno));
    }
  }
  spec.validate();
  return spec;
}

void write_scenario(std::ostream& out, const ScenarioSpec& spec) {
  out << "# rcd scenario v1\n";
  out << "trials = " << spec.trials << "\n";
  out << "trial_length = " << spec.trial_length << "\n";
  out << "sampling_rate_hz = " << spec.sampling_rate_hz << "\n";
  out << "seed = " << spec.seed << "\n";
  if (spec.true_change_trial) out << "true_change_trial = " << *spec.true_change_trial << "\n";
  for (const auto& seg : spec.segments) {
    out << "segment " << seg.first_trial << " " << seg.last_trial << " ";
    write_generator(out, seg.generator);
    out << "\n";
  }
}

}  // namespace rcd::simgen
