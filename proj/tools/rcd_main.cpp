// rcd: simulate multi-trial scenarios, run the regime-change detector, and
// analyze IMS bearing directories. Emits plot-ready CSV/JSON plus a manifest
// that makes every run reproducible (resolved config snapshot + seed +
// content hashes).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rcd/detect.hpp"
#include "rcd/ingest.hpp"
#include "rcd/io.hpp"
#include "rcd/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitAlarm = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int default_jobs() {
  if (const char* env = std::getenv("RCD_JOBS")) {
    const int j = std::atoi(env);
    if (j >= 1) return j;
  }
  return 1;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  try {
    rcd::io::atomic_write(path, contents);
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }
}

// Manifest: resolved config snapshot plus a content hash per emitted file.
class Manifest {
 public:
  explicit Manifest(fs::path out_dir) : out_dir_(std::move(out_dir)) {
    j_["tool"] = "rcd";
    j_["schema"] = rcd::io::kCsvSchemaVersion;
    j_["outputs"] = json::array();
  }

  json& config() { return j_["config"]; }

  void emit(const std::string& name, const std::string& contents) {
    const fs::path path = out_dir_ / name;
    write_file(path, contents);
    j_["outputs"].push_back({{"path", name}, {"hash", rcd::io::file_hash(path)}});
  }

  void record_input(const std::string& name, const fs::path& path) {
    j_["inputs"][name] = rcd::io::file_hash(path);
  }

  void finish() { write_file(out_dir_ / "manifest.json", j_.dump(2) + "\n"); }

 private:
  fs::path out_dir_;
  json j_;
};

rcd::simgen::ScenarioSpec load_scenario(int example_id, const std::string& scenario_file,
                                        std::uint64_t seed) {
  rcd::simgen::ScenarioSpec spec;
  if (!scenario_file.empty()) {
    std::ifstream in(scenario_file);
    if (!in) throw IoError("cannot open scenario file " + scenario_file);
    try {
      spec = rcd::simgen::parse_scenario(in);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  } else {
    try {
      spec = rcd::simgen::build_example(example_id);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
  }
  spec.seed = seed;
  return spec;
}

struct DetectorFlags {
  int scenario{1};
  std::string metrics{"L1,L2,W1_fn,W2_diagram:H0"};
  double kappa{5.0};
  double absolute_h{0.0};
  int burn_in{20};
  int smoothing_m{-1};
  int half_window{-1};
  int hop{-1};
  double filter_frac{0.01};
  double filter_abs{-1.0};
  bool log10_transform{false};
  bool standardize{false};
  bool fail_on_alarm{false};
  int jobs{default_jobs()};

  void add_to(CLI::App& cmd) {
    cmd.add_option("--scenario", scenario, "Comparison scenario: 1, 2 or 3")
        ->check(CLI::Range(1, 3));
    cmd.add_option("--metrics", metrics, "Comma-separated metric list");
    cmd.add_option("--kappa", kappa, "Threshold h = kappa * sigma_D");
    cmd.add_option("--threshold", absolute_h, "Absolute threshold h (overrides --kappa)");
    cmd.add_option("--burn-in", burn_in, "Change-free boundaries for mu_D/sigma_D");
    cmd.add_option("--smoothing-m", smoothing_m, "Periodogram smoothing half-bandwidth");
    cmd.add_option("--half-window", half_window, "Spectrogram taper half-width L");
    cmd.add_option("--hop", hop, "Spectrogram hop");
    cmd.add_option("--filter-frac", filter_frac, "Diagram filter as fraction of value range");
    cmd.add_option("--filter-eps", filter_abs, "Absolute diagram filter epsilon");
    cmd.add_flag("--log10", log10_transform, "log10-transform diagram inputs");
    cmd.add_flag("--standardize", standardize, "Standardize CUSUM increments");
    cmd.add_flag("--fail-on-alarm", fail_on_alarm, "Exit 4 when any alarm is raised");
    cmd.add_option("--jobs", jobs, "Worker threads for per-trial features");
  }

  rcd::detect::DetectorConfig to_config() const {
    rcd::detect::DetectorConfig cfg;
    cfg.scenario = scenario;
    cfg.kappa = kappa;
    if (absolute_h > 0.0) {
      cfg.threshold_policy = rcd::detect::DetectorConfig::ThresholdPolicy::absolute;
      cfg.absolute_h = absolute_h;
    }
    cfg.burn_in = burn_in;
    cfg.smoothing_m = smoothing_m;
    cfg.spec_half_window = half_window;
    cfg.spec_hop = hop;
    cfg.diagram_filter_frac = filter_frac;
    cfg.diagram_filter_abs = filter_abs;
    cfg.log10_transform = log10_transform;
    cfg.standardize_increments = standardize;
    return cfg;
  }

  std::vector<rcd::metrics::MetricKind> metric_list() const {
    std::vector<rcd::metrics::MetricKind> kinds;
    std::istringstream in(metrics);
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        kinds.push_back(rcd::metrics::parse_metric(item));
      } catch (const std::exception& e) {
        throw UsageError(e.what());
      }
    }
    if (kinds.empty()) throw UsageError("empty metric list");
    return kinds;
  }

  json snapshot() const {
    return {{"scenario", scenario},       {"metrics", metrics},
            {"kappa", kappa},             {"threshold", absolute_h},
            {"burn_in", burn_in},         {"smoothing_m", smoothing_m},
            {"half_window", half_window}, {"hop", hop},
            {"filter_frac", filter_frac}, {"filter_eps", filter_abs},
            {"log10", log10_transform},   {"standardize", standardize},
            {"jobs", jobs}};
  }
};

int run_detection(const rcd::MultiTrialDataset& data, const DetectorFlags& flags,
                  Manifest& manifest) {
  rcd::detect::Report report;
  try {
    report = rcd::detect::run_pipeline(data, flags.to_config(), flags.metric_list(),
                                       flags.jobs);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  manifest.emit("report.json", rcd::io::report_to_json(report) + "\n");
  std::ostringstream csv;
  rcd::io::write_boundary_csv(csv, report);
  manifest.emit("boundaries.csv", csv.str());
  manifest.finish();

  bool any_alarm = false;
  for (const auto& m : report.metrics) {
    std::cout << m.metric_name << ": "
              << (m.cusum.first_alarm
                      ? "first alarm at trial " + std::to_string(*m.cusum.first_alarm)
                      : std::string("no alarm"))
              << " (threshold " << m.cusum.threshold << ")\n";
    any_alarm = any_alarm || !m.cusum.alarms.empty();
  }
  return (flags.fail_on_alarm && any_alarm) ? kExitAlarm : kExitOk;
}

int cmd_simulate(int example_id, const std::string& scenario_file, std::uint64_t seed,
                 const std::string& out_dir) {
  auto spec = load_scenario(example_id, scenario_file, seed);
  const rcd::MultiTrialDataset data = rcd::simgen::generate(spec);

  Manifest manifest((fs::path(out_dir)));
  std::ostringstream resolved;
  rcd::simgen::write_scenario(resolved, spec);
  manifest.config() = {{"command", "simulate"}, {"seed", seed}, {"scenario_text", resolved.str()}};
  manifest.emit("scenario.txt", resolved.str());
  std::ostringstream csv;
  rcd::io::write_dataset_csv(csv, data);
  manifest.emit("dataset.csv", csv.str());
  manifest.finish();
  std::cout << "wrote " << data.trial_count() << " trials x "
            << (data.trials.empty() ? 0 : data.trials.front().length()) << " samples to "
            << out_dir << "\n";
  return kExitOk;
}

int cmd_detect(int example_id, const std::string& dataset_file, std::uint64_t seed,
               const DetectorFlags& flags, const std::string& out_dir) {
  rcd::MultiTrialDataset data;
  Manifest manifest((fs::path(out_dir)));
  if (!dataset_file.empty()) {
    std::ifstream in(dataset_file);
    if (!in) throw IoError("cannot open dataset " + dataset_file);
    try {
      data = rcd::io::read_dataset_csv(in);
    } catch (const std::exception& e) {
      throw UsageError(e.what());
    }
    manifest.record_input("dataset", dataset_file);
  } else {
    auto spec = load_scenario(example_id, "", seed);
    data = rcd::simgen::generate(spec);
  }
  manifest.config() = {{"command", "detect"},
                       {"seed", seed},
                       {"example", example_id},
                       {"dataset", dataset_file},
                       {"detector", flags.snapshot()}};
  return run_detection(data, flags, manifest);
}

int cmd_bearings(const std::string& dir, int experiment, int bearing, int accel, int decimate,
                 const DetectorFlags& flags, const std::string& out_dir) {
  rcd::ingest::ImsExperimentLayout layout;
  try {
    layout = rcd::ingest::ImsExperimentLayout::experiment(experiment);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);

  rcd::MultiTrialDataset data;
  int skipped = 0;
  int file_count = 0;
  std::string first_ts, last_ts;
  try {
    rcd::ingest::ImsStream stream((fs::path(dir)), layout);
    if (stream.trial_count() == 0) throw UsageError("no IMS files found in " + dir);
    data = rcd::ingest::select_channel(stream, bearing, accel, decimate);
    skipped = stream.skipped_count();
    file_count = stream.trial_count();
    first_ts = stream.files().front().filename().string();
    last_ts = stream.files().back().filename().string();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  } catch (const UsageError&) {
    throw;
  } catch (const std::exception& e) {
    throw IoError(e.what());
  }

  Manifest manifest((fs::path(out_dir)));
  manifest.config() = {{"command", "bearings"},
                       {"dir", dir},
                       {"experiment", experiment},
                       {"bearing", bearing},
                       {"accel", accel},
                       {"decimate", decimate},
                       {"layout_channels", layout.channel_count},
                       {"files", file_count},
                       {"skipped_files", skipped},
                       {"first_file", first_ts},
                       {"last_file", last_ts},
                       {"detector", flags.snapshot()}};
  if (skipped > 0) std::cerr << "warning: skipped " << skipped << " unparseable filenames\n";
  return run_detection(data, flags, manifest);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regime-change detection for multi-trial time series"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Generate a multi-trial dataset");
  int sim_example = 0;
  std::string sim_scenario_file, sim_out = "out";
  std::uint64_t sim_seed = 0;
  sim->add_option("--example", sim_example, "Built-in scenario id (1..4)");
  sim->add_option("--scenario-file", sim_scenario_file, "Scenario config file");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--out", sim_out, "Output directory");

  // detect
  auto* det = app.add_subcommand("detect", "Run the regime-change detector");
  int det_example = 0;
  std::string det_dataset, det_out = "out";
  std::uint64_t det_seed = 0;
  DetectorFlags det_flags;
  det->add_option("--example", det_example, "Built-in scenario id (1..4)");
  det->add_option("--dataset", det_dataset, "Dataset CSV from `simulate`");
  det->add_option("--seed", det_seed, "RNG seed when using --example");
  det->add_option("--out", det_out, "Output directory");
  det_flags.add_to(*det);

  // bearings
  auto* bear = app.add_subcommand("bearings", "Analyze a NASA IMS bearing directory");
  std::string bear_dir, bear_out = "out";
  int bear_experiment = 1, bear_bearing = 1, bear_accel = 0, bear_decimate = 1;
  DetectorFlags bear_flags;
  bear_flags.scenario = 2;
  bear->add_option("--dir", bear_dir, "IMS experiment directory")->required();
  bear->add_option("--experiment", bear_experiment, "IMS experiment id (1 or 2)");
  bear->add_option("--bearing", bear_bearing, "Bearing number 1..4");
  bear->add_option("--accel", bear_accel, "Accelerometer index (experiment 1 only)");
  bear->add_option("--decimate", bear_decimate, "Integer decimation factor");
  bear->add_option("--out", bear_out, "Output directory");
  bear_flags.add_to(*bear);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (sim->parsed()) {
      if ((sim_example == 0) == sim_scenario_file.empty()) {
        throw UsageError("simulate: give exactly one of --example or --scenario-file");
      }
      return cmd_simulate(sim_example, sim_scenario_file, sim_seed, sim_out);
    }
    if (det->parsed()) {
      if ((det_example == 0) == det_dataset.empty()) {
        throw UsageError("detect: give exactly one of --example or --dataset");
      }
      return cmd_detect(det_example, det_dataset, det_seed, det_flags, det_out);
    }
    if (bear->parsed()) {
      if (bear_experiment != 1 && bear_experiment != 2) {
        throw UsageError("bearings: --experiment must be 1 or 2");
      }
      return cmd_bearings(bear_dir, bear_experiment, bear_bearing, bear_accel, bear_decimate,
                          bear_flags, bear_out);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
