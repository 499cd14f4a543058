#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cbjj/config.hpp"
#include "cbjj/ensemble.hpp"
#include "cbjj/manifest.hpp"
#include "cbjj/metrics.hpp"

namespace cbjj {

enum class JunctionId { JJ1, JJ2, JJ3 };

std::string_view to_string(JunctionId id);
JunctionId parse_junction(std::string_view s);

/// One row of the paper's junction table.
struct JunctionPreset {
    JunctionId id;
    JunctionParams params;
    double T = 0.0;          // K
    double i_b = 0.0;
    double i_mw = 0.005;     // probe amplitude / I0
    double f_s_GHz = 0.0;    // signal frequency
    // Published figures, kept for side-by-side reporting only.
    double paper_nep_aW = 0.0;
    double paper_min_d_kc = 0.0;
    double paper_n_min = 0.0;
};

const JunctionPreset& junction_preset(JunctionId id);

/// Undriven configuration for a preset at its published operating point.
ConfigDocument preset_config(JunctionId id);

enum class ExperimentId { Fig3, Fig4, Fig5a, Fig5b, Fig6, Fig7a, Fig7b, Fig8, Fig9, Fig10, Fig11, Table1, Table2 };

std::string_view to_string(ExperimentId id);
ExperimentId parse_experiment(std::string_view s);
std::vector<ExperimentId> all_experiments();

/// Junctions an experiment is defined for (Figs. 3-8 exist for JJ1 only).
std::vector<JunctionId> experiment_junctions(ExperimentId id);

/// Parses "a:b:step" (inclusive) or "a,b,c".
std::vector<double> parse_grid(std::string_view text);

/// Recipe knobs. Every field can be patched with "experiment.<name>".
struct ExperimentSettings {
    std::int64_t n_runs = 1000;
    double fig3_tau = 60.0;
    double fig3_i_mw = 0.001;
    std::int64_t fig3_search = 10000;
    std::int64_t fig4_traces = 3;
    double fig4_tau = 60.0;
    std::vector<double> fig5a_grid = parse_grid("0.70:0.88:0.01");
    std::vector<double> fig5b_grid = {0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0, 2.0};  // K
    std::vector<double> fig6_i_mw = {0.0, 1e-4, 5e-4, 1e-3};
    std::int64_t psd_samples = std::int64_t{1} << 18;
    std::int64_t pairs = 64;
    double fig9_window_ns = 0.04;
    double fig10_photons = 30.0;
    std::vector<double> fig11_grid = parse_grid("1:200:1");
    bool fig11_stop = true;          // stop the scan at the first detectable N
    std::optional<double> min_d_kc;  // skips the NEP chain when set
};

void apply_setting(ExperimentSettings& settings, const std::string& name, const std::string& value);
nlohmann::json to_json(const ExperimentSettings& settings);

struct ExperimentSpec {
    ExperimentId id = ExperimentId::Fig3;
    JunctionId junction = JunctionId::JJ1;
    std::vector<std::pair<std::string, std::string>> overrides;  // "section.key" or "experiment.name"
    std::uint64_t master_seed = 0;
    std::optional<double> calibration_factor;
    RunOptions run;
};

struct ExperimentOutput {
    std::string id;
    std::string junction;
    std::map<std::string, std::string> files;  // file name -> contents
    RunManifest manifest;
};

ExperimentOutput run_experiment(const ExperimentSpec& spec);

/// Runs table1 for all three junctions and merges the rows (junction "all").
ExperimentOutput run_table1_merged(const ExperimentSpec& spec);

/// Writes into <root>/<id>/<junction>/.
std::filesystem::path write_experiment(const std::filesystem::path& root, const ExperimentOutput& output);

/// NEP chain with the preset's probe and the settings' sizes.
DetectionReport preset_nep_chain(const ConfigDocument& doc, const JunctionPreset& preset,
                                 const ExperimentSettings& settings, std::uint64_t seed, const RunOptions& run);

// ---------------------------------------------------------------------------
// Noise calibration against the switching knee
// ---------------------------------------------------------------------------

/// Bias where the switched fraction first reaches 1/2, by linear
/// interpolation on an ascending grid. Empty if the curve never crosses.
std::optional<double> switching_knee(std::span<const SweepPoint> points);

struct CalibrationOptions {
    Scenario scenario;  // JJ1 operating point; calibration_factor is the starting guess
    std::vector<double> bias_grid = parse_grid("0.76:0.82:0.005");
    std::int64_t n_runs = 1000;
    std::uint64_t seed = 0;
    double target = 0.789;
    double tolerance = 0.005;
    double factor_min = 1e-3;
    double factor_max = 1e3;
    int max_iterations = 40;
    RunOptions run;
};

struct CalibrationStep {
    double factor = 0.0;
    std::optional<double> knee;
};

struct CalibrationResult {
    double factor = 0.0;
    std::optional<double> knee;
    bool reused_initial = false;
    std::vector<CalibrationStep> history;
};

/// Knee position for one factor (matched seeds across factors).
std::optional<double> knee_for_factor(const CalibrationOptions& options, double factor);

/// Keeps the starting factor if its knee is within tolerance; otherwise
/// bisects log(factor) towards the target inside [factor_min, factor_max].
CalibrationResult calibrate_noise(const CalibrationOptions& options);

}  // namespace cbjj
