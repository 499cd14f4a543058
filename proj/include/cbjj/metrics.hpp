#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cbjj/ensemble.hpp"
#include "cbjj/parallel.hpp"
#include "cbjj/scenario.hpp"

namespace cbjj {

// ---------------------------------------------------------------------------
// Kumar-Carroll discriminability
// ---------------------------------------------------------------------------

struct KCResult {
    double d_kc = 0.0;
    double mean0 = 0.0;
    double mean1 = 0.0;
    double sem_sq0 = 0.0;
    double sem_sq1 = 0.0;
    double censored_fraction0 = 0.0;
    double censored_fraction1 = 0.0;
};

/// d_KC = |<g0> - <g1>| / sqrt((s0 + s1) / 2), with s the squared standard
/// error of the mean. Equal means with zero spread give 0.
double kc_index(double mean0, double sem_sq0, double mean1, double sem_sq1);

/// Requires at least two switched runs in each ensemble.
KCResult kc_index(const SwitchStats& stats0, const SwitchStats& stats1);

// ---------------------------------------------------------------------------
// Voltage noise spectrum, responsivity, NEP
// ---------------------------------------------------------------------------

struct PsdOptions {
    std::size_t n_samples = std::size_t{1} << 18;  // after the transient
    double sample_tau = 1.0;                       // sample interval in units of 1/omega_J
    double transient_tau = 100.0;
    std::size_t min_segment = 2048;
    std::size_t max_segment = 8192;
    std::optional<double> probe_hz;                // defaults to the scenario's drive frequency
    std::uint64_t seed = 0;
};

struct VoltagePsd {
    std::vector<double> frequency_hz;
    std::vector<double> s_vv;  // V^2/Hz, one-sided
    double probe_hz = 0.0;
    double s_vv_at_probe = 0.0;
    std::size_t segment_length = 0;
    std::size_t segments = 0;
    double probe_offset_bins = 0.0;
};

/// Voltage PSD of the trapped (undriven) junction. The run starts at the
/// well bottom, discards a transient and samples the phase velocity as block
/// means over each sample interval.
VoltagePsd voltage_noise_psd(const Scenario& scenario, const PsdOptions& options);

struct ResponsivityOptions {
    std::int64_t pairs = 64;
    std::optional<double> run_tau;  // defaults to the scenario's tau_max
    double window_fraction = 0.8;   // average over the final fraction of the run
    std::uint64_t seed = 0;
    RunOptions run;
};

struct ResponsivityResult {
    double delta_V = 0.0;         // V
    double mean_V_driven = 0.0;   // V
    double mean_V_undriven = 0.0; // V
    std::int64_t pairs = 0;
    std::vector<double> pair_V_driven;    // per-pair window averages, V
    std::vector<double> pair_V_undriven;
};

/// |<V> driven - <V> undriven| over matched-seed pairs; `scenario.drive`
/// must be a continuous wave.
ResponsivityResult responsivity(const Scenario& scenario, const ResponsivityOptions& options);

struct DetectionReport {
    double probe_hz = 0.0;
    double i_mw = 0.0;       // probe amplitude / I0
    double S_vv = 0.0;       // V^2/Hz
    double S_v = 0.0;        // V/sqrt(Hz)
    double delta_V = 0.0;    // V
    double P_in = 0.0;       // W
    double S = 0.0;          // V/W
    double NEP = 0.0;        // W/sqrt(Hz)
    double I_min = 0.0;      // A
    double min_d_kc = 0.0;
    KCResult min_kc;
    std::optional<double> N_min;
};

/// Completes the derived fields from S_v, delta_V and the probe:
/// P_in = I_MW^2 R, S = delta_V / P_in, NEP = S_v / S, I_min = sqrt(NEP / R).
DetectionReport detection_figures(double S_vv, double delta_V, double i_mw, const JunctionParams& params);

struct NepOptions {
    PsdOptions psd;
    ResponsivityOptions responsivity;
    std::int64_t n_runs = 1000;  // per ensemble of the min[d_KC] step
    std::uint64_t seed = 0;
    RunOptions run;
};

/// PSD -> responsivity -> NEP -> I_min -> min[d_KC]. `probe.drive` is the
/// continuous-wave probe used for the responsivity.
DetectionReport nep_chain(const Scenario& probe, const NepOptions& options);

// ---------------------------------------------------------------------------
// Photon-number threshold and bias optimization
// ---------------------------------------------------------------------------

struct PhotonCurvePoint {
    double photons = 0.0;
    std::optional<double> d_kc;  // empty when an ensemble had < 2 switched runs
    SwitchStats stats;
};

struct PhotonThresholdResult {
    std::optional<double> n_min;
    SwitchStats reference;
    std::vector<PhotonCurvePoint> curve;
};

struct PhotonThresholdOptions {
    std::int64_t n_runs = 1000;
    std::uint64_t seed = 0;
    bool stop_at_first = false;
    RunOptions run;
};

/// Scans an ascending photon grid with matched seeds against a shared
/// undriven reference; n_min is the first N whose d_KC exceeds min_d_kc.
PhotonThresholdResult photon_threshold(const Scenario& pulse_template, double min_d_kc, std::span<const double> grid,
                                       const PhotonThresholdOptions& options);

/// n_min or a NotFound error.
double require_threshold(const PhotonThresholdResult& result);

struct BiasPoint {
    double i_b = 0.0;
    PhotonThresholdResult threshold;
};

struct OptimizeBiasResult {
    std::optional<double> best_i_b;
    std::optional<double> best_n_min;
    std::vector<BiasPoint> points;
};

/// Photon threshold at each bias with the pulse retuned to omega_J*(i_b).
OptimizeBiasResult optimize_bias(const Scenario& pulse_template, std::span<const double> bias_grid, double min_d_kc,
                                 std::span<const double> photon_grid, const PhotonThresholdOptions& options);

}  // namespace cbjj
