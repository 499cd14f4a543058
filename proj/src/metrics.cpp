#include "cbjj/metrics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cbjj/error.hpp"
#include "cbjj/spectral.hpp"

namespace cbjj {

double kc_index(double mean0, double sem_sq0, double mean1, double sem_sq1)
{
    const double diff = std::abs(mean0 - mean1);
    const double spread = 0.5 * (sem_sq0 + sem_sq1);
    if (spread <= 0.0) {
        if (diff == 0.0)
            return 0.0;
        raise(ErrorKind::DivideByZero, "d_KC undefined: both ensembles have zero spread but different means");
    }
    return diff / std::sqrt(spread);
}

KCResult kc_index(const SwitchStats& s0, const SwitchStats& s1)
{
    if (s0.n_switched < 2 || s1.n_switched < 2 || !s0.sem_sq_gamma || !s1.sem_sq_gamma)
        raise(ErrorKind::InsufficientData, "d_KC needs at least two switched runs per ensemble (got " +
                                               std::to_string(s0.n_switched) + " and " +
                                               std::to_string(s1.n_switched) + ")");
    KCResult r;
    r.mean0 = *s0.mean_gamma;
    r.mean1 = *s1.mean_gamma;
    r.sem_sq0 = *s0.sem_sq_gamma;
    r.sem_sq1 = *s1.sem_sq_gamma;
    r.censored_fraction0 = s0.censored_fraction();
    r.censored_fraction1 = s1.censored_fraction();
    r.d_kc = kc_index(r.mean0, r.sem_sq0, r.mean1, r.sem_sq1);
    return r;
}

VoltagePsd voltage_noise_psd(const Scenario& scenario, const PsdOptions& options)
{
    if (options.n_samples < (std::size_t{1} << 18))
        raise(ErrorKind::InsufficientData, "voltage PSD needs at least 2^18 samples after the transient");
    Scenario quiet = scenario;
    quiet.drive = DriveSpec{};
    const Problem problem = make_problem(quiet);
    const DerivedScales scales = derive_scales(scenario.junction);

    const double probe_hz = options.probe_hz.value_or(drive_omega(scenario.drive, scales, scenario.op.i_b) /
                                                      (2.0 * std::numbers::pi));
    const double dt = problem.sim.dt;
    const auto stride = static_cast<std::int64_t>(std::llround(options.sample_tau / dt));
    const auto transient = static_cast<std::int64_t>(std::llround(options.transient_tau / dt));
    if (stride < 1)
        raise(ErrorKind::InvalidParameter, "PSD sample interval shorter than the time step");

    const PhaseState bottom{well_minimum(scenario.op.i_b), 0.0};
    const auto v = sampled_velocity(problem, bottom, RngStream{options.seed, 0}, transient, stride, options.n_samples);

    const double unit = scales.voltage_unit();
    std::vector<double> volts(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        volts[i] = unit * v[i];

    const double sample_seconds = static_cast<double>(stride) * dt / scales.omega_J;
    const std::size_t L = choose_segment_length(probe_hz, sample_seconds, options.min_segment, options.max_segment);
    const PsdEstimate est = welch_psd(volts, sample_seconds, L);

    VoltagePsd out;
    out.frequency_hz = est.frequency;
    out.s_vv = est.density;
    out.probe_hz = probe_hz;
    out.s_vv_at_probe = est.at(probe_hz);
    out.segment_length = L;
    out.segments = est.segments;
    out.probe_offset_bins = bin_offset(probe_hz, sample_seconds, L);
    return out;
}

ResponsivityResult responsivity(const Scenario& scenario, const ResponsivityOptions& options)
{
    if (scenario.drive.kind != DriveKind::ContinuousWave)
        raise(ErrorKind::InvalidParameter, "responsivity needs a continuous-wave drive");
    if (options.pairs < 1)
        raise(ErrorKind::InvalidParameter, "responsivity needs at least one trajectory pair");
    if (!(options.window_fraction > 0.0 && options.window_fraction <= 1.0))
        raise(ErrorKind::InvalidParameter, "averaging window fraction must lie in (0, 1]");

    Scenario undriven_scenario = scenario;
    undriven_scenario.drive = DriveSpec{};
    const Problem driven = make_problem(scenario);
    const Problem undriven = make_problem(undriven_scenario);
    const double dt = driven.sim.dt;
    const double run_tau = options.run_tau.value_or(scenario.sim.tau_max);
    const auto total = static_cast<std::int64_t>(std::llround(run_tau / dt));
    const auto window_first = static_cast<std::int64_t>(std::llround((1.0 - options.window_fraction) * run_tau / dt));

    const auto n = static_cast<std::size_t>(options.pairs);
    std::vector<double> v_driven(n), v_undriven(n);
    const bool complete = parallel_for(2 * n, options.run, [&](std::size_t i) {
        const std::size_t pair = i / 2;
        const RngStream stream{options.seed, pair};
        if (i % 2 == 0)
            v_driven[pair] = average_velocity(driven, stream, total, window_first);
        else
            v_undriven[pair] = average_velocity(undriven, stream, total, window_first);
    });
    if (!complete)
        raise(ErrorKind::Cancelled, "responsivity cancelled");

    double sum_d = 0.0, sum_u = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        sum_d += v_driven[k];
        sum_u += v_undriven[k];
    }
    const double unit = derive_scales(scenario.junction).voltage_unit();
    ResponsivityResult r;
    r.pairs = options.pairs;
    r.mean_V_driven = unit * sum_d / static_cast<double>(n);
    r.mean_V_undriven = unit * sum_u / static_cast<double>(n);
    r.delta_V = std::abs(r.mean_V_driven - r.mean_V_undriven);
    for (std::size_t k = 0; k < n; ++k) {
        r.pair_V_driven.push_back(unit * v_driven[k]);
        r.pair_V_undriven.push_back(unit * v_undriven[k]);
    }
    return r;
}

DetectionReport detection_figures(double S_vv, double delta_V, double i_mw, const JunctionParams& params)
{
    if (!(i_mw > 0.0))
        raise(ErrorKind::InvalidParameter, "probe amplitude must be positive");
    if (!(delta_V > 0.0))
        raise(ErrorKind::Computation, "zero responsivity: NEP is unbounded");
    DetectionReport r;
    r.i_mw = i_mw;
    r.S_vv = S_vv;
    r.S_v = std::sqrt(S_vv);
    r.delta_V = delta_V;
    const double I_mw = i_mw * params.I0;
    r.P_in = I_mw * I_mw * params.R;
    r.S = delta_V / r.P_in;
    r.NEP = r.S_v / r.S;
    r.I_min = std::sqrt(r.NEP / params.R);
    return r;
}

DetectionReport nep_chain(const Scenario& probe, const NepOptions& options)
{
    if (probe.drive.kind != DriveKind::ContinuousWave)
        raise(ErrorKind::InvalidParameter, "NEP chain needs a continuous-wave probe");
    const DerivedScales scales = derive_scales(probe.junction);
    const double probe_hz = drive_omega(probe.drive, scales, probe.op.i_b) / (2.0 * std::numbers::pi);

    PsdOptions psd_options = options.psd;
    psd_options.probe_hz = probe_hz;
    const VoltagePsd psd = voltage_noise_psd(probe, psd_options);
    const ResponsivityResult resp = responsivity(probe, options.responsivity);

    DetectionReport report = detection_figures(psd.s_vv_at_probe, resp.delta_V, probe.drive.i_mw, probe.junction);
    report.probe_hz = probe_hz;

    Scenario weak = probe;
    weak.drive.i_mw = report.I_min / probe.junction.I0;
    Scenario quiet = probe;
    quiet.drive = DriveSpec{};
    const SwitchStats s0 = run_ensemble({quiet, options.n_runs, options.seed}, options.run);
    const SwitchStats s1 = run_ensemble({weak, options.n_runs, options.seed}, options.run);
    report.min_kc = kc_index(s0, s1);
    report.min_d_kc = report.min_kc.d_kc;
    return report;
}

PhotonThresholdResult photon_threshold(const Scenario& pulse_template, double min_d_kc, std::span<const double> grid,
                                       const PhotonThresholdOptions& options)
{
    if (grid.empty())
        raise(ErrorKind::InvalidParameter, "photon grid must be non-empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i - 1] < grid[i]))
            raise(ErrorKind::InvalidParameter, "photon grid must be sorted ascending");

    Scenario quiet = pulse_template;
    quiet.drive.kind = DriveKind::None;
    PhotonThresholdResult result;
    result.reference = run_ensemble({quiet, options.n_runs, options.seed}, options.run);

    for (double n : grid) {
        Scenario s = pulse_template;
        s.drive.kind = DriveKind::PhotonPulse;
        s.drive.photons = n;
        PhotonCurvePoint point;
        point.photons = n;
        point.stats = run_ensemble({s, options.n_runs, options.seed}, options.run);
        if (point.stats.n_switched >= 2 && result.reference.n_switched >= 2)
            point.d_kc = kc_index(result.reference, point.stats).d_kc;
        const bool clears = point.d_kc && *point.d_kc > min_d_kc;
        result.curve.push_back(std::move(point));
        if (clears && !result.n_min) {
            result.n_min = n;
            if (options.stop_at_first)
                break;
        }
    }
    return result;
}

double require_threshold(const PhotonThresholdResult& result)
{
    if (!result.n_min)
        raise(ErrorKind::NotFound, "no photon number on the grid clears the min[d_KC] threshold");
    return *result.n_min;
}

OptimizeBiasResult optimize_bias(const Scenario& pulse_template, std::span<const double> bias_grid, double min_d_kc,
                                 std::span<const double> photon_grid, const PhotonThresholdOptions& options)
{
    if (bias_grid.empty())
        raise(ErrorKind::InvalidParameter, "bias grid must be non-empty");
    OptimizeBiasResult result;
    for (double i_b : bias_grid) {
        if (!(i_b > 0.0 && i_b < 1.0))
            raise(ErrorKind::InvalidParameter, "bias grid must lie in (0, 1)");
        Scenario s = pulse_template;
        s.op.i_b = i_b;
        s.drive.f_GHz.reset();  // retune to omega_J*(i_b)
        BiasPoint point{i_b, photon_threshold(s, min_d_kc, photon_grid, options)};
        if (point.threshold.n_min && (!result.best_n_min || *point.threshold.n_min < *result.best_n_min)) {
            result.best_n_min = point.threshold.n_min;
            result.best_i_b = i_b;
        }
        result.points.push_back(std::move(point));
    }
    return result;
}

}  // namespace cbjj
