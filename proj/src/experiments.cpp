#include "cbjj/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numbers>

#include "cbjj/csv.hpp"
#include "cbjj/error.hpp"

namespace cbjj {

namespace {

const JunctionPreset kPresets[] = {
    {JunctionId::JJ1, {8.586e-6, 29.0, 2700e-15}, 0.050, 0.789, 0.005, 12.25, 47.085, 0.25, 104},
    {JunctionId::JJ2, {2.0e-6, 130.0, 630e-15}, 0.048, 0.786, 0.005, 12.28, 26.848, 0.32, 24},
    {JunctionId::JJ3, {0.975e-6, 290.0, 93e-15}, 0.050, 0.825, 0.005, 21.37, 9.623, 0.17, 21},
};

constexpr std::pair<ExperimentId, std::string_view> kExperimentNames[] = {
    {ExperimentId::Fig3, "fig3"},   {ExperimentId::Fig4, "fig4"},     {ExperimentId::Fig5a, "fig5a"},
    {ExperimentId::Fig5b, "fig5b"}, {ExperimentId::Fig6, "fig6"},     {ExperimentId::Fig7a, "fig7a"},
    {ExperimentId::Fig7b, "fig7b"}, {ExperimentId::Fig8, "fig8"},     {ExperimentId::Fig9, "fig9"},
    {ExperimentId::Fig10, "fig10"}, {ExperimentId::Fig11, "fig11"},   {ExperimentId::Table1, "table1"},
    {ExperimentId::Table2, "table2"},
};

double junction_index(JunctionId id)
{
    return static_cast<double>(static_cast<int>(id) + 1);
}

DriveSpec cw_probe(const JunctionPreset& preset, double i_mw)
{
    DriveSpec d;
    d.kind = DriveKind::ContinuousWave;
    d.i_mw = i_mw;
    d.f_GHz = preset.f_s_GHz;
    return d;
}

DriveSpec pulse_drive(const JunctionPreset& preset, double photons)
{
    DriveSpec d;
    d.kind = DriveKind::PhotonPulse;
    d.photons = photons;
    d.f_GHz = preset.f_s_GHz;
    return d;
}

std::vector<std::string> summary_columns()
{
    return {"series_value", "n_runs", "n_switched", "n_censored", "mean_gamma", "sem_sq_gamma", "d_kc"};
}

std::vector<double> summary_row(double value, const SwitchStats& s, std::optional<double> d_kc)
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {value,
            static_cast<double>(s.n_runs),
            static_cast<double>(s.n_switched),
            static_cast<double>(s.n_censored),
            s.mean_gamma.value_or(nan),
            s.sem_sq_gamma.value_or(nan),
            d_kc.value_or(nan)};
}

/// Long-format switching times: one row per switched run.
CsvTable times_table(const std::vector<std::pair<double, const SwitchStats*>>& series)
{
    CsvTable t;
    t.header = {"series_value", "tau_switch"};
    for (const auto& [value, stats] : series)
        for (double tau : stats->times)
            t.add_row({value, tau});
    return t;
}

std::optional<double> safe_kc(const SwitchStats& a, const SwitchStats& b)
{
    try {
        return kc_index(a, b).d_kc;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InsufficientData || e.kind() == ErrorKind::DivideByZero)
            return std::nullopt;
        throw;
    }
}

nlohmann::json stats_json(const SwitchStats& s)
{
    nlohmann::json j;
    j["n_runs"] = s.n_runs;
    j["n_switched"] = s.n_switched;
    j["n_censored"] = s.n_censored;
    j["n_failed"] = s.n_failed;
    j["mean_gamma"] = s.mean_gamma ? nlohmann::json(*s.mean_gamma) : nlohmann::json();
    j["sem_sq_gamma"] = s.sem_sq_gamma ? nlohmann::json(*s.sem_sq_gamma) : nlohmann::json();
    return j;
}

nlohmann::json report_json(const DetectionReport& r)
{
    nlohmann::json j;
    j["probe_hz"] = r.probe_hz;
    j["i_mw"] = r.i_mw;
    j["S_vv_V2_per_Hz"] = r.S_vv;
    j["S_v_V_per_rtHz"] = r.S_v;
    j["delta_V_V"] = r.delta_V;
    j["P_in_W"] = r.P_in;
    j["S_V_per_W"] = r.S;
    j["NEP_W_per_rtHz"] = r.NEP;
    j["NEP_aW_per_rtHz"] = r.NEP * 1e18;
    j["I_min_A"] = r.I_min;
    j["min_d_kc"] = r.min_d_kc;
    return j;
}

struct Context {
    ConfigDocument doc;
    ExperimentSettings settings;
    const JunctionPreset* preset = nullptr;
    RunOptions run;
    std::uint64_t seed() const { return doc.seed; }
    Scenario scenario() const { return doc.scenario; }
};

struct Result {
    std::map<std::string, std::string> files;
    nlohmann::json results = nlohmann::json::object();
    std::vector<std::string> notes;
};

/// Recorded trajectory that keeps running past phi* so the voltage state shows.
Trajectory display_trajectory(Scenario scenario, double tau, std::uint64_t seed, std::uint64_t stream_id,
                              std::optional<double>& tau_switch)
{
    scenario.sim.tau_max = tau;
    scenario.sim.record_stride = std::max<std::int64_t>(1, std::llround(0.01 / scenario.sim.dt));
    scenario.sim.phi_star = 1e300;
    const Problem problem = make_problem(scenario);
    TrajectoryResult r = run_trajectory(problem, RngStream{seed, stream_id}, true);
    tau_switch.reset();
    for (std::size_t k = 0; k < r.path->phi.size(); ++k) {
        if (r.path->phi[k] > std::numbers::pi) {
            tau_switch = r.path->tau[k];
            break;
        }
    }
    return std::move(*r.path);
}

Result fig3(const Context& c)
{
    Scenario quiet = c.scenario();
    quiet.op.T = 0.0;
    quiet.noise.T = 0.0;
    Scenario driven = quiet;
    driven.drive = cw_probe(*c.preset, c.settings.fig3_i_mw);
    const Problem p0 = make_problem(quiet);
    const Problem p1 = make_problem(driven);

    std::optional<std::uint64_t> twin;
    for (std::int64_t k = 0; k < c.settings.fig3_search && !twin; ++k) {
        const RngStream stream{c.seed(), static_cast<std::uint64_t>(k)};
        if (run_trajectory(p0, stream).outcome.censored() && run_trajectory(p1, stream).outcome.switched())
            twin = static_cast<std::uint64_t>(k);
    }
    if (!twin)
        raise(ErrorKind::NotFound, "no initial phase found where the drive alone causes escape");

    const DerivedScales scales = derive_scales(quiet.junction);
    CsvTable t;
    t.header = {"i_mw", "tau", "phi", "voltage_V"};
    Result out;
    for (const auto& [amp, sc] : {std::pair{0.0, quiet}, std::pair{c.settings.fig3_i_mw, driven}}) {
        std::optional<double> tau_switch;
        const Trajectory path = display_trajectory(sc, c.settings.fig3_tau, c.seed(), *twin, tau_switch);
        const auto volts = voltage_series(path, scales);
        for (std::size_t k = 0; k < path.tau.size(); ++k)
            t.add_row({amp, path.tau[k], path.phi[k], volts[k]});
        out.results[amp == 0.0 ? "undriven" : "driven"] = {
            {"i_mw", amp}, {"switched", tau_switch.has_value()},
            {"tau_switch", tau_switch ? nlohmann::json(*tau_switch) : nlohmann::json()}};
    }
    out.results["stream_id"] = *twin;
    out.results["initial_phase"] = initial_state(quiet.sim, RngStream{c.seed(), *twin}).phi;
    out.files["data.csv"] = to_csv(t);
    out.notes.push_back("noise off (T = 0); both traces share the initial phase of stream_id");
    return out;
}

Result fig4(const Context& c)
{
    const DerivedScales scales = derive_scales(c.doc.scenario.junction);
    CsvTable t;
    t.header = {"trace", "stream_id", "switched", "tau", "phi", "voltage_V"};
    Result out;
    for (std::int64_t k = 0; k < c.settings.fig4_traces; ++k) {
        std::optional<double> tau_switch;
        const Trajectory path =
            display_trajectory(c.scenario(), c.settings.fig4_tau, c.seed(), static_cast<std::uint64_t>(k), tau_switch);
        const auto volts = voltage_series(path, scales);
        for (std::size_t i = 0; i < path.tau.size(); ++i)
            t.add_row({static_cast<double>(k), static_cast<double>(k), tau_switch ? 1.0 : 0.0, path.tau[i],
                       path.phi[i], volts[i]});
        out.results["traces"].push_back(
            {{"stream_id", k}, {"tau_switch", tau_switch ? nlohmann::json(*tau_switch) : nlohmann::json()}});
    }
    out.files["data.csv"] = to_csv(t);
    return out;
}

Result sweep_experiment(const Context& c, SweepAxis axis, const std::vector<double>& grid)
{
    const auto points = sweep({c.scenario(), c.settings.n_runs, c.seed()}, axis, grid, SeedPolicy::PerPoint, c.run);
    CsvTable t;
    t.header = sweep_columns();
    for (auto& row : sweep_rows(points))
        t.add_row(row);
    Result out;
    out.files["data.csv"] = to_csv(t);
    out.results["axis"] = to_string(axis);
    if (axis == SweepAxis::Bias)
        if (const auto knee = switching_knee(points))
            out.results["knee_i_b"] = *knee;
    return out;
}

Result fig6(const Context& c)
{
    std::vector<SwitchStats> stats;
    for (double amp : c.settings.fig6_i_mw) {
        Scenario s = c.scenario();
        if (amp > 0.0)
            s.drive = cw_probe(*c.preset, amp);
        stats.push_back(run_ensemble({s, c.settings.n_runs, c.seed()}, c.run));
    }
    std::vector<std::pair<double, const SwitchStats*>> series;
    CsvTable summary;
    summary.header = summary_columns();
    Result out;
    for (std::size_t k = 0; k < stats.size(); ++k) {
        series.emplace_back(c.settings.fig6_i_mw[k], &stats[k]);
        const auto d = safe_kc(stats.front(), stats[k]);
        summary.add_row(summary_row(c.settings.fig6_i_mw[k], stats[k], d));
        out.results["points"].push_back({{"i_mw", c.settings.fig6_i_mw[k]},
                                         {"d_kc", d ? nlohmann::json(*d) : nlohmann::json()},
                                         {"stats", stats_json(stats[k])}});
    }
    out.files["data.csv"] = to_csv(times_table(series));
    out.files["summary.csv"] = to_csv(summary);
    out.notes.push_back("d_kc is measured against the first amplitude with matched seeds");
    out.notes.push_back("the two intermediate amplitudes are not stated in the paper; the default grid is a guess");
    return out;
}

PsdOptions psd_options(const Context& c)
{
    PsdOptions o;
    o.n_samples = static_cast<std::size_t>(c.settings.psd_samples);
    o.probe_hz = c.preset->f_s_GHz * 1e9;
    o.seed = c.seed();
    return o;
}

Result fig7a(const Context& c)
{
    const VoltagePsd psd = voltage_noise_psd(c.scenario(), psd_options(c));
    CsvTable t;
    t.header = {"frequency_hz", "s_vv_V2_per_Hz", "s_vv_dB"};
    for (std::size_t k = 0; k < psd.frequency_hz.size(); ++k)
        t.add_row({psd.frequency_hz[k], psd.s_vv[k], 10.0 * std::log10(psd.s_vv[k])});
    Result out;
    out.files["data.csv"] = to_csv(t);
    out.results = {{"probe_hz", psd.probe_hz},
                   {"s_vv_at_probe", psd.s_vv_at_probe},
                   {"s_vv_at_probe_dB", 10.0 * std::log10(psd.s_vv_at_probe)},
                   {"segment_length", psd.segment_length},
                   {"segments", psd.segments},
                   {"probe_offset_bins", psd.probe_offset_bins}};
    return out;
}

ResponsivityOptions responsivity_options(const Context& c)
{
    ResponsivityOptions o;
    o.pairs = c.settings.pairs;
    o.seed = c.seed();
    o.run = c.run;
    return o;
}

Result fig7b(const Context& c)
{
    Scenario s = c.scenario();
    s.drive = cw_probe(*c.preset, c.preset->i_mw);
    const ResponsivityOptions opts = responsivity_options(c);
    const ResponsivityResult r = responsivity(s, opts);
    CsvTable t;
    t.header = {"pair", "mean_V_driven", "mean_V_undriven"};
    for (std::size_t k = 0; k < r.pair_V_driven.size(); ++k)
        t.add_row({static_cast<double>(k), r.pair_V_driven[k], r.pair_V_undriven[k]});
    Result out;
    out.files["data.csv"] = to_csv(t);
    out.results = {{"delta_V_V", r.delta_V},
                   {"mean_V_driven", r.mean_V_driven},
                   {"mean_V_undriven", r.mean_V_undriven},
                   {"pairs", r.pairs},
                   {"run_tau", opts.run_tau.value_or(s.sim.tau_max)},
                   {"window_fraction", opts.window_fraction}};
    out.notes.push_back("pair count, run length and averaging window are not given in the paper");
    return out;
}

double resolve_min_d_kc(const Context& c, Result& out)
{
    if (c.settings.min_d_kc) {
        out.results["min_d_kc_source"] = "setting";
        return *c.settings.min_d_kc;
    }
    const DetectionReport report = preset_nep_chain(c.doc, *c.preset, c.settings, c.seed(), c.run);
    out.results["nep_chain"] = report_json(report);
    out.results["min_d_kc_source"] = "nep_chain";
    return report.min_d_kc;
}

Result fig8(const Context& c)
{
    Result out;
    const DetectionReport report = preset_nep_chain(c.doc, *c.preset, c.settings, c.seed(), c.run);
    out.results["nep_chain"] = report_json(report);
    Scenario quiet = c.scenario();
    Scenario weak = quiet;
    const double i_min = report.I_min / quiet.junction.I0;
    weak.drive = cw_probe(*c.preset, i_min);
    const SwitchStats s0 = run_ensemble({quiet, c.settings.n_runs, c.seed()}, c.run);
    const SwitchStats s1 = run_ensemble({weak, c.settings.n_runs, c.seed()}, c.run);
    CsvTable summary;
    summary.header = summary_columns();
    summary.add_row(summary_row(0.0, s0, std::nullopt));
    summary.add_row(summary_row(i_min, s1, safe_kc(s0, s1)));
    out.files["data.csv"] = to_csv(times_table({{0.0, &s0}, {i_min, &s1}}));
    out.files["summary.csv"] = to_csv(summary);
    return out;
}

Result fig9(const Context& c)
{
    Scenario s = c.scenario();
    s.drive = pulse_drive(*c.preset, 1.0);
    const DerivedScales scales = derive_scales(s.junction);
    const DriveSignal signal = resolve_drive(s.drive, s.junction, scales, s.op.i_b);
    CsvTable t;
    t.header = {"t_ns", "current_uA"};
    const int n = 2000;
    for (int k = 0; k <= n; ++k) {
        const double t_ns = c.settings.fig9_window_ns * k / n;
        const double tau = t_ns * 1e-9 * scales.omega_J;
        t.add_row({t_ns, drive_current(signal, tau) * s.junction.I0 * 1e6});
    }
    Result out;
    out.files["data.csv"] = to_csv(t);
    out.results["peak_current_uA"] = std::get<PhotonPulse>(signal).peak() * s.junction.I0 * 1e6;
    out.results["photons"] = 1;
    return out;
}

Result fig10(const Context& c)
{
    Result out;
    const double min_d_kc = resolve_min_d_kc(c, out);
    Scenario quiet = c.scenario();
    Scenario pulse = quiet;
    pulse.drive = pulse_drive(*c.preset, c.settings.fig10_photons);
    const SwitchStats s0 = run_ensemble({quiet, c.settings.n_runs, c.seed()}, c.run);
    const SwitchStats s1 = run_ensemble({pulse, c.settings.n_runs, c.seed()}, c.run);
    const auto d = safe_kc(s0, s1);
    CsvTable summary;
    summary.header = summary_columns();
    summary.add_row(summary_row(0.0, s0, std::nullopt));
    summary.add_row(summary_row(c.settings.fig10_photons, s1, d));
    out.files["data.csv"] = to_csv(times_table({{0.0, &s0}, {c.settings.fig10_photons, &s1}}));
    out.files["summary.csv"] = to_csv(summary);
    out.results["d_kc"] = d ? nlohmann::json(*d) : nlohmann::json();
    out.results["min_d_kc"] = min_d_kc;
    out.results["detectable"] = d && *d > min_d_kc;
    return out;
}

PhotonThresholdResult threshold_scan(const Context& c, double min_d_kc, bool stop)
{
    Scenario pulse = c.scenario();
    pulse.drive = pulse_drive(*c.preset, 1.0);
    PhotonThresholdOptions o;
    o.n_runs = c.settings.n_runs;
    o.seed = c.seed();
    o.stop_at_first = stop;
    o.run = c.run;
    return photon_threshold(pulse, min_d_kc, c.settings.fig11_grid, o);
}

Result fig11(const Context& c)
{
    Result out;
    const double min_d_kc = resolve_min_d_kc(c, out);
    const PhotonThresholdResult r = threshold_scan(c, min_d_kc, c.settings.fig11_stop);
    CsvTable t;
    t.header = {"photons", "n_runs", "n_switched", "n_censored", "mean_gamma", "sem_sq_gamma", "d_kc"};
    for (const auto& p : r.curve)
        t.add_row(summary_row(p.photons, p.stats, p.d_kc));
    out.files["data.csv"] = to_csv(t);
    out.results["min_d_kc"] = min_d_kc;
    out.results["n_min"] = r.n_min ? nlohmann::json(*r.n_min) : nlohmann::json();
    return out;
}

std::vector<std::string> table1_columns()
{
    return {"junction_index", "I0_uA",     "R_ohm",   "C_fF",     "T_mK",   "i_b",
            "i_mw",           "f_s_GHz",   "S_vv_V2_per_Hz", "delta_V_V", "S_V_per_W",
            "NEP_aW_per_rtHz", "I_min_A",  "min_d_kc"};
}

Result table1(const Context& c)
{
    const DetectionReport r = preset_nep_chain(c.doc, *c.preset, c.settings, c.seed(), c.run);
    const Scenario& s = c.doc.scenario;
    CsvTable t;
    t.header = table1_columns();
    t.add_row({junction_index(c.preset->id), s.junction.I0 * 1e6, s.junction.R, s.junction.C * 1e15, s.op.T * 1e3,
               s.op.i_b, c.preset->i_mw, c.preset->f_s_GHz, r.S_vv, r.delta_V, r.S, r.NEP * 1e18, r.I_min,
               r.min_d_kc});
    Result out;
    out.files["data.csv"] = to_csv(t);
    out.results = report_json(r);
    out.results["paper_NEP_aW_per_rtHz"] = c.preset->paper_nep_aW;
    out.results["paper_min_d_kc"] = c.preset->paper_min_d_kc;
    return out;
}

Result table2(const Context& c)
{
    Result out;
    const double min_d_kc = resolve_min_d_kc(c, out);
    const PhotonThresholdResult r = threshold_scan(c, min_d_kc, true);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CsvTable t;
    t.header = {"junction_index", "i_b", "min_d_kc", "n_min"};
    t.add_row({junction_index(c.preset->id), c.doc.scenario.op.i_b, min_d_kc, r.n_min.value_or(nan)});
    out.files["data.csv"] = to_csv(t);
    out.results["min_d_kc"] = min_d_kc;
    out.results["n_min"] = r.n_min ? nlohmann::json(*r.n_min) : nlohmann::json();
    out.results["paper_n_min"] = c.preset->paper_n_min;
    return out;
}

Context make_context(const ExperimentSpec& spec)
{
    Context c;
    c.preset = &junction_preset(spec.junction);
    c.doc = preset_config(spec.junction);
    c.doc.seed = spec.master_seed;
    if (spec.calibration_factor)
        c.doc.scenario.noise.calibration_factor = *spec.calibration_factor;
    std::vector<std::pair<std::string, std::string>> config_patches;
    for (const auto& [key, value] : spec.overrides) {
        if (key.starts_with("experiment."))
            apply_setting(c.settings, key.substr(11), value);
        else
            config_patches.emplace_back(key, value);
    }
    if (!config_patches.empty())
        c.doc = apply_overrides(c.doc, config_patches);
    c.run = spec.run;
    return c;
}

}  // namespace

std::string_view to_string(JunctionId id)
{
    switch (id) {
    case JunctionId::JJ1: return "JJ1";
    case JunctionId::JJ2: return "JJ2";
    case JunctionId::JJ3: return "JJ3";
    }
    return "?";
}

JunctionId parse_junction(std::string_view s)
{
    for (auto id : {JunctionId::JJ1, JunctionId::JJ2, JunctionId::JJ3})
        if (s == to_string(id))
            return id;
    raise(ErrorKind::InvalidParameter, "unknown junction '" + std::string(s) + "' (expected JJ1, JJ2 or JJ3)");
}

const JunctionPreset& junction_preset(JunctionId id)
{
    return kPresets[static_cast<int>(id)];
}

ConfigDocument preset_config(JunctionId id)
{
    const JunctionPreset& p = junction_preset(id);
    ConfigDocument doc;
    doc.scenario.junction = p.params;
    doc.scenario.op = {p.i_b, p.T};
    doc.scenario.noise.T = p.T;
    doc.scenario.noise.calibration_factor = kDefaultCalibrationFactor;
    return doc;
}

std::string_view to_string(ExperimentId id)
{
    for (const auto& [e, name] : kExperimentNames)
        if (e == id)
            return name;
    return "?";
}

ExperimentId parse_experiment(std::string_view s)
{
    for (const auto& [e, name] : kExperimentNames)
        if (name == s)
            return e;
    raise(ErrorKind::Usage, "unknown experiment id '" + std::string(s) + "'");
}

std::vector<ExperimentId> all_experiments()
{
    std::vector<ExperimentId> ids;
    for (const auto& [e, name] : kExperimentNames)
        ids.push_back(e);
    return ids;
}

std::vector<JunctionId> experiment_junctions(ExperimentId id)
{
    switch (id) {
    case ExperimentId::Fig9:
    case ExperimentId::Fig10:
    case ExperimentId::Fig11:
    case ExperimentId::Table1:
    case ExperimentId::Table2:
        return {JunctionId::JJ1, JunctionId::JJ2, JunctionId::JJ3};
    default:
        return {JunctionId::JJ1};
    }
}

std::vector<double> parse_grid(std::string_view text)
{
    std::vector<double> grid;
    if (text.find(':') != std::string_view::npos) {
        std::vector<double> parts;
        std::size_t start = 0;
        for (;;) {
            const auto colon = text.find(':', start);
            parts.push_back(parse_double(text.substr(start, colon - start)));
            if (colon == std::string_view::npos)
                break;
            start = colon + 1;
        }
        if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
            raise(ErrorKind::InvalidParameter, "grid must be start:stop:step with step > 0 and stop >= start");
        const auto n = static_cast<std::int64_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
        for (std::int64_t k = 0; k <= n; ++k)
            grid.push_back(parts[0] + static_cast<double>(k) * parts[2]);
        return grid;
    }
    std::size_t start = 0;
    for (;;) {
        const auto comma = text.find(',', start);
        grid.push_back(parse_double(text.substr(start, comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return grid;
}

void apply_setting(ExperimentSettings& s, const std::string& name, const std::string& value)
{
    auto integer = [&](std::int64_t& field) {
        const double x = parse_double(value);
        if (x != std::floor(x) || x < 1)
            throw ConfigError("experiment." + name, 0, "experiment." + name + " must be a positive integer");
        field = static_cast<std::int64_t>(x);
    };
    auto positive = [&](double& field) {
        const double x = parse_double(value);
        if (!(x > 0.0) || !std::isfinite(x))
            throw ConfigError("experiment." + name, 0, "experiment." + name + " must be positive");
        field = x;
    };
    try {
        if (name == "n_runs")
            integer(s.n_runs);
        else if (name == "fig3_tau")
            positive(s.fig3_tau);
        else if (name == "fig3_i_mw")
            positive(s.fig3_i_mw);
        else if (name == "fig3_search")
            integer(s.fig3_search);
        else if (name == "fig4_traces")
            integer(s.fig4_traces);
        else if (name == "fig4_tau")
            positive(s.fig4_tau);
        else if (name == "fig5a_grid")
            s.fig5a_grid = parse_grid(value);
        else if (name == "fig5b_grid")
            s.fig5b_grid = parse_grid(value);
        else if (name == "fig6_i_mw")
            s.fig6_i_mw = parse_grid(value);
        else if (name == "psd_samples")
            integer(s.psd_samples);
        else if (name == "pairs")
            integer(s.pairs);
        else if (name == "fig9_window_ns")
            positive(s.fig9_window_ns);
        else if (name == "fig10_photons")
            positive(s.fig10_photons);
        else if (name == "fig11_grid")
            s.fig11_grid = parse_grid(value);
        else if (name == "fig11_stop")
            s.fig11_stop = value == "true" || value == "1";
        else if (name == "min_d_kc")
            s.min_d_kc = parse_double(value);
        else
            throw ConfigError("experiment." + name, 0, "unknown setting experiment." + name);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError("experiment." + name, 0, "experiment." + name + ": " + e.what());
    }
}

nlohmann::json to_json(const ExperimentSettings& s)
{
    nlohmann::json j;
    j["n_runs"] = s.n_runs;
    j["fig3_tau"] = s.fig3_tau;
    j["fig3_i_mw"] = s.fig3_i_mw;
    j["fig3_search"] = s.fig3_search;
    j["fig4_traces"] = s.fig4_traces;
    j["fig4_tau"] = s.fig4_tau;
    j["fig5a_grid"] = s.fig5a_grid;
    j["fig5b_grid"] = s.fig5b_grid;
    j["fig6_i_mw"] = s.fig6_i_mw;
    j["psd_samples"] = s.psd_samples;
    j["pairs"] = s.pairs;
    j["fig9_window_ns"] = s.fig9_window_ns;
    j["fig10_photons"] = s.fig10_photons;
    j["fig11_grid"] = s.fig11_grid;
    j["fig11_stop"] = s.fig11_stop;
    j["min_d_kc"] = s.min_d_kc ? nlohmann::json(*s.min_d_kc) : nlohmann::json();
    return j;
}

DetectionReport preset_nep_chain(const ConfigDocument& doc, const JunctionPreset& preset,
                                 const ExperimentSettings& settings, std::uint64_t seed, const RunOptions& run)
{
    Scenario probe = doc.scenario;
    probe.drive = cw_probe(preset, preset.i_mw);
    NepOptions o;
    o.psd.n_samples = static_cast<std::size_t>(settings.psd_samples);
    o.psd.seed = seed;
    o.responsivity.pairs = settings.pairs;
    o.responsivity.seed = seed;
    o.responsivity.run = run;
    o.n_runs = settings.n_runs;
    o.seed = seed;
    o.run = run;
    return nep_chain(probe, o);
}

ExperimentOutput run_experiment(const ExperimentSpec& spec)
{
    const auto ids = experiment_junctions(spec.id);
    if (std::find(ids.begin(), ids.end(), spec.junction) == ids.end())
        raise(ErrorKind::Usage, std::string(to_string(spec.id)) + " is only defined for JJ1");

    const auto started = std::chrono::steady_clock::now();
    const Context c = make_context(spec);
    Result r;
    try {
        switch (spec.id) {
        case ExperimentId::Fig3: r = fig3(c); break;
        case ExperimentId::Fig4: r = fig4(c); break;
        case ExperimentId::Fig5a: r = sweep_experiment(c, SweepAxis::Bias, c.settings.fig5a_grid); break;
        case ExperimentId::Fig5b: r = sweep_experiment(c, SweepAxis::Temperature, c.settings.fig5b_grid); break;
        case ExperimentId::Fig6: r = fig6(c); break;
        case ExperimentId::Fig7a: r = fig7a(c); break;
        case ExperimentId::Fig7b: r = fig7b(c); break;
        case ExperimentId::Fig8: r = fig8(c); break;
        case ExperimentId::Fig9: r = fig9(c); break;
        case ExperimentId::Fig10: r = fig10(c); break;
        case ExperimentId::Fig11: r = fig11(c); break;
        case ExperimentId::Table1: r = table1(c); break;
        case ExperimentId::Table2: r = table2(c); break;
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(to_string(spec.id)) + "/" + std::string(to_string(spec.junction)) + ": " +
                                  e.what());
    }

    ExperimentOutput out;
    out.id = std::string(to_string(spec.id));
    out.junction = std::string(to_string(spec.junction));
    out.files = std::move(r.files);
    out.manifest.command = "reproduce " + out.id;
    out.manifest.junction = out.junction;
    out.manifest.config = c.doc;
    out.manifest.settings = to_json(c.settings);
    out.manifest.settings["overrides"] = spec.overrides;
    out.manifest.results = std::move(r.results);
    out.manifest.notes = std::move(r.notes);
    out.manifest.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

ExperimentOutput run_table1_merged(const ExperimentSpec& spec)
{
    const auto started = std::chrono::steady_clock::now();
    CsvTable merged;
    merged.header = table1_columns();
    ExperimentOutput out;
    out.id = "table1";
    out.junction = "all";
    for (JunctionId j : experiment_junctions(ExperimentId::Table1)) {
        ExperimentSpec one = spec;
        one.id = ExperimentId::Table1;
        one.junction = j;
        const ExperimentOutput part = run_experiment(one);
        const CsvTable rows = parse_csv(part.files.at("data.csv"));
        for (const auto& row : rows.rows)
            merged.add_row(row);
        out.manifest.results[std::string(to_string(j))] = part.manifest.results;
        if (j == JunctionId::JJ1) {
            out.manifest.config = part.manifest.config;
            out.manifest.settings = part.manifest.settings;
        }
    }
    out.files["data.csv"] = to_csv(merged);
    out.manifest.command = "reproduce table1";
    out.manifest.junction = "all";
    out.manifest.notes.push_back("config shows JJ1; JJ2 and JJ3 use their own preset rows with the same overrides");
    out.manifest.wall_clock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return out;
}

std::filesystem::path write_experiment(const std::filesystem::path& root, const ExperimentOutput& output)
{
    const auto dir = root / output.id / output.junction;
    write_run(dir, output.files, output.manifest);
    return dir;
}

}  // namespace cbjj
