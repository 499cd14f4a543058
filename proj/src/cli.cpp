#include "cbjj/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "cbjj/csv.hpp"
#include "cbjj/error.hpp"
#include "cbjj/experiments.hpp"

namespace cbjj {

namespace {

struct CommonOptions {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::string junction;
    unsigned threads = 0;
    std::optional<double> calibration;
    std::optional<std::int64_t> n_runs;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_config = true)
{
    if (with_config)
        cmd->add_option("--config", o.config, "Configuration file");
    cmd->add_option("--out", o.out, "Output root directory (default: $CBJJ_OUT or ./runs)");
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--junction", o.junction, "Junction preset: JJ1, JJ2 or JJ3");
    cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    cmd->add_option("--calibration", o.calibration, "Noise calibration factor");
    cmd->add_option("--n-runs", o.n_runs, "Trajectories per ensemble");
}

template <class F>
auto as_usage(F f)
{
    try {
        return f();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidParameter)
            raise(ErrorKind::Usage, e.what());
        throw;
    }
}

std::filesystem::path output_root(const CommonOptions& o)
{
    if (!o.out.empty())
        return o.out;
    if (const char* env = std::getenv(kOutputRootEnv); env && *env)
        return env;
    return "runs";
}

std::string junction_label(const CommonOptions& o)
{
    if (!o.config.empty())
        return "custom";
    return o.junction.empty() ? "JJ1" : o.junction;
}

ConfigDocument load_document(const CommonOptions& o)
{
    ConfigDocument doc = o.config.empty()
                             ? preset_config(as_usage([&] { return parse_junction(o.junction.empty() ? "JJ1" : o.junction); }))
                             : load_config(o.config);
    std::vector<std::pair<std::string, std::string>> patches;
    if (o.seed)
        patches.emplace_back("operating.seed", std::to_string(*o.seed));
    if (o.calibration)
        patches.emplace_back("noise.calibration_factor", format_double(*o.calibration));
    if (o.n_runs)
        patches.emplace_back("ensemble.n_runs", std::to_string(*o.n_runs));
    return patches.empty() ? doc : apply_overrides(doc, patches);
}

RunOptions run_options(const CommonOptions& o)
{
    RunOptions r;
    r.threads = o.threads;
    return r;
}

std::string fmt(double x)
{
    return format_double(x);
}

std::string opt_fmt(const std::optional<double>& x)
{
    return x ? fmt(*x) : "nan";
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Outcome {
    std::string summary;
};

// -- subcommand bodies --------------------------------------------------------

Outcome cmd_simulate(const CommonOptions& o, std::optional<std::uint64_t> trace)
{
    const auto t0 = std::chrono::steady_clock::now();
    const ConfigDocument doc = load_document(o);
    const Problem problem = make_problem(doc.scenario);
    std::map<std::string, std::string> files;
    std::int64_t failed = 0;
    const auto outcomes = run_outcomes(problem, doc.n_runs, doc.seed, run_options(o), &failed);
    const SwitchStats stats = summarize(outcomes, failed);
    CsvTable t;
    t.header = {"stream_id", "switched", "tau_switch"};
    for (std::size_t k = 0; k < outcomes.size(); ++k)
        t.add_row({static_cast<double>(k), outcomes[k].switched() ? 1.0 : 0.0,
                   outcomes[k].tau_switch.value_or(std::numeric_limits<double>::quiet_NaN())});
    files["data.csv"] = to_csv(t);
    if (trace) {
        const TrajectoryResult r = run_trajectory(problem, RngStream{doc.seed, *trace}, true);
        const auto volts = voltage_series(*r.path, derive_scales(doc.scenario.junction));
        CsvTable tr;
        tr.header = {"tau", "phi", "v", "voltage_V"};
        for (std::size_t k = 0; k < r.path->tau.size(); ++k)
            tr.add_row({r.path->tau[k], r.path->phi[k], r.path->v[k], volts[k]});
        files["trace.csv"] = to_csv(tr);
    }
    RunManifest m;
    m.command = "simulate";
    m.junction = junction_label(o);
    m.config = doc;
    if (trace)
        m.settings["trace_stream"] = *trace;
    m.results = {{"n_runs", stats.n_runs},
                 {"n_switched", stats.n_switched},
                 {"n_censored", stats.n_censored},
                 {"n_failed", stats.n_failed}};
    m.wall_clock_s = seconds_since(t0);
    write_run(output_root(o) / "simulate", files, m);
    return {"simulate n_runs=" + std::to_string(stats.n_runs) + " n_switched=" + std::to_string(stats.n_switched) +
            " n_censored=" + std::to_string(stats.n_censored) + " mean_gamma=" + opt_fmt(stats.mean_gamma) +
            " sem_sq_gamma=" + opt_fmt(stats.sem_sq_gamma)};
}

Outcome cmd_sweep(const CommonOptions& o, const std::string& axis_name, const std::string& grid_text, bool matched)
{
    const auto t0 = std::chrono::steady_clock::now();
    const ConfigDocument doc = load_document(o);
    const SweepAxis axis = as_usage([&] { return parse_sweep_axis(axis_name); });
    const auto grid = as_usage([&] { return parse_grid(grid_text); });
    const auto points = sweep({doc.scenario, doc.n_runs, doc.seed}, axis, grid,
                              matched ? SeedPolicy::Matched : SeedPolicy::PerPoint, run_options(o));
    CsvTable t;
    t.header = sweep_columns();
    for (auto& row : sweep_rows(points))
        t.add_row(row);
    RunManifest m;
    m.command = "sweep";
    m.junction = junction_label(o);
    m.config = doc;
    m.settings = {{"axis", axis_name}, {"grid", grid}, {"seeds", matched ? "matched" : "per_point"}};
    m.wall_clock_s = seconds_since(t0);
    write_run(output_root(o) / "sweep", {{"data.csv", to_csv(t)}}, m);
    std::int64_t switched = 0;
    for (const auto& p : points)
        switched += p.stats.n_switched;
    return {"sweep axis=" + axis_name + " points=" + std::to_string(points.size()) +
            " total_switched=" + std::to_string(switched)};
}

Outcome cmd_kc(const CommonOptions& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    const ConfigDocument doc = load_document(o);
    if (doc.scenario.drive.kind == DriveKind::None)
        throw ConfigError("drive.type", 0, "kc compares a driven ensemble with its undriven twin; set drive.type");
    Scenario quiet = doc.scenario;
    quiet.drive = DriveSpec{};
    const SwitchStats s0 = run_ensemble({quiet, doc.n_runs, doc.seed}, run_options(o));
    const SwitchStats s1 = run_ensemble({doc.scenario, doc.n_runs, doc.seed}, run_options(o));
    const KCResult kc = kc_index(s0, s1);
    CsvTable t;
    t.header = {"driven", "n_runs", "n_switched", "n_censored", "mean_gamma", "sem_sq_gamma"};
    for (const auto& [flag, s] : {std::pair{0.0, &s0}, std::pair{1.0, &s1}})
        t.add_row({flag, static_cast<double>(s->n_runs), static_cast<double>(s->n_switched),
                   static_cast<double>(s->n_censored), s->mean_gamma.value_or(NAN), s->sem_sq_gamma.value_or(NAN)});
    RunManifest m;
    m.command = "kc";
    m.junction = junction_label(o);
    m.config = doc;
    m.results = {{"d_kc", kc.d_kc},
                 {"censored_fraction0", kc.censored_fraction0},
                 {"censored_fraction1", kc.censored_fraction1}};
    m.wall_clock_s = seconds_since(t0);
    write_run(output_root(o) / "kc", {{"data.csv", to_csv(t)}}, m);
    return {"kc d_kc=" + fmt(kc.d_kc) + " mean0=" + fmt(kc.mean0) + " mean1=" + fmt(kc.mean1) +
            " censored0=" + fmt(kc.censored_fraction0) + " censored1=" + fmt(kc.censored_fraction1)};
}

Scenario probe_scenario(const ConfigDocument& doc)
{
    Scenario s = doc.scenario;
    if (s.drive.kind != DriveKind::ContinuousWave) {
        s.drive = DriveSpec{};
        s.drive.kind = DriveKind::ContinuousWave;
        s.drive.i_mw = 0.005;
    }
    return s;
}

Outcome cmd_nep(const CommonOptions& o, std::int64_t pairs, std::int64_t psd_samples)
{
    const auto t0 = std::chrono::steady_clock::now();
    const ConfigDocument doc = load_document(o);
    const Scenario probe = probe_scenario(doc);
    NepOptions n;
    n.psd.n_samples = static_cast<std::size_t>(psd_samples);
    n.psd.seed = doc.seed;
    n.responsivity.pairs = pairs;
    n.responsivity.seed = doc.seed;
    n.responsivity.run = run_options(o);
    n.n_runs = doc.n_runs;
    n.seed = doc.seed;
    n.run = run_options(o);
    const DetectionReport r = nep_chain(probe, n);
    CsvTable t;
    t.header = {"probe_hz", "i_mw", "S_vv_V2_per_Hz", "S_v_V_per_rtHz", "delta_V_V", "P_in_W",
                "S_V_per_W", "NEP_W_per_rtHz", "I_min_A", "min_d_kc"};
    t.add_row({r.probe_hz, r.i_mw, r.S_vv, r.S_v, r.delta_V, r.P_in, r.S, r.NEP, r.I_min, r.min_d_kc});
    RunManifest m;
    m.command = "nep";
    m.junction = junction_label(o);
    m.config = doc;
    m.settings = {{"pairs", pairs}, {"psd_samples", psd_samples}, {"probe_i_mw", probe.drive.i_mw}};
    m.results = {{"NEP_aW_per_rtHz", r.NEP * 1e18}, {"min_d_kc", r.min_d_kc}, {"delta_V_V", r.delta_V}};
    m.wall_clock_s = seconds_since(t0);
    write_run(output_root(o) / "nep", {{"data.csv", to_csv(t)}}, m);
    return {"nep NEP_aW_per_rtHz=" + fmt(r.NEP * 1e18) + " min_d_kc=" + fmt(r.min_d_kc) +
            " delta_V=" + fmt(r.delta_V) + " S_vv=" + fmt(r.S_vv) + " I_min=" + fmt(r.I_min)};
}

Scenario pulse_template(const ConfigDocument& doc)
{
    Scenario s = doc.scenario;
    if (s.drive.kind != DriveKind::PhotonPulse) {
        s.drive = DriveSpec{};
        s.drive.kind = DriveKind::PhotonPulse;
        s.drive.photons = 1.0;
    }
    return s;
}

CsvTable curve_table(const PhotonThresholdResult& r, std::optional<double> i_b = std::nullopt)
{
    CsvTable t;
    if (i_b)
        t.header = {"i_b", "photons", "n_switched", "n_censored", "d_kc"};
    else
        t.header = {"photons", "n_switched", "n_censored", "d_kc"};
    for (const auto& p : r.curve) {
        std::vector<double> row{p.photons, static_cast<double>(p.stats.n_switched),
                                static_cast<double>(p.stats.n_censored), p.d_kc.value_or(NAN)};
        if (i_b)
            row.insert(row.begin(), *i_b);
        t.add_row(row);
    }
    return t;
}

Outcome cmd_photon_threshold(const CommonOptions& o, double min_d_kc, const std::string& grid_text, bool scan_all)
{
    const auto t0 = std::chrono::steady_clock::now();
    const ConfigDocument doc = load_document(o);
    const auto grid = as_usage([&] { return parse_grid(grid_text); });
    PhotonThresholdOptions p;
    p.n_runs = doc.n_runs;
    p.seed = doc.seed;
    p.stop_at_first = !scan_all;
    p.run = run_options(o);
    const PhotonThresholdResult r = photon_threshold(pulse_template(doc), min_d_kc, grid, p);
    RunManifest m;
    m.command = "photon-threshold";
    m.junction = junction_label(o);
    m.config = doc;
    m.settings = {{"min_d_kc", min_d_kc}, {"grid", grid}, {"stop_at_first", !scan_all}};
    m.results = {{"n_min", r.n_min ? nlohmann::json(*r.n_min) : nlohmann::json()}};
    m.wall_clock_s = seconds_since(t0);
    write_run(output_root(o) / "photon-threshold", {{"data.csv", to_csv(curve_table(r))}}, m);
    require_threshold(r);
    return {"photon-threshold n_min=" + opt_fmt(r.n_min) + " min_d_kc=" + fmt(min_d_kc)};
}

Outcome cmd_optimize_bias(const CommonOptions& o, double min_d_kc, const std::string& bias_text,
                          const std::string& grid_text)
{
    const auto t0 = std::chrono::steady_clock::now();
    const ConfigDocument doc = load_document(o);
    const auto biases = parse_grid(bias_text);
    const auto grid = as_usage([&] { return parse_grid(grid_text); });
    PhotonThresholdOptions p;
    p.n_runs = doc.n_runs;
    p.seed = doc.seed;
    p.stop_at_first = true;
    p.run = run_options(o);
    const OptimizeBiasResult r = optimize_bias(pulse_template(doc), biases, min_d_kc, grid, p);
    CsvTable t;
    t.header = {"i_b", "n_min"};
    CsvTable curves;
    curves.header = {"i_b", "photons", "n_switched", "n_censored", "d_kc"};
    for (const auto& b : r.points) {
        t.add_row({b.i_b, b.threshold.n_min.value_or(NAN)});
        for (auto& row : curve_table(b.threshold, b.i_b).rows)
            curves.add_row(row);
    }
    RunManifest m;
    m.command = "optimize-bias";
    m.junction = junction_label(o);
    m.config = doc;
    m.settings = {{"min_d_kc", min_d_kc}, {"bias_grid", biases}, {"photon_grid", grid}};
    m.results = {{"best_i_b", r.best_i_b ? nlohmann::json(*r.best_i_b) : nlohmann::json()},
                 {"best_n_min", r.best_n_min ? nlohmann::json(*r.best_n_min) : nlohmann::json()}};
    m.wall_clock_s = seconds_since(t0);
    write_run(output_root(o) / "optimize-bias", {{"data.csv", to_csv(t)}, {"curves.csv", to_csv(curves)}}, m);
    if (!r.best_i_b)
        raise(ErrorKind::NotFound, "no bias on the grid reached min_d_kc within the photon grid");
    return {"optimize-bias best_i_b=" + opt_fmt(r.best_i_b) + " n_min=" + opt_fmt(r.best_n_min)};
}

std::vector<std::pair<std::string, std::string>> parse_patches(const std::vector<std::string>& sets)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            raise(ErrorKind::Usage, "--set expects key=value, got '" + s + "'");
        out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return out;
}

Outcome cmd_reproduce(const CommonOptions& o, const std::string& id_text, const std::vector<std::string>& sets)
{
    if (!o.config.empty())
        raise(ErrorKind::Usage, "reproduce uses the junction presets; patch them with --set section.key=value");
    const ExperimentId id = parse_experiment(id_text);
    std::vector<JunctionId> junctions = experiment_junctions(id);
    if (!o.junction.empty())
        junctions = {as_usage([&] { return parse_junction(o.junction); })};
    ExperimentSpec spec;
    spec.id = id;
    spec.master_seed = o.seed.value_or(0);
    spec.calibration_factor = o.calibration;
    spec.overrides = parse_patches(sets);
    if (o.n_runs)
        spec.overrides.emplace_back("experiment.n_runs", std::to_string(*o.n_runs));
    spec.run = run_options(o);
    const auto root = output_root(o);


    std::string summary = "reproduce " + id_text;
    std::vector<std::string> rows;
    for (JunctionId j : junctions) {
        spec.junction = j;
        const ExperimentOutput out = run_experiment(spec);
        write_experiment(root, out);
        summary += " " + std::string(to_string(j)) + "=" + (root / out.id / out.junction).string();
        if (id == ExperimentId::Table1)
            rows.push_back(out.files.at("data.csv"));
    }
    if (id == ExperimentId::Table1 && o.junction.empty()) {
        CsvTable merged;
        for (const auto& text : rows) {
            const CsvTable t = parse_csv(text);
            if (merged.header.empty())
                merged.header = t.header;
            for (const auto& row : t.rows)
                merged.add_row(row);
        }
        RunManifest m;
        m.command = "reproduce table1";
        m.junction = "all";
        m.config = preset_config(JunctionId::JJ1);
        m.config.seed = spec.master_seed;
        if (spec.calibration_factor)
            m.config.scenario.noise.calibration_factor = *spec.calibration_factor;
        m.settings["overrides"] = spec.overrides;
        m.notes.push_back("rows merged from table1/JJ1, table1/JJ2 and table1/JJ3");
        write_run(root / "table1" / "all", {{"data.csv", to_csv(merged)}}, m);
        summary += " all=" + (root / "table1" / "all").string();
    }
    return {summary};
}

Outcome cmd_calibrate(const CommonOptions& o, const std::string& grid_text, double target, double tolerance)
{
    const auto t0 = std::chrono::steady_clock::now();
    ConfigDocument doc = load_document(o);
    CalibrationOptions c;
    c.scenario = doc.scenario;
    c.bias_grid = as_usage([&] { return parse_grid(grid_text); });
    c.n_runs = doc.n_runs;
    c.seed = doc.seed;
    c.target = target;
    c.tolerance = tolerance;
    c.run = run_options(o);
    const CalibrationResult r = calibrate_noise(c);
    doc.scenario.noise.calibration_factor = r.factor;
    CsvTable t;
    t.header = {"calibration_factor", "knee_i_b"};
    for (const auto& step : r.history)
        t.add_row({step.factor, step.knee.value_or(NAN)});
    RunManifest m;
    m.command = "calibrate";
    m.junction = junction_label(o);
    m.config = doc;
    m.settings = {{"bias_grid", c.bias_grid}, {"target", target}, {"tolerance", tolerance}};
    m.results = {{"calibration_factor", r.factor},
                 {"knee_i_b", r.knee ? nlohmann::json(*r.knee) : nlohmann::json()},
                 {"reused_initial", r.reused_initial}};
    m.wall_clock_s = seconds_since(t0);
    write_run(output_root(o) / "calibrate",
              {{"data.csv", to_csv(t)}, {"calibrated.cfg", serialize_config(doc)}}, m);
    return {"calibrate calibration_factor=" + fmt(r.factor) + " knee_i_b=" + opt_fmt(r.knee) +
            " evaluations=" + std::to_string(r.history.size())};
}

int exit_code(ErrorKind kind)
{
    switch (kind) {
    case ErrorKind::Usage: return kExitUsage;
    case ErrorKind::Config:
    case ErrorKind::Io: return kExitConfig;
    default: return kExitComputation;
    }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Monte Carlo simulator for current-biased Josephson junction photon detectors", "cbjj"};
    app.require_subcommand(1);
    CommonOptions o;

    auto* simulate = app.add_subcommand("simulate", "Run one switching ensemble");
    add_common(simulate, o);
    std::optional<std::uint64_t> trace;
    simulate->add_option("--trace", trace, "Also record the trajectory of this stream id");

    auto* sweep_cmd = app.add_subcommand("sweep", "Ensemble per grid value along one axis");
    add_common(sweep_cmd, o);
    std::string axis = "bias", grid = "0.70:0.88:0.01";
    bool matched = false;
    sweep_cmd->add_option("--axis", axis, "bias, temperature, photon_number or drive_amplitude");
    sweep_cmd->add_option("--grid", grid, "start:stop:step or comma list");
    sweep_cmd->add_flag("--matched", matched, "Reuse the master seed at every grid point");

    auto* kc = app.add_subcommand("kc", "KC index of the configured drive against no drive");
    add_common(kc, o);

    auto* nep = app.add_subcommand("nep", "Voltage noise, responsivity, NEP and min d_KC");
    add_common(nep, o);
    std::int64_t pairs = 64, psd_samples = std::int64_t{1} << 18;
    nep->add_option("--pairs", pairs, "Matched trajectory pairs for the responsivity");
    nep->add_option("--psd-samples", psd_samples, "Voltage samples for the noise spectrum");

    auto* threshold = app.add_subcommand("photon-threshold", "Smallest detectable photon number");
    add_common(threshold, o);
    double min_d_kc = 0.0;
    std::string photon_grid = "1:200:1";
    bool scan_all = false;
    threshold->add_option("--min-dkc", min_d_kc, "Discriminability floor")->required();
    threshold->add_option("--grid", photon_grid, "Photon numbers, ascending");
    threshold->add_flag("--scan-all", scan_all, "Evaluate the whole grid instead of stopping at N_min");

    auto* optimize = app.add_subcommand("optimize-bias", "Photon threshold across bias currents");
    add_common(optimize, o);
    std::string bias_grid = "0.70:0.88:0.02";
    optimize->add_option("--min-dkc", min_d_kc, "Discriminability floor")->required();
    optimize->add_option("--bias-grid", bias_grid, "Bias values");
    optimize->add_option("--grid", photon_grid, "Photon numbers, ascending");

    auto* reproduce = app.add_subcommand("reproduce", "Run a paper figure or table recipe");
    add_common(reproduce, o, false);
    std::string experiment;
    std::vector<std::string> sets;
    reproduce->add_option("experiment", experiment, "fig3 ... fig11, table1, table2")->required();
    reproduce->add_option("--set", sets, "Override: section.key=value or experiment.name=value");

    auto* calibrate = app.add_subcommand("calibrate", "Fit the noise factor to the switching knee");
    add_common(calibrate, o);
    std::string calib_grid = "0.76:0.82:0.005";
    double target = 0.789, tolerance = 0.005;
    calibrate->add_option("--grid", calib_grid, "Bias grid");
    calibrate->add_option("--target", target, "Knee position");
    calibrate->add_option("--tolerance", tolerance, "Accepted knee error");

    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        Outcome result;
        if (*simulate)
            result = cmd_simulate(o, trace);
        else if (*sweep_cmd)
            result = cmd_sweep(o, axis, grid, matched);
        else if (*kc)
            result = cmd_kc(o);
        else if (*nep)
            result = cmd_nep(o, pairs, psd_samples);
        else if (*threshold)
            result = cmd_photon_threshold(o, min_d_kc, photon_grid, scan_all);
        else if (*optimize)
            result = cmd_optimize_bias(o, min_d_kc, bias_grid, photon_grid);
        else if (*reproduce)
            result = cmd_reproduce(o, experiment, sets);
        else if (*calibrate)
            result = cmd_calibrate(o, calib_grid, target, tolerance);
        out << result.summary << "\n";
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Error& e) {
        const bool usage = e.kind() == ErrorKind::Usage;
        err << (usage ? "usage error: " : "error: ") << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "io error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitComputation;
    }
}

}  // namespace cbjj
