#include "cbjj/ensemble.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "cbjj/error.hpp"

namespace cbjj {

double SwitchStats::censored_fraction() const
{
    return n_runs > 0 ? static_cast<double>(n_censored) / static_cast<double>(n_runs) : 0.0;
}

double SwitchStats::switched_fraction() const
{
    return n_runs > 0 ? static_cast<double>(n_switched) / static_cast<double>(n_runs) : 0.0;
}

void mean_and_sem_sq(std::span<const double> xs, std::optional<double>& mean, std::optional<double>& sem_sq)
{
    mean.reset();
    sem_sq.reset();
    const auto n = static_cast<double>(xs.size());
    if (xs.empty())
        return;
    double sum = 0.0;
    for (double x : xs)
        sum += x;
    const double m = sum / n;
    mean = m;
    if (xs.size() < 2)
        return;
    double ss = 0.0;
    for (double x : xs)
        ss += (x - m) * (x - m);
    sem_sq = ss / (n * (n - 1.0));
}

SwitchStats summarize(std::span<const SwitchOutcome> outcomes, std::int64_t n_failed)
{
    SwitchStats s;
    s.n_runs = static_cast<std::int64_t>(outcomes.size()) + n_failed;
    s.n_failed = n_failed;
    for (const auto& o : outcomes) {
        if (o.switched()) {
            s.times.push_back(*o.tau_switch);
            ++s.n_switched;
        } else {
            ++s.n_censored;
        }
    }
    mean_and_sem_sq(s.times, s.mean_gamma, s.sem_sq_gamma);
    return s;
}

std::vector<SwitchOutcome> run_outcomes(const Problem& problem, std::int64_t n_runs, std::uint64_t master_seed,
                                        const RunOptions& options, std::int64_t* n_failed)
{
    if (n_runs < 1)
        raise(ErrorKind::InvalidParameter, "ensemble needs at least one run");
    const auto n = static_cast<std::size_t>(n_runs);
    std::vector<SwitchOutcome> outcomes(n);
    std::vector<char> failed(n, 0);
    std::vector<std::string> messages(n);

    const bool complete = parallel_for(n, options, [&](std::size_t i) {
        try {
            outcomes[i] = run_trajectory(problem, RngStream{master_seed, i}).outcome;
        } catch (const NonFiniteStateError& e) {
            failed[i] = 1;
            messages[i] = e.what();
        }
    });
    if (!complete)
        raise(ErrorKind::Cancelled, "ensemble cancelled");

    std::vector<SwitchOutcome> kept;
    kept.reserve(n);
    std::int64_t bad = 0;
    std::string first_message;
    for (std::size_t i = 0; i < n; ++i) {
        if (failed[i]) {
            if (bad == 0)
                first_message = "stream " + std::to_string(i) + ": " + messages[i];
            ++bad;
        } else {
            kept.push_back(outcomes[i]);
        }
    }
    if (bad * 100 > n_runs)
        raise(ErrorKind::Computation, std::to_string(bad) + " of " + std::to_string(n_runs) +
                                          " trajectories failed (first: " + first_message + ")");
    if (n_failed)
        *n_failed = bad;
    return kept;
}

SwitchStats run_ensemble(const EnsembleConfig& config, const RunOptions& options)
{
    if (config.n_runs < 2)
        raise(ErrorKind::InvalidParameter, "ensemble n_runs must be at least 2");
    const Problem problem = make_problem(config.scenario);
    std::int64_t failed = 0;
    const auto outcomes = run_outcomes(problem, config.n_runs, config.master_seed, options, &failed);
    return summarize(outcomes, failed);
}

std::string_view to_string(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::Bias: return "bias";
    case SweepAxis::Temperature: return "temperature";
    case SweepAxis::PhotonNumber: return "photon_number";
    case SweepAxis::DriveAmplitude: return "drive_amplitude";
    }
    return "bias";
}

SweepAxis parse_sweep_axis(std::string_view s)
{
    if (s == "bias") return SweepAxis::Bias;
    if (s == "temperature") return SweepAxis::Temperature;
    if (s == "photon_number") return SweepAxis::PhotonNumber;
    if (s == "drive_amplitude") return SweepAxis::DriveAmplitude;
    raise(ErrorKind::InvalidParameter, "unknown sweep axis '" + std::string(s) + "'");
}

Scenario with_axis_value(Scenario scenario, SweepAxis axis, double value)
{
    switch (axis) {
    case SweepAxis::Bias:
        scenario.op.i_b = value;
        break;
    case SweepAxis::Temperature:
        scenario.op.T = value;
        break;
    case SweepAxis::PhotonNumber:
        if (value > 0.0)
            scenario.drive.kind = DriveKind::PhotonPulse;
        scenario.drive.photons = value;
        break;
    case SweepAxis::DriveAmplitude:
        if (value > 0.0)
            scenario.drive.kind = DriveKind::ContinuousWave;
        scenario.drive.i_mw = value;
        break;
    }
    return scenario;
}

std::vector<SweepPoint> sweep(const EnsembleConfig& config, SweepAxis axis, std::span<const double> grid,
                              SeedPolicy seeds, const RunOptions& options)
{
    if (grid.empty())
        raise(ErrorKind::InvalidParameter, "sweep grid must be non-empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i - 1] <= grid[i]))
            raise(ErrorKind::InvalidParameter, "sweep grid must be sorted ascending");

    std::vector<SweepPoint> points;
    points.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        EnsembleConfig point = config;
        point.scenario = with_axis_value(config.scenario, axis, grid[k]);
        point.master_seed = seeds == SeedPolicy::PerPoint ? config.master_seed + k : config.master_seed;
        try {
            points.push_back({grid[k], run_ensemble(point, options)});
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(to_string(axis)) + "=" + std::to_string(grid[k]) + ": " + e.what());
        }
    }
    return points;
}

std::vector<std::string> sweep_columns()
{
    return {"grid_value", "n_runs", "n_switched", "n_censored", "mean_gamma", "sem_sq_gamma"};
}

std::vector<std::vector<double>> sweep_rows(std::span<const SweepPoint> points)
{
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> rows;
    rows.reserve(points.size());
    for (const auto& p : points)
        rows.push_back({p.value, static_cast<double>(p.stats.n_runs), static_cast<double>(p.stats.n_switched),
                        static_cast<double>(p.stats.n_censored), p.stats.mean_gamma.value_or(nan),
                        p.stats.sem_sq_gamma.value_or(nan)});
    return rows;
}

}  // namespace cbjj
