#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbjj/integrator.hpp"
#include "cbjj/parallel.hpp"
#include "cbjj/scenario.hpp"

namespace cbjj {

struct EnsembleConfig {
    Scenario scenario;
    std::int64_t n_runs = 1000;
    std::uint64_t master_seed = 0;
};

/// Switching statistics of one ensemble. Means and the squared standard error
/// use switched runs only; censored runs are counted, never averaged.
struct SwitchStats {
    std::vector<double> times;  // tau_switch of switched runs, in stream order
    std::int64_t n_runs = 0;
    std::int64_t n_switched = 0;
    std::int64_t n_censored = 0;
    std::int64_t n_failed = 0;
    std::optional<double> mean_gamma;    // (1/N) sum tau_k
    std::optional<double> sem_sq_gamma;  // (1/(N(N-1))) sum (tau_k - mean)^2

    double censored_fraction() const;
    double switched_fraction() const;
};

/// Reduces outcomes (indexed by stream id) to statistics. Pure and order-fixed.
SwitchStats summarize(std::span<const SwitchOutcome> outcomes, std::int64_t n_failed = 0);

/// Mean and (1/(N(N-1))) sum of squared deviations for a sample.
void mean_and_sem_sq(std::span<const double> xs, std::optional<double>& mean, std::optional<double>& sem_sq);

/// Runs n_runs trajectories with stream_id = 0..n_runs-1. Fails if more than
/// 1% of the trajectories hit a non-finite state.
SwitchStats run_ensemble(const EnsembleConfig& config, const RunOptions& options = {});

/// Outcomes only (stream order), for callers that need per-run data.
std::vector<SwitchOutcome> run_outcomes(const Problem& problem, std::int64_t n_runs, std::uint64_t master_seed,
                                        const RunOptions& options, std::int64_t* n_failed = nullptr);

enum class SweepAxis { Bias, Temperature, PhotonNumber, DriveAmplitude };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view s);

enum class SeedPolicy {
    PerPoint,  // point k uses master_seed + k
    Matched,   // every point reuses master_seed (common random numbers)
};

struct SweepPoint {
    double value = 0.0;
    SwitchStats stats;
};

/// Applies a grid value to a copy of the scenario.
Scenario with_axis_value(Scenario scenario, SweepAxis axis, double value);

std::vector<SweepPoint> sweep(const EnsembleConfig& config, SweepAxis axis, std::span<const double> grid,
                              SeedPolicy seeds = SeedPolicy::PerPoint, const RunOptions& options = {});

/// Column names of the sweep CSV, in order.
std::vector<std::string> sweep_columns();

/// One row per point: grid_value, n_runs, n_switched, n_censored, mean_gamma, sem_sq_gamma.
std::vector<std::vector<double>> sweep_rows(std::span<const SweepPoint> points);

}  // namespace cbjj
