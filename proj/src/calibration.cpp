#include <cmath>

#include "cbjj/error.hpp"
#include "cbjj/experiments.hpp"

namespace cbjj {

std::optional<double> switching_knee(std::span<const SweepPoint> points)
{
    for (std::size_t k = 0; k < points.size(); ++k) {
        const double f = points[k].stats.switched_fraction();
        if (f < 0.5)
            continue;
        if (k == 0)
            return std::nullopt;  // already above one half at the first grid point
        const double f0 = points[k - 1].stats.switched_fraction();
        const double x0 = points[k - 1].value;
        const double x1 = points[k].value;
        return x0 + (0.5 - f0) / (f - f0) * (x1 - x0);
    }
    return std::nullopt;
}

std::optional<double> knee_for_factor(const CalibrationOptions& options, double factor)
{
    if (!(factor > 0.0) || !std::isfinite(factor))
        raise(ErrorKind::InvalidParameter, "calibration factor must be positive");
    Scenario s = options.scenario;
    s.noise.calibration_factor = factor;
    const auto points = sweep({s, options.n_runs, options.seed}, SweepAxis::Bias, options.bias_grid,
                              SeedPolicy::Matched, options.run);
    return switching_knee(points);
}

namespace {

/// Signed knee error; a curve that never reaches one half counts as a knee
/// beyond the top of the grid, one that starts above counts as below it.
double knee_error(const CalibrationOptions& o, const std::optional<double>& knee, double factor,
                  std::vector<CalibrationStep>& history)
{
    history.push_back({factor, knee});
    if (knee)
        return *knee - o.target;
    Scenario s = o.scenario;
    s.noise.calibration_factor = factor;
    s.op.i_b = o.bias_grid.front();
    const SwitchStats first = run_ensemble({s, o.n_runs, o.seed}, o.run);
    return first.switched_fraction() >= 0.5 ? -HUGE_VAL : HUGE_VAL;
}

}  // namespace

CalibrationResult calibrate_noise(const CalibrationOptions& o)
{
    const double initial = o.scenario.noise.calibration_factor;
    if (!(initial > 0.0))
        raise(ErrorKind::InvalidParameter, "calibration needs a positive starting factor");
    if (!(o.factor_min > 0.0 && o.factor_min < o.factor_max))
        raise(ErrorKind::InvalidParameter, "calibration bracket must satisfy 0 < min < max");
    if (o.bias_grid.size() < 2)
        raise(ErrorKind::InvalidParameter, "calibration needs at least two bias points");

    CalibrationResult result;
    auto evaluate = [&](double factor) { return knee_error(o, knee_for_factor(o, factor), factor, result.history); };

    const double g0 = evaluate(initial);
    if (std::abs(g0) <= o.tolerance) {
        result.factor = initial;
        result.knee = result.history.back().knee;
        result.reused_initial = true;
        return result;
    }

    // The knee moves to lower bias as the noise grows: search upwards if it is too high.
    double lo = std::log(g0 > 0.0 ? initial : o.factor_min);
    double hi = std::log(g0 > 0.0 ? o.factor_max : initial);
    const double g_end = evaluate(std::exp(g0 > 0.0 ? hi : lo));
    if (std::abs(g_end) <= o.tolerance) {
        result.factor = std::exp(g0 > 0.0 ? hi : lo);
        result.knee = result.history.back().knee;
        return result;
    }
    if ((g0 > 0.0) == (g_end > 0.0))
        raise(ErrorKind::Calibration, "no calibration factor in [" + std::to_string(o.factor_min) + ", " +
                                          std::to_string(o.factor_max) + "] moves the switching knee to " +
                                          std::to_string(o.target));

    for (int it = 0; it < o.max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g = evaluate(std::exp(mid));
        if (std::abs(g) <= o.tolerance) {
            result.factor = std::exp(mid);
            result.knee = result.history.back().knee;
            return result;
        }
        if (g > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-4)
            break;
    }
    result.factor = std::exp(0.5 * (lo + hi));
    result.knee = knee_for_factor(o, result.factor);
    result.history.push_back({result.factor, result.knee});
    return result;
}

}  // namespace cbjj
