#include "cbjj/integrator.hpp"

#include <cmath>
#include <string>

#include "cbjj/error.hpp"

namespace cbjj {

namespace {

struct ZeroDrive {
    double operator()(double) const noexcept { return 0.0; }
};

struct CwDrive {
    ContinuousWave cw;
    double operator()(double tau) const noexcept { return cw.i_mw * std::sin(cw.omega_s_norm * tau); }
};

struct PulseDrive {
    PhotonPulse pulse;
    double peak;
    double lo;
    double hi;

    explicit PulseDrive(const PhotonPulse& p)
        : pulse(p), peak(p.peak()), lo(p.tau_d - kPulseWindowWidths * p.tau_ph),
          hi(p.tau_d + kPulseWindowWidths * p.tau_ph) {}

    double operator()(double tau) const noexcept
    {
        if (tau < lo || tau > hi)
            return 0.0;
        const double x = tau - pulse.tau_d;
        const double u = x / pulse.tau_ph;
        return peak * std::exp(-0.5 * u * u) * std::cos(pulse.omega_ph_norm * x);
    }
};

// Calls fn with a concrete drive functor so the step loop is specialized per variant.
template <class Fn>
decltype(auto) with_drive(const DriveSignal& signal, Fn&& fn)
{
    if (const auto* cw = std::get_if<ContinuousWave>(&signal); cw && cw->i_mw != 0.0)
        return fn(CwDrive{*cw});
    if (const auto* p = std::get_if<PhotonPulse>(&signal); p && p->photons != 0.0)
        return fn(PulseDrive{*p});
    return fn(ZeroDrive{});
}

// Core loop. `observe(n, state)` runs after step n (state at tau = (n+1) dt)
// and returns true to stop. Returns the number of steps taken.
template <class Drive, class Observer>
std::int64_t evolve(PhaseState& s, std::int64_t first_step, std::int64_t n_steps, const Problem& pr,
                    const Drive& drive, NoiseIncrements& noise, Observer&& observe)
{
    const double dt = pr.sim.dt;
    const double beta = pr.beta;
    const double i_b = pr.i_b;
    const std::int64_t end = first_step + n_steps;
    for (std::int64_t n = first_step; n < end; ++n) {
        const double tau = static_cast<double>(n) * dt;
        s = step(s, beta, i_b, drive(tau), noise.next(), dt);
        if (!std::isfinite(s.v) || !std::isfinite(s.phi))
            check_finite(s, n);
        if (observe(n, s))
            return n - first_step + 1;
    }
    return n_steps;
}

}  // namespace

std::int64_t SimConfig::max_steps() const
{
    return std::llround(tau_max / dt);
}

void validate(const SimConfig& c)
{
    if (!(c.dt > 0.0) || !std::isfinite(c.dt))
        raise(ErrorKind::InvalidParameter, "simulation dt must be positive");
    if (!(c.tau_max > 0.0) || !std::isfinite(c.tau_max))
        raise(ErrorKind::InvalidParameter, "simulation tau_max must be positive");
    if (!(c.phase_min <= c.phase_max))
        raise(ErrorKind::InvalidParameter, "initial phase range must satisfy min <= max");
    if (c.record_stride < 1)
        raise(ErrorKind::InvalidParameter, "record_stride must be at least 1");
    if (!std::isfinite(c.phi_star))
        raise(ErrorKind::InvalidParameter, "phi_star must be finite");
}

void check_finite(const PhaseState& s, long long step_index)
{
    if (!std::isfinite(s.phi) || !std::isfinite(s.v))
        throw NonFiniteStateError(step_index, "non-finite phase state at step " + std::to_string(step_index));
}

PhaseState initial_state(const SimConfig& config, const RngStream& stream)
{
    const double u = stream.uniform(kInitialStateBlock);
    return {config.phase_min + (config.phase_max - config.phase_min) * u, 0.0};
}

TrajectoryResult run_trajectory(const Problem& problem, const RngStream& stream, bool record)
{
    return run_trajectory_from(problem, initial_state(problem.sim, stream), stream, record);
}

TrajectoryResult run_trajectory_from(const Problem& problem, PhaseState start, const RngStream& stream, bool record)
{
    const SimConfig& sim = problem.sim;
    const std::int64_t steps = sim.max_steps();
    NoiseIncrements noise(problem.noise, stream, static_cast<std::size_t>(steps));
    const double phi_star = sim.phi_star;
    const double dt = sim.dt;

    TrajectoryResult result;
    PhaseState s = start;
    if (record) {
        Trajectory path;
        const std::int64_t stride = sim.record_stride;
        const auto samples = static_cast<std::size_t>(steps / stride + 2);
        path.tau.reserve(samples);
        path.phi.reserve(samples);
        path.v.reserve(samples);
        path.tau.push_back(0.0);
        path.phi.push_back(s.phi);
        path.v.push_back(s.v);
        with_drive(problem.drive, [&](const auto& drive) {
            evolve(s, 0, steps, problem, drive, noise, [&](std::int64_t n, const PhaseState& st) {
                const bool crossed = st.phi > phi_star;
                if ((n + 1) % stride == 0 || crossed || n + 1 == steps) {
                    path.tau.push_back(static_cast<double>(n + 1) * dt);
                    path.phi.push_back(st.phi);
                    path.v.push_back(st.v);
                }
                if (crossed)
                    result.outcome.tau_switch = static_cast<double>(n + 1) * dt;
                return crossed;
            });
            return 0;
        });
        result.path = std::move(path);
    } else {
        with_drive(problem.drive, [&](const auto& drive) {
            evolve(s, 0, steps, problem, drive, noise, [&](std::int64_t n, const PhaseState& st) {
                if (st.phi > phi_star) {
                    result.outcome.tau_switch = static_cast<double>(n + 1) * dt;
                    return true;
                }
                return false;
            });
            return 0;
        });
    }
    return result;
}

double average_velocity(const Problem& problem, const RngStream& stream, std::int64_t total_steps,
                        std::int64_t window_first_step)
{
    if (!(window_first_step >= 0 && window_first_step < total_steps))
        raise(ErrorKind::InvalidParameter, "averaging window must be a non-empty tail of the run");
    NoiseIncrements noise(problem.noise, stream, static_cast<std::size_t>(total_steps));
    PhaseState s = initial_state(problem.sim, stream);
    double phi_window_start = s.phi;
    with_drive(problem.drive, [&](const auto& drive) {
        if (window_first_step > 0)
            evolve(s, 0, window_first_step, problem, drive, noise, [](std::int64_t, const PhaseState&) { return false; });
        phi_window_start = s.phi;
        evolve(s, window_first_step, total_steps - window_first_step, problem, drive, noise,
               [](std::int64_t, const PhaseState&) { return false; });
        return 0;
    });
    // Mean of v over the window equals the phase advance over the window duration.
    return (s.phi - phi_window_start) / (static_cast<double>(total_steps - window_first_step) * problem.sim.dt);
}

std::vector<double> sampled_velocity(const Problem& problem, PhaseState start, const RngStream& stream,
                                     std::int64_t transient_steps, std::int64_t stride, std::size_t n_samples)
{
    if (stride < 1)
        raise(ErrorKind::InvalidParameter, "sampling stride must be at least 1");
    const std::int64_t total = transient_steps + stride * static_cast<std::int64_t>(n_samples);
    NoiseIncrements noise(problem.noise, stream, static_cast<std::size_t>(total));
    std::vector<double> out;
    out.reserve(n_samples);
    PhaseState s = start;
    const double block = static_cast<double>(stride) * problem.sim.dt;
    with_drive(problem.drive, [&](const auto& drive) {
        evolve(s, 0, transient_steps, problem, drive, noise, [](std::int64_t, const PhaseState&) { return false; });
        double phi0 = s.phi;
        std::int64_t n = transient_steps;
        for (std::size_t k = 0; k < n_samples; ++k) {
            evolve(s, n, stride, problem, drive, noise, [](std::int64_t, const PhaseState&) { return false; });
            n += stride;
            out.push_back((s.phi - phi0) / block);
            phi0 = s.phi;
        }
        return 0;
    });
    return out;
}

std::vector<double> voltage_series(const Trajectory& traj, const DerivedScales& scales)
{
    const double unit = scales.voltage_unit();
    std::vector<double> out;
    out.reserve(traj.v.size());
    for (double v : traj.v)
        out.push_back(unit * v);
    return out;
}

}  // namespace cbjj
