#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "cbjj/drive.hpp"
#include "cbjj/noise.hpp"
#include "cbjj/physics.hpp"
#include "cbjj/rng.hpp"

namespace cbjj {

struct SimConfig {
    double dt = 1e-4;
    double tau_max = 200.0;
    double phi_star = std::numbers::pi;
    double phase_min = -0.1;
    double phase_max = 0.1;
    std::int64_t record_stride = 1000;

    std::int64_t max_steps() const;
    bool operator==(const SimConfig&) const = default;
};

void validate(const SimConfig& config);

struct PhaseState {
    double phi = 0.0;
    double v = 0.0;  // dphi/dtau
};

struct Trajectory {
    std::vector<double> tau;
    std::vector<double> phi;
    std::vector<double> v;

    std::size_t size() const { return tau.size(); }
};

struct SwitchOutcome {
    std::optional<double> tau_switch;  // set iff the phase crossed phi_star

    bool switched() const { return tau_switch.has_value(); }
    bool censored() const { return !tau_switch.has_value(); }
    bool operator==(const SwitchOutcome&) const = default;
};

/// A fully normalized simulation problem: what the integrator consumes.
struct Problem {
    double beta = 0.0;
    double i_b = 0.0;
    DriveSignal drive;
    ResolvedNoise noise;
    SimConfig sim;
};

/// One semi-implicit Euler step of phi'' + beta phi' + sin(phi) = i_b + i_drive (+ noise):
/// v <- v + (-beta v - sin phi + i_b + i_drive) dt + kick; phi <- phi + v dt.
inline PhaseState step(PhaseState s, double beta, double i_b, double i_drive, double kick, double dt) noexcept
{
    const double v = s.v + (-beta * s.v - std::sin(s.phi) + i_b + i_drive) * dt + kick;
    return {s.phi + v * dt, v};
}

/// Throws NonFiniteStateError if either component is NaN/Inf.
void check_finite(const PhaseState& s, long long step_index);

/// phi(0) uniform in [phase_min, phase_max] from the stream's reserved block, v(0) = 0.
PhaseState initial_state(const SimConfig& config, const RngStream& stream);

struct TrajectoryResult {
    SwitchOutcome outcome;
    std::optional<Trajectory> path;
};

/// Integrates from initial_state until phi > phi_star or tau_max.
TrajectoryResult run_trajectory(const Problem& problem, const RngStream& stream, bool record = false);

/// Same, from an explicit initial state.
TrajectoryResult run_trajectory_from(const Problem& problem, PhaseState start, const RngStream& stream,
                                     bool record = false);

/// Integrates for `total_steps` without stopping at the crossing and returns
/// the mean phase velocity over steps [window_first_step, total_steps).
double average_velocity(const Problem& problem, const RngStream& stream, std::int64_t total_steps,
                        std::int64_t window_first_step);

/// Integrates from `start`, discards `transient_steps`, then returns
/// `n_samples` block means of the phase velocity, each over `stride` steps
/// (block mean = phase advance / block duration).
std::vector<double> sampled_velocity(const Problem& problem, PhaseState start, const RngStream& stream,
                                     std::int64_t transient_steps, std::int64_t stride, std::size_t n_samples);

/// V_k = (hbar omega_J / 2e) v_k, in volts.
std::vector<double> voltage_series(const Trajectory& traj, const DerivedScales& scales);

}  // namespace cbjj
