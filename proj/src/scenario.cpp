#include "cbjj/scenario.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cbjj/error.hpp"

namespace cbjj {

std::string_view to_string(DriveKind kind)
{
    switch (kind) {
    case DriveKind::None: return "none";
    case DriveKind::ContinuousWave: return "cw";
    case DriveKind::PhotonPulse: return "pulse";
    }
    return "none";
}

DriveKind parse_drive_kind(std::string_view s)
{
    if (s == "none") return DriveKind::None;
    if (s == "cw") return DriveKind::ContinuousWave;
    if (s == "pulse") return DriveKind::PhotonPulse;
    raise(ErrorKind::InvalidParameter, "unknown drive type '" + std::string(s) + "'");
}

void validate(const Scenario& s)
{
    validate(s.junction);
    validate(s.op);
    validate(s.sim);
    NoiseModel noise = s.noise;
    noise.T = s.op.T;
    validate(noise);
    const DriveSpec& d = s.drive;
    if (!(d.i_mw >= 0.0))
        raise(ErrorKind::InvalidParameter, "drive i_mw must be non-negative");
    if (d.f_GHz && !(*d.f_GHz > 0.0))
        raise(ErrorKind::InvalidParameter, "drive frequency must be positive");
    if (!(d.photons >= 0.0))
        raise(ErrorKind::InvalidParameter, "drive photon count must be non-negative");
    if (d.kind == DriveKind::PhotonPulse && !(d.t_ph_ns > 0.0))
        raise(ErrorKind::InvalidParameter, "pulse width must be positive");
    if (!(d.t_d_ns >= 0.0))
        raise(ErrorKind::InvalidParameter, "pulse arrival time must be non-negative");
}

double drive_omega(const DriveSpec& spec, const DerivedScales& scales, double i_b)
{
    if (spec.f_GHz)
        return 2.0 * std::numbers::pi * *spec.f_GHz * 1e9;
    return scales.omega_J_star(i_b);
}

DriveSignal resolve_drive(const DriveSpec& spec, const JunctionParams& params, const DerivedScales& scales, double i_b)
{
    switch (spec.kind) {
    case DriveKind::None:
        return NoDrive{};
    case DriveKind::ContinuousWave:
        return ContinuousWave{spec.i_mw, drive_omega(spec, scales, i_b) / scales.omega_J};
    case DriveKind::PhotonPulse:
        return make_photon_pulse(spec.photons, drive_omega(spec, scales, i_b), spec.t_ph_ns * 1e-9,
                                 spec.t_d_ns * 1e-9, params, scales);
    }
    return NoDrive{};
}

Problem make_problem(const Scenario& scenario)
{
    validate(scenario);
    const DerivedScales scales = derive_scales(scenario.junction);
    NoiseModel noise = scenario.noise;
    noise.T = scenario.op.T;

    Problem p;
    p.beta = scales.beta;
    p.i_b = scenario.op.i_b;
    p.drive = resolve_drive(scenario.drive, scenario.junction, scales, scenario.op.i_b);
    p.noise = resolve_noise(noise, scenario.op.i_b, scenario.sim.dt, scenario.junction, scales);
    p.sim = scenario.sim;
    return p;
}

}  // namespace cbjj
