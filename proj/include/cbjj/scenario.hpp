#pragma once

#include <optional>
#include <string_view>

#include "cbjj/drive.hpp"
#include "cbjj/integrator.hpp"
#include "cbjj/noise.hpp"
#include "cbjj/physics.hpp"

namespace cbjj {

enum class DriveKind { None, ContinuousWave, PhotonPulse };

std::string_view to_string(DriveKind kind);
DriveKind parse_drive_kind(std::string_view s);

/// Drive description in the units a user writes down. Frequencies left empty
/// mean "resonant": omega_J*(i_b) of the current operating point.
struct DriveSpec {
    DriveKind kind = DriveKind::None;
    double i_mw = 0.0;             // I_MW / I0
    std::optional<double> f_GHz;   // omega_s / 2pi or omega_ph / 2pi
    double photons = 0.0;
    double t_ph_ns = 0.005;
    double t_d_ns = 0.02;

    bool operator==(const DriveSpec&) const = default;
};

/// A complete simulation setup in physical units.
struct Scenario {
    JunctionParams junction;
    OperatingPoint op;
    DriveSpec drive;
    NoiseModel noise;  // noise.T is ignored; op.T is authoritative
    SimConfig sim;

    bool operator==(const Scenario&) const = default;
};

void validate(const Scenario& scenario);

/// Drive angular frequency in rad/s (explicit or resonant).
double drive_omega(const DriveSpec& spec, const DerivedScales& scales, double i_b);

DriveSignal resolve_drive(const DriveSpec& spec, const JunctionParams& params, const DerivedScales& scales,
                          double i_b);

/// Normalizes a scenario once; downstream code sees only dimensionless values.
Problem make_problem(const Scenario& scenario);

}  // namespace cbjj
