#pragma once

#include <variant>

#include "cbjj/physics.hpp"

namespace cbjj {

struct NoDrive {
    bool operator==(const NoDrive&) const = default;
};

/// i_mw sin(omega_s_norm tau).
struct ContinuousWave {
    double i_mw = 0.0;          // I_MW / I0
    double omega_s_norm = 0.0;  // omega_s / omega_J

    bool operator==(const ContinuousWave&) const = default;
};

/// N-photon Gaussian current pulse in normalized units. The SI prefactor
/// sqrt(hbar omega_ph / (R t_ph)) / I0 is resolved once at construction and
/// stored as `unit_amplitude` (current per sqrt(photon)).
struct PhotonPulse {
    double photons = 0.0;
    double omega_ph_norm = 0.0;  // omega_ph / omega_J
    double tau_ph = 0.0;         // t_ph omega_J
    double tau_d = 0.0;          // t_d omega_J
    double unit_amplitude = 0.0;

    double peak() const;
    bool operator==(const PhotonPulse&) const = default;
};

using DriveSignal = std::variant<NoDrive, ContinuousWave, PhotonPulse>;

/// Half-width of the pulse support in units of tau_ph; the pulse is exactly zero outside.
inline constexpr double kPulseWindowWidths = 8.0;

/// Builds a pulse from SI inputs: omega_ph in rad/s, t_ph and t_d in s.
PhotonPulse make_photon_pulse(double photons, double omega_ph, double t_ph, double t_d,
                              const JunctionParams& params, const DerivedScales& scales);

/// Builds a continuous wave from I_MW in A and omega_s in rad/s.
ContinuousWave make_continuous_wave(double I_mw, double omega_s,
                                    const JunctionParams& params, const DerivedScales& scales);

void validate(const DriveSignal& signal);

/// Normalized drive current at dimensionless time tau.
double drive_current(const DriveSignal& signal, double tau);

/// Upper bound on |drive_current| over all tau.
double drive_amplitude(const DriveSignal& signal);

/// Same pulse with a different photon count.
PhotonPulse with_photons(PhotonPulse pulse, double photons);

/// Dissipated energy int I^2 R dt over t_d +- 8 t_ph, in J.
double pulse_energy(const PhotonPulse& pulse, const JunctionParams& params, const DerivedScales& scales);

}  // namespace cbjj
