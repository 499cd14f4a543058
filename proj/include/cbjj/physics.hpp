#pragma once

#include <string_view>

#include "cbjj/constants.hpp"

namespace cbjj {

/// Physical junction constants in SI units.
struct JunctionParams {
    double I0 = 0.0;  // critical current, A
    double R = 0.0;   // shunt resistance, Ohm
    double C = 0.0;   // capacitance, F

    bool operator==(const JunctionParams&) const = default;
};

/// Normalization scales that follow from a junction.
struct DerivedScales {
    double omega_J = 0.0;  // plasma frequency, rad/s
    double beta = 0.0;     // damping 1/(R C omega_J)
    double E_J = 0.0;      // Josephson energy hbar I0 / 2e, J

    /// Bias-modulated plasma frequency (1 - i_b^2)^(1/4) omega_J, rad/s.
    double omega_J_star(double i_b) const;

    /// hbar omega_J / 2e: the voltage of a unit normalized phase velocity.
    double voltage_unit() const;
};

struct OperatingPoint {
    double i_b = 0.0;  // I_b / I0
    double T = 0.0;    // K

    bool operator==(const OperatingPoint&) const = default;
};

void validate(const JunctionParams& params);
void validate(const OperatingPoint& op);

DerivedScales derive_scales(const JunctionParams& params);

/// Washboard potential U / E_J = 1 - cos(phi) - i_b phi.
double washboard_potential(double phi, double i_b);

/// dU/dphi in units of E_J.
double washboard_slope(double phi, double i_b);

/// Barrier height Delta U / E_J = 2 [sqrt(1 - i_b^2) - i_b arccos(i_b)], for 0 <= i_b <= 1.
double barrier_height(double i_b);

/// Phase of the well bottom, arcsin(i_b).
double well_minimum(double i_b);

/// Phase of the barrier top, pi - arcsin(i_b).
double barrier_maximum(double i_b);

enum class Quantity { Current, Time, Frequency, Voltage };

Quantity parse_quantity(std::string_view name);

/// SI value to normalized value. Current in A, time in s, angular frequency in
/// rad/s, voltage in V (normalized voltage is the phase velocity dphi/dtau).
double normalize(double value, Quantity kind, const JunctionParams& params, const DerivedScales& scales);
double denormalize(double value, Quantity kind, const JunctionParams& params, const DerivedScales& scales);

}  // namespace cbjj
