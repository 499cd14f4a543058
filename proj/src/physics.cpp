#include "cbjj/physics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cbjj/error.hpp"

namespace cbjj {

double DerivedScales::omega_J_star(double i_b) const
{
    if (!(i_b >= 0.0 && i_b <= 1.0))
        raise(ErrorKind::Domain, "omega_J_star: i_b must lie in [0, 1], got " + std::to_string(i_b));
    return std::pow(1.0 - i_b * i_b, 0.25) * omega_J;
}

double DerivedScales::voltage_unit() const
{
    return kConstants.hbar * omega_J / kConstants.two_e();
}

void validate(const JunctionParams& p)
{
    if (!(p.I0 > 0.0) || !std::isfinite(p.I0))
        raise(ErrorKind::InvalidParameter, "junction I0 must be positive");
    if (!(p.R > 0.0) || !std::isfinite(p.R))
        raise(ErrorKind::InvalidParameter, "junction R must be positive");
    if (!(p.C > 0.0) || !std::isfinite(p.C))
        raise(ErrorKind::InvalidParameter, "junction C must be positive");
}

void validate(const OperatingPoint& op)
{
    if (!(op.i_b >= 0.0 && op.i_b < 1.0))
        raise(ErrorKind::InvalidParameter, "operating i_b must lie in [0, 1)");
    if (!(op.T >= 0.0) || !std::isfinite(op.T))
        raise(ErrorKind::InvalidParameter, "operating T must be non-negative");
}

DerivedScales derive_scales(const JunctionParams& params)
{
    validate(params);
    const auto& k = kConstants;
    DerivedScales s;
    s.omega_J = std::sqrt(k.two_e() * params.I0 / (k.hbar * params.C));
    s.beta = 1.0 / (params.R * params.C * s.omega_J);
    s.E_J = k.hbar * params.I0 / k.two_e();
    return s;
}

double washboard_potential(double phi, double i_b)
{
    return 1.0 - std::cos(phi) - i_b * phi;
}

double washboard_slope(double phi, double i_b)
{
    return std::sin(phi) - i_b;
}

double barrier_height(double i_b)
{
    if (!(i_b >= 0.0 && i_b <= 1.0))
        raise(ErrorKind::Domain, "barrier_height: i_b must lie in [0, 1], got " + std::to_string(i_b));
    return 2.0 * (std::sqrt(1.0 - i_b * i_b) - i_b * std::acos(i_b));
}

double well_minimum(double i_b)
{
    return std::asin(i_b);
}

double barrier_maximum(double i_b)
{
    return std::numbers::pi - std::asin(i_b);
}

Quantity parse_quantity(std::string_view name)
{
    if (name == "current") return Quantity::Current;
    if (name == "time") return Quantity::Time;
    if (name == "frequency") return Quantity::Frequency;
    if (name == "voltage") return Quantity::Voltage;
    raise(ErrorKind::InvalidParameter, "unknown quantity kind '" + std::string(name) + "'");
}

double normalize(double value, Quantity kind, const JunctionParams& params, const DerivedScales& scales)
{
    switch (kind) {
    case Quantity::Current: return value / params.I0;
    case Quantity::Time: return value * scales.omega_J;
    case Quantity::Frequency: return value / scales.omega_J;
    case Quantity::Voltage: return value / scales.voltage_unit();
    }
    raise(ErrorKind::InvalidParameter, "unknown quantity kind");
}

double denormalize(double value, Quantity kind, const JunctionParams& params, const DerivedScales& scales)
{
    switch (kind) {
    case Quantity::Current: return value * params.I0;
    case Quantity::Time: return value / scales.omega_J;
    case Quantity::Frequency: return value * scales.omega_J;
    case Quantity::Voltage: return value * scales.voltage_unit();
    }
    raise(ErrorKind::InvalidParameter, "unknown quantity kind");
}

}  // namespace cbjj
