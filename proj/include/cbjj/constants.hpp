#pragma once

#include <numbers>

namespace cbjj {

/// CODATA values rounded to six significant figures (SI units).
struct PhysicalConstants {
    double hbar = 1.05457e-34;   // J s
    double h = 2.0 * std::numbers::pi * 1.05457e-34;  // J s, tied to hbar
    double e_charge = 1.60218e-19;  // C
    double k_B = 1.38065e-23;    // J/K

    double two_e() const { return 2.0 * e_charge; }
};

inline constexpr PhysicalConstants kConstants{};

}  // namespace cbjj
