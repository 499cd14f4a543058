#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "cbjj/physics.hpp"
#include "cbjj/rng.hpp"

namespace cbjj {

enum class NoiseInterpretation {
    WhiteFromPlanck,  // white kicks at the Planck level sampled at omega_J*/2pi
    Colored,          // Gaussian sequence synthesized with the full Planck spectrum
};

/// How a white increment enters the Euler update.
enum class KickMode {
    Velocity,  // v += c sqrt(S0 dt) N(0,1)
    Force,     // v += c sqrt(S0 dt) N(0,1) * dt
};

struct NoiseModel {
    double T = 0.0;  // K
    NoiseInterpretation interpretation = NoiseInterpretation::WhiteFromPlanck;
    KickMode kick = KickMode::Velocity;
    double calibration_factor = 1.0;
    GaussianMethod gaussian = GaussianMethod::BoxMuller;

    bool operator==(const NoiseModel&) const = default;
};

void validate(const NoiseModel& model);

std::string_view to_string(NoiseInterpretation v);
std::string_view to_string(KickMode v);
std::string_view to_string(GaussianMethod v);
NoiseInterpretation parse_interpretation(std::string_view s);
KickMode parse_kick_mode(std::string_view s);
GaussianMethod parse_gaussian_method(std::string_view s);

/// Planck noise spectral density 4 h|f| omega_J / (R I0^2 (exp(h|f|/k_B T) - 1)),
/// f in Hz. The f -> 0 limit is 4 k_B T omega_J / (R I0^2). Zero for T = 0.
double planck_spectral_density(double f, double T, const JunctionParams& params, const DerivedScales& scales);

/// Two-sided integral of planck_spectral_density over f, by adaptive quadrature.
double integrated_noise_variance(const NoiseModel& model, const JunctionParams& params, const DerivedScales& scales);

/// Closed form of the same integral: 2 (4 omega_J / (R I0^2)) pi^2 (k_B T)^2 / (6 h).
double integrated_noise_variance_closed_form(double T, const JunctionParams& params, const DerivedScales& scales);

/// Everything the integrator needs to draw increments, already normalized.
struct ResolvedNoise {
    NoiseModel model;
    double white_level = 0.0;  // S0: planck_spectral_density at omega_J*(i_b)/2pi
    double dt = 0.0;
    // Colored synthesis needs the spectrum itself.
    JunctionParams params;
    DerivedScales scales;

    bool silent() const { return model.T == 0.0 || model.calibration_factor == 0.0; }

    /// Standard deviation of one white kick.
    double kick_sigma() const;
};

ResolvedNoise resolve_noise(const NoiseModel& model, double i_b, double dt,
                            const JunctionParams& params, const DerivedScales& scales);

/// Two-sided spectral density of the colored sequence at dimensionless
/// frequency nu (cycles per unit tau): planck_spectral_density(nu omega_J).
double colored_target_density(const ResolvedNoise& noise, double nu);

/// Gaussian sequence of length n (rounded up to a power of two internally)
/// with two-sided PSD colored_target_density, sampled every noise.dt.
std::vector<double> synthesize_colored_sequence(const ResolvedNoise& noise, const RngStream& stream, std::size_t n);

/// Per-trajectory source of velocity kicks.
class NoiseIncrements {
public:
    NoiseIncrements(const ResolvedNoise& noise, const RngStream& stream, std::size_t max_steps);

    /// Velocity kick for the next Euler step.
    double next()
    {
        if (silent_)
            return 0.0;
        if (!colored_.empty())
            return colored_scale_ * colored_[index_++];
        if (pos_ == kBatch)
            refill();
        return buffer_[pos_++];
    }

    bool silent() const { return silent_; }

private:
    bool silent_;
    double sigma_ = 0.0;
    static constexpr std::size_t kBatch = 256;

    void refill();

    GaussianStream gauss_;
    std::array<double, kBatch> buffer_{};
    std::size_t pos_ = kBatch;
    std::vector<double> colored_;
    double colored_scale_ = 0.0;
    std::size_t index_ = 0;
};

/// Single increment (first draw of the stream); convenience for tests and
/// the noise_increment contract.
double noise_increment(const ResolvedNoise& noise, const RngStream& stream);

}  // namespace cbjj
