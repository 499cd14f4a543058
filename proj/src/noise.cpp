#include "cbjj/noise.hpp"

#include <cmath>
#include <complex>
#include <fftw3.h>
#include <gsl/gsl_integration.h>
#include <mutex>
#include <numbers>
#include <string>

#include "cbjj/error.hpp"
#include "gsl_support.hpp"

namespace cbjj {

namespace {

std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

}  // namespace

void validate(const NoiseModel& model)
{
    if (!(model.T >= 0.0) || !std::isfinite(model.T))
        raise(ErrorKind::InvalidParameter, "noise temperature must be non-negative");
    if (!(model.calibration_factor > 0.0) || !std::isfinite(model.calibration_factor))
        raise(ErrorKind::InvalidParameter, "noise calibration_factor must be positive");
}

std::string_view to_string(NoiseInterpretation v)
{
    return v == NoiseInterpretation::WhiteFromPlanck ? "white" : "colored";
}

std::string_view to_string(KickMode v)
{
    return v == KickMode::Velocity ? "velocity" : "force";
}

std::string_view to_string(GaussianMethod v)
{
    return v == GaussianMethod::BoxMuller ? "box-muller" : "polar";
}

NoiseInterpretation parse_interpretation(std::string_view s)
{
    if (s == "white") return NoiseInterpretation::WhiteFromPlanck;
    if (s == "colored") return NoiseInterpretation::Colored;
    raise(ErrorKind::InvalidParameter, "unknown noise interpretation '" + std::string(s) + "'");
}

KickMode parse_kick_mode(std::string_view s)
{
    if (s == "velocity") return KickMode::Velocity;
    if (s == "force") return KickMode::Force;
    raise(ErrorKind::InvalidParameter, "unknown kick mode '" + std::string(s) + "'");
}

GaussianMethod parse_gaussian_method(std::string_view s)
{
    if (s == "box-muller") return GaussianMethod::BoxMuller;
    if (s == "polar") return GaussianMethod::Polar;
    raise(ErrorKind::InvalidParameter, "unknown gaussian method '" + std::string(s) + "'");
}

double planck_spectral_density(double f, double T, const JunctionParams& params, const DerivedScales& scales)
{
    const auto& k = kConstants;
    const double prefactor = 4.0 * scales.omega_J / (params.R * params.I0 * params.I0);
    if (T <= 0.0)
        return 0.0;
    const double af = std::abs(f);
    const double kT = k.k_B * T;
    if (af == 0.0)
        return prefactor * kT;
    const double x = k.h * af / kT;
    return prefactor * k.h * af / std::expm1(x);
}

double integrated_noise_variance_closed_form(double T, const JunctionParams& params, const DerivedScales& scales)
{
    const auto& k = kConstants;
    const double kT = k.k_B * T;
    const double prefactor = 4.0 * scales.omega_J / (params.R * params.I0 * params.I0);
    return 2.0 * prefactor * std::numbers::pi * std::numbers::pi * kT * kT / (6.0 * k.h);
}

double integrated_noise_variance(const NoiseModel& model, const JunctionParams& params, const DerivedScales& scales)
{
    if (model.T <= 0.0)
        return 0.0;
    detail::quiet_gsl();

    // Substituting x = h f / k_B T turns each side into (k_B T)^2 / h * int x / (e^x - 1) dx.
    auto integrand = [](double x, void*) { return x == 0.0 ? 1.0 : x / std::expm1(x); };
    gsl_function fn;
    fn.function = integrand;
    fn.params = nullptr;

    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(1000);
    double result = 0.0;
    double abserr = 0.0;
    const int status = gsl_integration_qagiu(&fn, 0.0, 0.0, 1e-10, 1000, ws, &result, &abserr);
    gsl_integration_workspace_free(ws);
    if (status != GSL_SUCCESS)
        raise(ErrorKind::Quadrature, std::string("Planck integral did not converge: ") + gsl_strerror(status));

    const auto& k = kConstants;
    const double kT = k.k_B * model.T;
    const double prefactor = 4.0 * scales.omega_J / (params.R * params.I0 * params.I0);
    return 2.0 * prefactor * kT * kT / k.h * result;
}

double ResolvedNoise::kick_sigma() const
{
    if (silent())
        return 0.0;
    const double base = model.calibration_factor * std::sqrt(white_level * dt);
    return model.kick == KickMode::Velocity ? base : base * dt;
}

ResolvedNoise resolve_noise(const NoiseModel& model, double i_b, double dt,
                            const JunctionParams& params, const DerivedScales& scales)
{
    validate(model);
    if (!(dt > 0.0))
        raise(ErrorKind::InvalidParameter, "time step must be positive");
    ResolvedNoise r;
    r.model = model;
    r.dt = dt;
    r.params = params;
    r.scales = scales;
    const double f_star = scales.omega_J_star(i_b) / (2.0 * std::numbers::pi);
    r.white_level = planck_spectral_density(f_star, model.T, params, scales);
    return r;
}

double colored_target_density(const ResolvedNoise& noise, double nu)
{
    return planck_spectral_density(nu * noise.scales.omega_J, noise.model.T, noise.params, noise.scales);
}

std::vector<double> synthesize_colored_sequence(const ResolvedNoise& noise, const RngStream& stream, std::size_t n)
{
    std::size_t len = 2;
    while (len < n)
        len <<= 1;
    const double dt = noise.dt;
    const std::size_t half = len / 2;

    std::vector<std::complex<double>> spectrum(half + 1);
    GaussianStream gauss(stream, kColoredNoiseFirstBlock, noise.model.gaussian);
    // E|c_k|^2 = S(nu_k) len / dt gives sum S dnu for the sample variance.
    for (std::size_t k = 0; k <= half; ++k) {
        const double nu = static_cast<double>(k) / (static_cast<double>(len) * dt);
        const double power = colored_target_density(noise, nu) * static_cast<double>(len) / dt;
        if (k == 0 || k == half) {
            spectrum[k] = {std::sqrt(power) * gauss.next(), 0.0};
        } else {
            const double a = std::sqrt(0.5 * power);
            const double re = gauss.next();
            const double im = gauss.next();
            spectrum[k] = {a * re, a * im};
        }
    }

    std::vector<double> out(len);
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(len), reinterpret_cast<fftw_complex*>(spectrum.data()),
                                    out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    const double inv = 1.0 / static_cast<double>(len);
    for (double& x : out)
        x *= inv;
    out.resize(n);
    return out;
}

NoiseIncrements::NoiseIncrements(const ResolvedNoise& noise, const RngStream& stream, std::size_t max_steps)
    : silent_(noise.silent()), gauss_(stream, kWhiteNoiseFirstBlock, noise.model.gaussian)
{
    if (silent_)
        return;
    if (noise.model.interpretation == NoiseInterpretation::Colored) {
        colored_ = synthesize_colored_sequence(noise, stream, std::max<std::size_t>(max_steps, 2));
        colored_scale_ = noise.model.calibration_factor * noise.dt;
    } else {
        sigma_ = noise.kick_sigma();
    }
}

void NoiseIncrements::refill()
{
    if (gauss_.method() == GaussianMethod::BoxMuller) {
        gauss_.fill_box_muller(buffer_.data(), kBatch);
        for (double& x : buffer_)
            x *= sigma_;
    } else {
        for (double& x : buffer_)
            x = sigma_ * gauss_.next();
    }
    pos_ = 0;
}

double noise_increment(const ResolvedNoise& noise, const RngStream& stream)
{
    NoiseIncrements inc(noise, stream, 1);
    return inc.next();
}

}  // namespace cbjj
