#include "cbjj/drive.hpp"

#include <cmath>
#include <gsl/gsl_integration.h>

#include "cbjj/error.hpp"
#include "gsl_support.hpp"

namespace cbjj {

namespace {

double pulse_shape(const PhotonPulse& p, double tau)
{
    const double x = tau - p.tau_d;
    if (std::abs(x) > kPulseWindowWidths * p.tau_ph)
        return 0.0;
    const double u = x / p.tau_ph;
    return std::exp(-0.5 * u * u) * std::cos(p.omega_ph_norm * x);
}

}  // namespace

double PhotonPulse::peak() const
{
    return std::sqrt(photons) * unit_amplitude;
}

PhotonPulse make_photon_pulse(double photons, double omega_ph, double t_ph, double t_d,
                              const JunctionParams& params, const DerivedScales& scales)
{
    if (!(photons >= 0.0))
        raise(ErrorKind::InvalidParameter, "pulse photon count must be non-negative");
    if (!(t_ph > 0.0))
        raise(ErrorKind::InvalidParameter, "pulse width must be positive");
    if (!(omega_ph >= 0.0) || !(t_d >= 0.0))
        raise(ErrorKind::InvalidParameter, "pulse frequency and arrival time must be non-negative");
    PhotonPulse p;
    p.photons = photons;
    p.omega_ph_norm = omega_ph / scales.omega_J;
    p.tau_ph = t_ph * scales.omega_J;
    p.tau_d = t_d * scales.omega_J;
    p.unit_amplitude = std::sqrt(kConstants.hbar * omega_ph / (params.R * t_ph)) / params.I0;
    return p;
}

ContinuousWave make_continuous_wave(double I_mw, double omega_s,
                                    const JunctionParams& params, const DerivedScales& scales)
{
    return ContinuousWave{I_mw / params.I0, omega_s / scales.omega_J};
}

void validate(const DriveSignal& signal)
{
    if (const auto* cw = std::get_if<ContinuousWave>(&signal)) {
        if (!(cw->i_mw >= 0.0) || !(cw->omega_s_norm >= 0.0))
            raise(ErrorKind::InvalidParameter, "continuous wave amplitude and frequency must be non-negative");
    } else if (const auto* p = std::get_if<PhotonPulse>(&signal)) {
        if (!(p->photons >= 0.0) || !(p->unit_amplitude >= 0.0) || !(p->omega_ph_norm >= 0.0))
            raise(ErrorKind::InvalidParameter, "pulse amplitude and frequency must be non-negative");
        if (!(p->tau_ph > 0.0))
            raise(ErrorKind::InvalidParameter, "pulse width must be positive");
    }
}

double drive_current(const DriveSignal& signal, double tau)
{
    struct Visitor {
        double tau;
        double operator()(const NoDrive&) const { return 0.0; }
        double operator()(const ContinuousWave& cw) const { return cw.i_mw * std::sin(cw.omega_s_norm * tau); }
        double operator()(const PhotonPulse& p) const
        {
            if (p.photons == 0.0)
                return 0.0;
            return p.peak() * pulse_shape(p, tau);
        }
    };
    return std::visit(Visitor{tau}, signal);
}

double drive_amplitude(const DriveSignal& signal)
{
    struct Visitor {
        double operator()(const NoDrive&) const { return 0.0; }
        double operator()(const ContinuousWave& cw) const { return cw.i_mw; }
        double operator()(const PhotonPulse& p) const { return p.peak(); }
    };
    return std::visit(Visitor{}, signal);
}

PhotonPulse with_photons(PhotonPulse pulse, double photons)
{
    if (!(photons >= 0.0))
        raise(ErrorKind::InvalidParameter, "pulse photon count must be non-negative");
    pulse.photons = photons;
    return pulse;
}

double pulse_energy(const PhotonPulse& pulse, const JunctionParams& params, const DerivedScales& scales)
{
    if (pulse.photons == 0.0)
        return 0.0;

    // Integrate the normalized shape squared in tau, then restore SI units:
    // int I^2 R dt = (I0 peak)^2 R / omega_J * int shape^2 dtau.
    auto integrand = [](double tau, void* ctx) {
        const auto* p = static_cast<const PhotonPulse*>(ctx);
        const double s = pulse_shape(*p, tau);
        return s * s;
    };
    gsl_function fn;
    fn.function = integrand;
    fn.params = const_cast<PhotonPulse*>(&pulse);

    const double half = kPulseWindowWidths * pulse.tau_ph;
    gsl_integration_workspace* ws = gsl_integration_workspace_alloc(2000);
    double result = 0.0;
    double abserr = 0.0;
    detail::quiet_gsl();
    const int status = gsl_integration_qag(&fn, pulse.tau_d - half, pulse.tau_d + half, 0.0, 1e-12, 2000,
                                           GSL_INTEG_GAUSS61, ws, &result, &abserr);
    gsl_integration_workspace_free(ws);
    if (status != GSL_SUCCESS)
        raise(ErrorKind::Quadrature, std::string("pulse_energy quadrature failed: ") + gsl_strerror(status));

    const double peak_amps = pulse.peak() * params.I0;
    return peak_amps * peak_amps * params.R / scales.omega_J * result;
}

}  // namespace cbjj
