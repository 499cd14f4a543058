#include "cbjj/spectral.hpp"

#include <cmath>
#include <complex>
#include <fftw3.h>
#include <mutex>
#include <numbers>

#include "cbjj/error.hpp"

namespace cbjj {

namespace {

std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

}  // namespace

double PsdEstimate::bin_width() const
{
    return frequency.size() > 1 ? frequency[1] - frequency[0] : 0.0;
}

double PsdEstimate::at(double f) const
{
    if (density.empty())
        raise(ErrorKind::InsufficientData, "empty PSD estimate");
    const double w = bin_width();
    auto k = static_cast<std::size_t>(std::llround(f / w));
    if (k >= density.size())
        k = density.size() - 1;
    return density[k];
}

double bin_offset(double probe, double sample_interval, std::size_t segment_length)
{
    const double pos = probe * sample_interval * static_cast<double>(segment_length);
    return std::abs(pos - std::round(pos));
}

std::size_t choose_segment_length(double probe, double sample_interval, std::size_t min_length,
                                  std::size_t max_length, double tolerance)
{
    if (min_length < 8 || max_length < min_length)
        raise(ErrorKind::InvalidParameter, "invalid segment length range");
    std::size_t best = max_length;
    double best_offset = 1.0;
    for (std::size_t len = max_length; len >= min_length; --len) {
        const double off = bin_offset(probe, sample_interval, len);
        if (off <= tolerance)
            return len;
        if (off < best_offset) {
            best_offset = off;
            best = len;
        }
    }
    return best;
}

PsdEstimate welch_psd(std::span<const double> x, double sample_interval, std::size_t segment_length)
{
    const std::size_t L = segment_length;
    if (L < 8)
        raise(ErrorKind::InvalidParameter, "PSD segment length must be at least 8");
    if (x.size() < L)
        raise(ErrorKind::InsufficientData, "series shorter than one PSD segment");
    const std::size_t hop = L / 2;
    const std::size_t n_segments = 1 + (x.size() - L) / hop;

    std::vector<double> window(L);
    double window_power = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
        window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(L));
        window_power += window[i] * window[i];
    }

    std::vector<double> buffer(L);
    std::vector<std::complex<double>> spectrum(L / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(L), buffer.data(),
                                    reinterpret_cast<fftw_complex*>(spectrum.data()), FFTW_ESTIMATE);
    }

    PsdEstimate out;
    out.segment_length = L;
    out.segments = n_segments;
    out.density.assign(L / 2 + 1, 0.0);
    for (std::size_t s = 0; s < n_segments; ++s) {
        const double* seg = x.data() + s * hop;
        double mean = 0.0;
        for (std::size_t i = 0; i < L; ++i)
            mean += seg[i];
        mean /= static_cast<double>(L);
        for (std::size_t i = 0; i < L; ++i)
            buffer[i] = (seg[i] - mean) * window[i];
        fftw_execute(plan);
        for (std::size_t k = 0; k <= L / 2; ++k)
            out.density[k] += std::norm(spectrum[k]);
    }
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }

    const double scale = sample_interval / (window_power * static_cast<double>(n_segments));
    out.frequency.resize(L / 2 + 1);
    for (std::size_t k = 0; k <= L / 2; ++k) {
        out.frequency[k] = static_cast<double>(k) / (static_cast<double>(L) * sample_interval);
        const bool edge = (k == 0) || (L % 2 == 0 && k == L / 2);
        out.density[k] *= scale * (edge ? 1.0 : 2.0);
    }
    return out;
}

}  // namespace cbjj
