#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cbjj {

/// One-sided power spectral density estimate.
struct PsdEstimate {
    std::vector<double> frequency;  // cycles per unit of the sample interval's time unit
    std::vector<double> density;    // units^2 per frequency unit
    std::size_t segment_length = 0;
    std::size_t segments = 0;

    /// Density in the bin nearest to f.
    double at(double f) const;
    double bin_width() const;
};

/// Averaged periodogram (Welch): Hann-tapered segments with 50% overlap,
/// mean removed per segment, scaled so the one-sided density integrates to
/// the variance.
PsdEstimate welch_psd(std::span<const double> x, double sample_interval, std::size_t segment_length);

/// Segment length in [min_length, max_length] that puts `probe` closest to a
/// bin centre. Returns the first length whose offset is within
/// `tolerance` bin widths, otherwise the best one found.
std::size_t choose_segment_length(double probe, double sample_interval, std::size_t min_length,
                                  std::size_t max_length, double tolerance = 0.005);

/// Distance from `probe` to the nearest bin centre, in bin widths.
double bin_offset(double probe, double sample_interval, std::size_t segment_length);

}  // namespace cbjj
