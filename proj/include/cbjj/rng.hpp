#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace cbjj {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A pure
/// function of (counter, key): no state, so any draw can be regenerated from
/// its coordinates alone.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) noexcept;
};

/// Converts the top 52 bits of x to a double strictly inside (0, 1).
inline double to_open_unit(std::uint64_t x) noexcept
{
    return (static_cast<double>(x >> 12) + 0.5) * 0x1.0p-52;
}

/// Coordinates of an independent random stream: (master_seed, stream_id).
/// Draw k of the stream is Philox(counter = {k, stream_id}, key = master_seed).
struct RngStream {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;

    /// Two 64-bit words for draw index `counter`.
    std::array<std::uint64_t, 2> block(std::uint64_t counter) const noexcept;

    /// Uniform in (0, 1) from the first word of block `counter`.
    double uniform(std::uint64_t counter) const noexcept;

    bool operator==(const RngStream&) const = default;
};

/// Basic Box-Muller pair for draw index `counter`: both outputs are returned.
std::array<double, 2> box_muller_pair(const RngStream& stream, std::uint64_t counter) noexcept;

/// Standard normal deviate number `index` of the stream (basic Box-Muller;
/// deviates 2k and 2k+1 share block k + first_block).
double gaussian_sample(const RngStream& stream, std::uint64_t index, std::uint64_t first_block = 0) noexcept;

enum class GaussianMethod { BoxMuller, Polar };

/// Sequential normal source over one stream. Cheap to copy; holds only the
/// next counter and one cached deviate.
class GaussianStream {
public:
    GaussianStream(RngStream stream, std::uint64_t first_block,
                   GaussianMethod method = GaussianMethod::BoxMuller) noexcept
        : stream_(stream), counter_(first_block), method_(method) {}

    double next() noexcept
    {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const auto pair = method_ == GaussianMethod::BoxMuller ? box_muller_pair(stream_, counter_++) : polar_pair();
        cached_ = pair[1];
        has_cached_ = true;
        return pair[0];
    }

    std::uint64_t counter() const noexcept { return counter_; }
    GaussianMethod method() const noexcept { return method_; }

    /// Writes the next n basic Box-Muller deviates: the same sequence as n calls to next().
    void fill_box_muller(double* out, std::size_t n) noexcept;

private:
    std::array<double, 2> polar_pair() noexcept;

    RngStream stream_;
    std::uint64_t counter_;
    GaussianMethod method_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

/// Block-index offsets that partition one stream between consumers.
inline constexpr std::uint64_t kInitialStateBlock = 0;
inline constexpr std::uint64_t kWhiteNoiseFirstBlock = 1;
inline constexpr std::uint64_t kColoredNoiseFirstBlock = std::uint64_t{1} << 62;

/// SplitMix64 finalizer; used to derive child seeds (per grid point, per
/// experiment) from one master seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept;

}  // namespace cbjj
