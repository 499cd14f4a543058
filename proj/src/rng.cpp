#include "cbjj/rng.hpp"

#include <cmath>
#include <numbers>

namespace cbjj {

namespace {

constexpr std::uint32_t kW0 = 0x9E3779B9;
constexpr std::uint32_t kW1 = 0xBB67AE85;
constexpr std::uint32_t kM0 = 0xD2511F53;
constexpr std::uint32_t kM1 = 0xCD9E8D57;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) noexcept
{
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(p);
    hi = static_cast<std::uint32_t>(p >> 32);
}

}  // namespace

Philox4x32::Counter Philox4x32::generate(Counter ctr, Key key) noexcept
{
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kW0;
            key[1] += kW1;
        }
        std::uint32_t lo0, hi0, lo1, hi1;
        mulhilo(kM0, ctr[0], lo0, hi0);
        mulhilo(kM1, ctr[2], lo1, hi1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

std::array<std::uint64_t, 2> RngStream::block(std::uint64_t counter) const noexcept
{
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
                                  static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
    const Philox4x32::Key key{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)};
    const auto out = Philox4x32::generate(ctr, key);
    return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0], (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
}

double RngStream::uniform(std::uint64_t counter) const noexcept
{
    return to_open_unit(block(counter)[0]);
}

std::array<double, 2> box_muller_pair(const RngStream& stream, std::uint64_t counter) noexcept
{
    // to_open_unit never yields 0, so the log is always finite.
    const auto words = stream.block(counter);
    const double u1 = to_open_unit(words[0]);
    const double u2 = to_open_unit(words[1]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

double gaussian_sample(const RngStream& stream, std::uint64_t index, std::uint64_t first_block) noexcept
{
    return box_muller_pair(stream, first_block + index / 2)[index % 2];
}

void GaussianStream::fill_box_muller(double* out, std::size_t n) noexcept
{
    std::size_t k = 0;
    if (has_cached_ && n > 0) {
        out[k++] = cached_;
        has_cached_ = false;
    }
    for (; k + 1 < n; k += 2) {
        const auto pair = box_muller_pair(stream_, counter_++);
        out[k] = pair[0];
        out[k + 1] = pair[1];
    }
    if (k < n)
        out[k] = next();
}

std::array<double, 2> GaussianStream::polar_pair() noexcept
{
    for (;;) {
        const auto words = stream_.block(counter_++);
        const double x = 2.0 * to_open_unit(words[0]) - 1.0;
        const double y = 2.0 * to_open_unit(words[1]) - 1.0;
        const double s = x * x + y * y;
        if (s > 0.0 && s < 1.0) {
            const double f = std::sqrt(-2.0 * std::log(s) / s);
            return {x * f, y * f};
        }
    }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace cbjj
