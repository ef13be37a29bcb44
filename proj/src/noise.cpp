#include "hqc/noise.hpp"

#include <cmath>
#include <numbers>

#include "hqc/errors.hpp"

namespace hqc {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    return mix64(master_seed ^ mix64(index * kGolden + 0x632BE59BD9B4E019ULL));
}

NoiseStream::NoiseStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : key_(derive_seed(master_seed, stream_index)) {}

std::uint64_t NoiseStream::next() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double NoiseStream::uniform() {
    // 53 random bits, shifted by half an ulp so 0 is never returned.
    return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double NoiseStream::gaussian() {
    const double u1 = uniform();
    const double u2 = uniform();
    ++gaussians_;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

NoiseIncrement NoiseStream::increment(double dt) {
    if (!(dt > 0.0)) throw InvalidParameter("NoiseStream::increment: dt must be positive");
    return {std::sqrt(dt) * gaussian(), dt};
}

}  // namespace hqc
