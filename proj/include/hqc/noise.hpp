#pragma once

#include <cstdint>

namespace hqc {

/// One Wiener increment: dW ~ N(0, dt).
struct NoiseIncrement {
    double dW = 0.0;
    double dt = 0.0;

    /// The white-noise sample eta = dW / dt.
    double rate() const { return dW / dt; }
};

/// Counter-based generator keyed by (master_seed, stream_index).
///
/// Output k of a stream is a SplitMix64 finalizer applied to
/// key + (k + 1) * golden_gamma, so a stream's values depend only on its key
/// and position: ensembles are reproducible under any worker schedule.
class NoiseStream {
public:
    NoiseStream(std::uint64_t master_seed, std::uint64_t stream_index);

    /// Uniform on the open interval (0, 1). Consumes one counter value.
    double uniform();

    /// Standard normal by Box-Muller (cosine branch only). Consumes two
    /// counter values and always exactly two.
    double gaussian();

    /// dW = sqrt(dt) * gaussian()
    NoiseIncrement increment(double dt);

    std::uint64_t key() const { return key_; }
    /// Counter values consumed so far.
    std::uint64_t position() const { return counter_; }
    std::uint64_t gaussian_draws() const { return gaussians_; }

private:
    std::uint64_t next();

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::uint64_t gaussians_ = 0;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Seed of trajectory `index` in an ensemble with `master_seed`.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

}  // namespace hqc
