#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace disc {

/// Counter-based seeded generator with independent streams.
///
/// The state is a pure function of (seed, stream_id, counter), so a run is
/// reproducible across platforms and shards can be handed out as child
/// streams without coordinating. Gaussians come from a Box-Muller transform
/// of the uniform output.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed = 0, std::uint64_t stream_id = 0)
        : seed_(seed), stream_(stream_id) {
        // Distinct (seed, stream) pairs must land in distinct counter orbits.
        base_ = mix(mix(seed ^ 0x9E3779B97F4A7C15ull) + stream_);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_; }

    std::uint64_t next_u64() {
        counter_ += 0x9E3779B97F4A7C15ull;
        return mix(base_ ^ counter_);
    }

    /// Uniform in (0, 1]; never returns 0 so log() below is safe.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal via Box-Muller; the paired sample is cached.
    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    /// Derived stream for shard `index`; deterministic in (seed, stream, index).
    SeededRng child(std::uint64_t index) const {
        return SeededRng(seed_, mix(stream_ ^ mix(index + 0x632BE59BD9B4E019ull)));
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t base_ = 0;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace disc
