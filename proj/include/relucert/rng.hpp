#pragma once

#include <cstdint>

namespace relucert {

// Counter-based splittable generator. Each draw is a pure function of
// (key, counter), so parallel evaluation of disjoint counter ranges
// reproduces the serial stream exactly.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : key_(finalize(seed ^ kGolden)) {}

    // Derive an independent substream. split(s) for distinct s yields
    // statistically independent generators from the same seed.
    CounterRng split(std::uint64_t stream) const {
        CounterRng r(0);
        r.key_ = finalize(key_ ^ finalize(stream + kGolden));
        return r;
    }

    std::uint64_t raw(std::uint64_t counter) const {
        return finalize(key_ + counter * kGolden);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01(std::uint64_t counter) const {
        return static_cast<double>(raw(counter) >> 11) * 0x1.0p-53;
    }

    double uniform(std::uint64_t counter, double lo, double hi) const {
        return lo + (hi - lo) * uniform01(counter);
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t counter, std::uint64_t n) const {
        return raw(counter) % n;
    }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    // splitmix64 finalizer.
    static std::uint64_t finalize(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
};

} // namespace relucert
