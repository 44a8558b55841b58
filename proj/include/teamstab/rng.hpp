#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace teamstab {

/// Deterministic random source. mt19937_64 has a sequence fixed by the
/// standard; the distributions below are hand-rolled because the standard
/// library distribution objects are implementation-defined and would break
/// bit-for-bit reproducibility across toolchains. The state is filled
/// through seed_seq: single-word seeding leaves the early Mersenne Twister
/// stream visibly correlated for small sequential seeds.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(make_engine(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, bound), bound > 0. Rejection sampling, unbiased.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t draw;
        do {
            draw = engine_();
        } while (draw >= limit);
        return draw % bound;
    }

    /// Uniform integer in [lo, hi], inclusive.
    int range(int lo, int hi) {
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal via Box-Muller. Consumes two draws per call; the
    /// second variate is discarded to keep the stream position predictable.
    double gaussian(double mean, double sd) {
        const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
        const double u2 = uniform01();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
        return mean + sd * z;
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t k = values.size(); k > 1; --k) {
            const std::size_t j = static_cast<std::size_t>(below(k));
            std::swap(values[k - 1], values[j]);
        }
    }

private:
    static std::mt19937_64 make_engine(std::uint64_t seed) {
        std::seed_seq sequence{static_cast<std::uint32_t>(seed),
                               static_cast<std::uint32_t>(seed >> 32)};
        return std::mt19937_64(sequence);
    }

    std::mt19937_64 engine_;
};

}  // namespace teamstab
