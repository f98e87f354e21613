#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace wfcoal {

// Deterministic random stream. All stochastic code takes an explicit Rng so
// that callers own seeding; parallel work items use child_seed(master, i),
// which is the documented splitting rule (splitmix64 finalizer over
// master XOR i*golden-gamma). Outputs are reproducible bit-for-bit for a
// given seed: all derived variates below are built from integer draws and
// libm calls only, never from implementation-defined std distributions.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ (0x9E3779B97F4A7C15ULL * (index + 1)));
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Unbiased draw in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = -n % n;  // 2^64 mod n
        for (;;) {
            std::uint64_t x = next_u64();
            if (x >= threshold) return x % n;
        }
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard exponential via inversion; uniform01() < 1 keeps this finite.
    double exponential() { return -std::log1p(-uniform01()); }

    // Index draw from a cumulative weight table (cum.back() == total mass).
    std::size_t from_cumulative(const std::vector<double>& cum) {
        double u = uniform01() * cum.back();
        std::size_t lo = 0, hi = cum.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (cum[mid] <= u)
                lo = mid + 1;
            else
                hi = mid;
        }
        return lo;
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace wfcoal
