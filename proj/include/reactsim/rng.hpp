#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace reactsim {

// splitmix64 finalizer, used only to spread seeds for sub-streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed of the independent sub-stream `index` under `master`. Chaining this
// (master -> sweep row -> path) keeps every work unit on its own stream no
// matter how the work is scheduled.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ (0x9e3779b97f4a7c15ULL + index));
}

// Deterministic random stream. The engine is std::mt19937_64, whose output
// sequence the standard pins down exactly; the distribution transforms are
// implemented here rather than via std::*_distribution so that draw
// sequences do not depend on the standard library.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    static RngStream derived(std::uint64_t master, std::uint64_t index) {
        return RngStream(derive_seed(master, index));
    }

    // uniform on [0, 1), 53-bit resolution
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1); safe to feed into log()
    double uniform_open() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }

    // standard normal via Box-Muller; consumes exactly two draws
    double normal() {
        const double u1 = uniform_open();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(k_two_pi * u2);
    }

    // Poisson count by multiplying uniforms until they fall below
    // exp(-mean). Exact in law for any mean; cost is O(mean + 1) draws, which
    // is what per-step means of order rate*dt keep small. The overload lets
    // callers cache exp(-mean) across steps.
    int poisson(double mean, double exp_neg_mean) {
        if (!(mean > 0.0)) return 0;
        int k = 0;
        double p = 1.0;
        do {
            ++k;
            p *= uniform_open();
        } while (p > exp_neg_mean);
        return k - 1;
    }

    int poisson(double mean) { return poisson(mean, std::exp(-mean)); }

    std::uint64_t raw() { return gen_(); }

private:
    static constexpr double k_two_pi = 6.283185307179586476925287;
    std::mt19937_64 gen_;
};

}  // namespace reactsim
