#pragma once

#include <cmath>
#include <cstdint>

namespace treestrat {

// Counter-based generator: value(i) depends only on (seed, stream, i), so
// parallel evaluation order cannot change any draw. The mix is the splitmix64
// finalizer.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(seed ^ mix(stream ^ 0x9e3779b97f4a7c15ULL))), counter_(0) {}

    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform on (0,1): never returns 0 or 1, safe under log().
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform integer on [lo, hi], both inclusive.
    int uniform_int(int lo, int hi) {
        const double u = uniform01();
        int v = lo + static_cast<int>(u * (static_cast<double>(hi) - lo + 1));
        return v > hi ? hi : v;
    }

    /// Standard normal via Box-Muller (two counter draws per call).
    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

} // namespace treestrat
