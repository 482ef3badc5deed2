#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "tddsense/common.hpp"

namespace tddsense {

/// splitmix64 step; used to mix seed words for independent substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic random stream with explicit sampling formulas, so that
/// results are reproducible across standard libraries and schedulers.
/// Substreams are derived from (master seed, stream ids); parallel workers
/// each own the stream for their trial index.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Substream constructor: mixes the master seed with up to three ids.
    static Rng substream(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                         std::uint64_t c = 0) {
        std::uint64_t s = master;
        splitmix64(s);
        s ^= 0x9e3779b97f4a7c15ULL * (a + 1);
        splitmix64(s);
        s ^= 0xc2b2ae3d27d4eb4fULL * (b + 1);
        splitmix64(s);
        s ^= 0x165667b19e3779f9ULL * (c + 1);
        return Rng(splitmix64(s));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Standard normal pair via Box-Muller.
    void gaussian_pair(double& g0, double& g1) {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double phi = kTwoPi * uniform();
        g0 = r * std::cos(phi);
        g1 = r * std::sin(phi);
    }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double g0, g1;
        gaussian_pair(g0, g1);
        spare_ = g1;
        have_spare_ = true;
        return g0;
    }

    /// Circular complex Gaussian with total variance var (var/2 per part).
    cplx complex_gaussian(double var) {
        double g0, g1;
        gaussian_pair(g0, g1);
        double s = std::sqrt(0.5 * var);
        return {s * g0, s * g1};
    }

  private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace tddsense
