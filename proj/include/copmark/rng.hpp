#pragma once

// Deterministic, splittable randomness for the simulators.  One root seed is
// mixed with a stream index (usually the path id) through splitmix64 so each
// path owns an independent substream and is reproducible in isolation.
//
// Uniforms are (r >> 11) * 2^-53 with the zero draw bumped to 2^-53, i.e.
// exact multiples of 2^-53 in (0, 1).  That keeps 1 - u exactly representable,
// so parity flips (u -> 1 - u -> u) and W-steps are involutions bitwise.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace copmark {

inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class PathRng {
  public:
    explicit PathRng(uint64_t root_seed, uint64_t stream = 0) {
        uint64_t s = root_seed + 0x9E3779B97F4A7C15ULL * stream;
        eng_.seed(splitmix64(s));
    }

    double uniform() {
        uint64_t r = eng_() >> 11;
        if (r == 0) r = 1;
        return static_cast<double>(r) * 0x1p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * 3.14159265358979323846 * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    // Homogeneous Poisson arrival times in (t0, t1].
    std::vector<double> poisson_times(double rate, double t0, double t1) {
        std::vector<double> out;
        if (!(rate > 0.0)) return out;
        double t = t0;
        while (true) {
            t += exponential(rate);
            if (t > t1) break;
            out.push_back(t);
        }
        return out;
    }

    // Inhomogeneous Poisson arrivals in (t0, t1] by thinning against bound;
    // requires rate(t) <= bound on the interval.
    template <typename RateFn>
    std::vector<double> thinned_poisson_times(RateFn&& rate, double bound, double t0, double t1) {
        std::vector<double> out;
        if (!(bound > 0.0)) return out;
        double t = t0;
        while (true) {
            t += exponential(bound);
            if (t > t1) break;
            if (uniform() * bound <= rate(t)) out.push_back(t);
        }
        return out;
    }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace copmark
