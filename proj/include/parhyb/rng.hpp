#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "parhyb/linalg.hpp"

namespace parhyb {

// Deterministic sampler. Distributions are derived from raw mt19937_64 words
// by hand so sequences do not depend on the standard library implementation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // uniform in [0, 1)
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * u2;
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    Vector gaussian_vector(std::size_t dim, double scale = 1.0) {
        Vector v(dim);
        for (auto& x : v) x = scale * gaussian();
        return v;
    }

    Vector uniform_vector(std::size_t dim, double lo, double hi) {
        Vector v(dim);
        for (auto& x : v) x = uniform(lo, hi);
        return v;
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace parhyb
