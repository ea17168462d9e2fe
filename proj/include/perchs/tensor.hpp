#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace perchs {

// Symmetric 2x2 effective diffusivity plus fluid volume fraction.
struct EffectiveTensor {
    double a11 = 1.0;
    double a12 = 0.0;
    double a22 = 1.0;
    double mu = 1.0;

    std::array<double, 2> eigenvalues() const {
        double tr = a11 + a22;
        double disc = std::sqrt(std::max(0.0, (a11 - a22) * (a11 - a22) + 4 * a12 * a12));
        return {(tr - disc) / 2, (tr + disc) / 2};
    }

    bool spd() const { return eigenvalues()[0] > 0.0; }

    void validate() const {
        if (!spd()) throw std::invalid_argument("EffectiveTensor: not positive definite");
        if (!(mu > 0.0 && mu <= 1.0))
            throw std::invalid_argument("EffectiveTensor: mu must be in (0,1]");
    }
};

inline EffectiveTensor identity_tensor() { return {1.0, 0.0, 1.0, 1.0}; }

// Q(p) = (A p . p) / mu.
inline double quadratic_form(const EffectiveTensor& t, double px, double py) {
    return (t.a11 * px * px + 2 * t.a12 * px * py + t.a22 * py * py) / t.mu;
}

} // namespace perchs
