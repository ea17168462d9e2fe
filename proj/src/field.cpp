#include "perchs/field.hpp"

#include <cmath>

namespace perchs {

double norm_inf(const DomainMask& mask, const ScalarField& f) {
    double m = 0.0;
    for (int c = 0; c < mask.grid.cells(); ++c)
        if (mask.fluid[c]) m = std::max(m, std::abs(f.values[c]));
    return m;
}

double norm_l2(const DomainMask& mask, const ScalarField& f) {
    double s = 0.0;
    for (int c = 0; c < mask.grid.cells(); ++c)
        if (mask.fluid[c]) s += f.values[c] * f.values[c];
    return std::sqrt(s) * mask.grid.h;
}

double dot_fluid(const DomainMask& mask, const ScalarField& a, const ScalarField& b) {
    double s = 0.0;
    for (int c = 0; c < mask.grid.cells(); ++c)
        if (mask.fluid[c]) s += a.values[c] * b.values[c];
    return s;
}

} // namespace perchs
