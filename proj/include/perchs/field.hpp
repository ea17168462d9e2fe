#pragma once

#include <limits>
#include <vector>

#include "perchs/mask.hpp"

namespace perchs {

// Cell-centered values on fluid cells; solid cells carry a NaN sentinel.
struct ScalarField {
    GridSpec grid;
    std::vector<double> values;

    double& at(int i, int j) { return values[grid.idx(i, j)]; }
    double at(int i, int j) const { return values[grid.idx(i, j)]; }
};

inline ScalarField make_field(const DomainMask& mask, double fill = 0.0) {
    ScalarField f;
    f.grid = mask.grid;
    f.values.assign(mask.grid.cells(), std::numeric_limits<double>::quiet_NaN());
    for (int c = 0; c < mask.grid.cells(); ++c)
        if (mask.fluid[c]) f.values[c] = fill;
    return f;
}

// Norms over fluid cells.
double norm_inf(const DomainMask& mask, const ScalarField& f);
double norm_l2(const DomainMask& mask, const ScalarField& f); // sqrt(sum v^2 h^2)
double dot_fluid(const DomainMask& mask, const ScalarField& a, const ScalarField& b);

} // namespace perchs
