#pragma once

#include <cstdint>
#include <vector>

#include "perchs/grid.hpp"

namespace perchs {

// Rasterized perforated domain. Cells are fluid or solid; interior faces are
// open iff both adjacent cells are fluid (zero-Neumann walls otherwise).
// Cells flagged outer_dirichlet get a zero Dirichlet condition on their
// grid-boundary faces.
struct DomainMask {
    GridSpec grid;
    std::vector<std::uint8_t> fluid;           // nx*ny
    std::vector<std::uint8_t> open_x;          // (nx-1)*ny, face (i,j)-(i+1,j)
    std::vector<std::uint8_t> open_y;          // nx*(ny-1), face (i,j)-(i,j+1)
    std::vector<std::uint8_t> outer_dirichlet; // nx*ny, meaningful on the rim

    bool is_fluid(int i, int j) const { return fluid[grid.idx(i, j)] != 0; }

    int xface(int i, int j) const { return j * (grid.nx - 1) + i; } // between i and i+1
    int yface(int i, int j) const { return j * grid.nx + i; }       // between j and j+1

    // Re-derives face openness from the fluid bitmap.
    void rebuild_faces();

    // Number of face-connected fluid components.
    int fluid_components() const;

    int fluid_cell_count() const;
};

// All-fluid mask; Dirichlet on the whole outer rim when dirichlet_boundary.
DomainMask all_fluid_mask(const GridSpec& grid, bool dirichlet_boundary = true);

// Fraction of fluid cells.
double volume_fraction(const DomainMask& mask);

} // namespace perchs
