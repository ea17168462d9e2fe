#include "perchs/mask.hpp"

#include <queue>

namespace perchs {

void DomainMask::rebuild_faces() {
    const int nx = grid.nx, ny = grid.ny;
    open_x.assign(static_cast<size_t>(nx - 1) * ny, 0);
    open_y.assign(static_cast<size_t>(nx) * (ny - 1), 0);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i)
            open_x[xface(i, j)] = fluid[grid.idx(i, j)] && fluid[grid.idx(i + 1, j)];
    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i < nx; ++i)
            open_y[yface(i, j)] = fluid[grid.idx(i, j)] && fluid[grid.idx(i, j + 1)];
}

int DomainMask::fluid_components() const {
    const int nx = grid.nx, ny = grid.ny;
    std::vector<std::uint8_t> seen(grid.cells(), 0);
    int comps = 0;
    std::queue<int> q;
    for (int start = 0; start < grid.cells(); ++start) {
        if (!fluid[start] || seen[start]) continue;
        ++comps;
        seen[start] = 1;
        q.push(start);
        while (!q.empty()) {
            int c = q.front();
            q.pop();
            int i = c % nx, j = c / nx;
            auto visit = [&](int ni, int nj) {
                int n = grid.idx(ni, nj);
                if (!seen[n] && fluid[n]) {
                    seen[n] = 1;
                    q.push(n);
                }
            };
            if (i > 0) visit(i - 1, j);
            if (i + 1 < nx) visit(i + 1, j);
            if (j > 0) visit(i, j - 1);
            if (j + 1 < ny) visit(i, j + 1);
        }
    }
    return comps;
}

int DomainMask::fluid_cell_count() const {
    int n = 0;
    for (auto f : fluid) n += (f != 0);
    return n;
}

DomainMask all_fluid_mask(const GridSpec& grid, bool dirichlet_boundary) {
    grid.validate();
    DomainMask m;
    m.grid = grid;
    m.fluid.assign(grid.cells(), 1);
    m.outer_dirichlet.assign(grid.cells(), 0);
    if (dirichlet_boundary) {
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i)
                if (i == 0 || j == 0 || i == grid.nx - 1 || j == grid.ny - 1)
                    m.outer_dirichlet[grid.idx(i, j)] = 1;
    }
    m.rebuild_faces();
    return m;
}

double volume_fraction(const DomainMask& mask) {
    return static_cast<double>(mask.fluid_cell_count()) / mask.grid.cells();
}

} // namespace perchs
