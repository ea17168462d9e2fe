#pragma once

#include <cmath>
#include <stdexcept>

namespace perchs {

// Uniform cell-centered grid covering [ox, ox + nx*h] x [oy, oy + ny*h].
struct GridSpec {
    int nx = 0;
    int ny = 0;
    double h = 0.0;
    double ox = 0.0;
    double oy = 0.0;

    int cells() const { return nx * ny; }
    int idx(int i, int j) const { return j * nx + i; }
    bool in_grid(int i, int j) const { return i >= 0 && i < nx && j >= 0 && j < ny; }
    double cx(int i) const { return ox + (i + 0.5) * h; }
    double cy(int j) const { return oy + (j + 0.5) * h; }

    void validate() const {
        if (nx < 4 || ny < 4) throw std::invalid_argument("GridSpec: nx, ny must be >= 4");
        if (!(h > 0.0)) throw std::invalid_argument("GridSpec: h must be > 0");
    }
};

inline bool same_grid(const GridSpec& a, const GridSpec& b) {
    return a.nx == b.nx && a.ny == b.ny && a.h == b.h && a.ox == b.ox && a.oy == b.oy;
}

} // namespace perchs
