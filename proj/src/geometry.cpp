#include "perchs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace perchs {

namespace {

constexpr double kRowSpacingFactor = 0.8660254037844386; // sqrt(3)/2

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::int64_t floor_div(double v, double p) {
    return static_cast<std::int64_t>(std::floor(v / p));
}

bool square_contains(double cx, double cy, double side, double px, double py) {
    return std::abs(px - cx) <= side / 2 && std::abs(py - cy) <= side / 2;
}

bool disc_contains(double cx, double cy, double diam, double px, double py) {
    double dx = px - cx, dy = py - cy;
    return dx * dx + dy * dy <= diam * diam / 4;
}

// Inclusion carried by lattice site (kx, ky), or nullopt-like flag via return.
bool site_inclusion(const PerforationModel& m, std::int64_t kx, std::int64_t ky,
                    PlacedInclusion& out) {
    const double P = m.period;
    switch (m.kind) {
        case PerforationKind::None:
            return false;
        case PerforationKind::SquareSite: {
            if (site_uniform(m.seed, kx, ky, 0) >= m.occupancy_prob) return false;
            out.shape = PlacedInclusion::Shape::Square;
            out.x = (kx + 0.5) * P;
            out.y = (ky + 0.5) * P;
            out.size = m.inclusion_scale * P;
            return true;
        }
        case PerforationKind::TriangularSite: {
            if (site_uniform(m.seed, kx, ky, 0) >= m.occupancy_prob) return false;
            const double ry = P * kRowSpacingFactor;
            out.shape = PlacedInclusion::Shape::Disc;
            out.x = (kx + 0.5 + ((ky % 2 + 2) % 2) * 0.5) * P;
            out.y = (ky + 0.5) * ry;
            out.size = m.inclusion_scale * P;
            return true;
        }
        case PerforationKind::Chessboard: {
            if (site_uniform(m.seed, kx, ky, 0) >= m.occupancy_prob) return false;
            // Irregular sub-cell: random half-to-full size, jittered within the
            // slack that keeps the pairwise gap >= (1 - scale) * period.
            double f = 0.5 + 0.5 * site_uniform(m.seed, kx, ky, 1);
            double side = f * m.inclusion_scale * P;
            double slack = (m.inclusion_scale * P - side) / 2;
            out.shape = PlacedInclusion::Shape::Square;
            out.x = (kx + 0.5) * P + slack * (2 * site_uniform(m.seed, kx, ky, 2) - 1);
            out.y = (ky + 0.5) * P + slack * (2 * site_uniform(m.seed, kx, ky, 3) - 1);
            out.size = side;
            return true;
        }
    }
    return false;
}

bool inclusion_contains(const PlacedInclusion& inc, double px, double py) {
    return inc.shape == PlacedInclusion::Shape::Square
               ? square_contains(inc.x, inc.y, inc.size, px, py)
               : disc_contains(inc.x, inc.y, inc.size, px, py);
}

bool point_in_inclusion(const PerforationModel& m, double px, double py) {
    const double P = m.period;
    PlacedInclusion inc;
    if (m.kind == PerforationKind::TriangularSite) {
        const double ry = P * kRowSpacingFactor;
        std::int64_t ky0 = floor_div(py, ry);
        std::int64_t kx0 = floor_div(px, P);
        for (std::int64_t ky = ky0 - 1; ky <= ky0 + 1; ++ky)
            for (std::int64_t kx = kx0 - 2; kx <= kx0 + 1; ++kx)
                if (site_inclusion(m, kx, ky, inc) && inclusion_contains(inc, px, py))
                    return true;
        return false;
    }
    // Square and chessboard inclusions are compactly contained in their cell.
    std::int64_t kx = floor_div(px, P);
    std::int64_t ky = floor_div(py, P);
    return site_inclusion(m, kx, ky, inc) && inclusion_contains(inc, px, py);
}

double inclusion_gap(const PlacedInclusion& a, const PlacedInclusion& b) {
    if (a.shape == PlacedInclusion::Shape::Disc && b.shape == PlacedInclusion::Shape::Disc) {
        double d = std::hypot(a.x - b.x, a.y - b.y);
        return d - (a.size + b.size) / 2;
    }
    if (a.shape == PlacedInclusion::Shape::Square && b.shape == PlacedInclusion::Shape::Square) {
        double dx = std::max(0.0, std::abs(a.x - b.x) - (a.size + b.size) / 2);
        double dy = std::max(0.0, std::abs(a.y - b.y) - (a.size + b.size) / 2);
        return std::hypot(dx, dy);
    }
    // Mixed shapes do not occur within one model; conservative center bound.
    return std::hypot(a.x - b.x, a.y - b.y) - (a.size + b.size) * 0.7071067811865476;
}

double inclusion_diameter(const PlacedInclusion& inc) {
    return inc.shape == PlacedInclusion::Shape::Square ? inc.size * std::sqrt(2.0)
                                                       : inc.size;
}

// Opens solid cells along grid paths until the fluid set is one component.
void repair_connectivity(DomainMask& mask) {
    const int nx = mask.grid.nx, ny = mask.grid.ny;
    for (int attempt = 0; attempt < 3; ++attempt) {
        // Label components, track the largest.
        std::vector<int> label(mask.grid.cells(), -1);
        std::vector<int> sizes;
        std::queue<int> q;
        for (int start = 0; start < mask.grid.cells(); ++start) {
            if (!mask.fluid[start] || label[start] >= 0) continue;
            int id = static_cast<int>(sizes.size());
            sizes.push_back(0);
            label[start] = id;
            q.push(start);
            while (!q.empty()) {
                int c = q.front();
                q.pop();
                ++sizes[id];
                int i = c % nx, j = c / nx;
                auto visit = [&](int ni, int nj) {
                    int n = mask.grid.idx(ni, nj);
                    if (mask.fluid[n] && label[n] < 0) {
                        label[n] = id;
                        q.push(n);
                    }
                };
                if (i > 0) visit(i - 1, j);
                if (i + 1 < nx) visit(i + 1, j);
                if (j > 0) visit(i, j - 1);
                if (j + 1 < ny) visit(i, j + 1);
            }
        }
        if (sizes.empty()) throw std::runtime_error("generate_domain: no fluid cells");
        if (sizes.size() == 1) return;

        int main_id = static_cast<int>(
            std::max_element(sizes.begin(), sizes.end()) - sizes.begin());

        // BFS from the main component through arbitrary cells; parent chain
        // gives a shortest repair path to each stranded component.
        std::vector<int> parent(mask.grid.cells(), -2);
        std::queue<int> bfs;
        for (int c = 0; c < mask.grid.cells(); ++c)
            if (label[c] == main_id) {
                parent[c] = -1;
                bfs.push(c);
            }
        while (!bfs.empty()) {
            int c = bfs.front();
            bfs.pop();
            int i = c % nx, j = c / nx;
            auto visit = [&](int ni, int nj) {
                int n = mask.grid.idx(ni, nj);
                if (parent[n] == -2) {
                    parent[n] = c;
                    bfs.push(n);
                }
            };
            if (i > 0) visit(i - 1, j);
            if (i + 1 < nx) visit(i + 1, j);
            if (j > 0) visit(i, j - 1);
            if (j + 1 < ny) visit(i, j + 1);
        }
        for (int id = 0; id < static_cast<int>(sizes.size()); ++id) {
            if (id == main_id) continue;
            int best = -1;
            for (int c = 0; c < mask.grid.cells(); ++c)
                if (label[c] == id && parent[c] >= -1) {
                    best = c;
                    break;
                }
            if (best < 0) continue;
            for (int c = best; c >= 0; c = parent[c]) mask.fluid[c] = 1;
        }
        mask.rebuild_faces();
        if (mask.fluid_components() == 1) return;
    }
    if (mask.fluid_components() != 1)
        throw std::runtime_error("generate_domain: disconnected fluid after repair limit");
}

} // namespace

std::string to_string(PerforationKind k) {
    switch (k) {
        case PerforationKind::None: return "none";
        case PerforationKind::SquareSite: return "square_site";
        case PerforationKind::TriangularSite: return "triangular_site";
        case PerforationKind::Chessboard: return "chessboard";
    }
    return "none";
}

PerforationKind perforation_kind_from_string(const std::string& s) {
    if (s == "none") return PerforationKind::None;
    if (s == "square_site") return PerforationKind::SquareSite;
    if (s == "triangular_site") return PerforationKind::TriangularSite;
    if (s == "chessboard") return PerforationKind::Chessboard;
    throw std::invalid_argument("unknown perforation kind: " + s);
}

void PerforationModel::validate() const {
    if (kind == PerforationKind::None) return;
    if (!(inclusion_scale > 0.0 && inclusion_scale < 1.0))
        throw std::invalid_argument("PerforationModel: inclusion_scale must be in (0,1)");
    if (!(occupancy_prob >= 0.0 && occupancy_prob <= 1.0))
        throw std::invalid_argument("PerforationModel: occupancy_prob must be in [0,1]");
    if (!(period > 0.0)) throw std::invalid_argument("PerforationModel: period must be > 0");
}

double site_uniform(std::uint64_t seed, std::int64_t kx, std::int64_t ky,
                    std::uint32_t stream) {
    std::uint64_t h = splitmix64(seed ^ 0x7fb5d329728ea185ULL);
    h = splitmix64(h ^ static_cast<std::uint64_t>(kx));
    h = splitmix64(h ^ static_cast<std::uint64_t>(ky));
    h = splitmix64(h ^ stream);
    return (h >> 11) * 0x1.0p-53;
}

std::vector<PlacedInclusion> generate_placements(const PerforationModel& model,
                                                 const GridSpec& grid) {
    model.validate();
    grid.validate();
    std::vector<PlacedInclusion> out;
    if (model.kind == PerforationKind::None) return out;
    const double P = model.period;
    const double ry = model.kind == PerforationKind::TriangularSite ? P * kRowSpacingFactor : P;
    const double x0 = grid.ox, x1 = grid.ox + grid.nx * grid.h;
    const double y0 = grid.oy, y1 = grid.oy + grid.ny * grid.h;
    std::int64_t kx_lo = floor_div(x0, P) - 2, kx_hi = floor_div(x1, P) + 2;
    std::int64_t ky_lo = floor_div(y0, ry) - 2, ky_hi = floor_div(y1, ry) + 2;
    PlacedInclusion inc;
    for (std::int64_t ky = ky_lo; ky <= ky_hi; ++ky)
        for (std::int64_t kx = kx_lo; kx <= kx_hi; ++kx)
            if (site_inclusion(model, kx, ky, inc)) out.push_back(inc);
    return out;
}

DomainMask generate_domain(const PerforationModel& model, const GridSpec& grid) {
    model.validate();
    grid.validate();
    if (model.kind != PerforationKind::None && model.period < 4 * grid.h)
        throw std::invalid_argument("generate_domain: resolution too coarse (period < 4h)");

    DomainMask mask;
    mask.grid = grid;
    mask.fluid.assign(grid.cells(), 1);
    mask.outer_dirichlet.assign(grid.cells(), 0);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) {
            if (i == 0 || j == 0 || i == grid.nx - 1 || j == grid.ny - 1)
                mask.outer_dirichlet[grid.idx(i, j)] = 1;
            if (model.kind != PerforationKind::None &&
                point_in_inclusion(model, grid.cx(i), grid.cy(j)))
                mask.fluid[grid.idx(i, j)] = 0;
        }
    mask.rebuild_faces();
    if (mask.fluid_components() != 1) repair_connectivity(mask);
    return mask;
}

SeparationReport verify_separation(const PerforationModel& model,
                                   const std::vector<PlacedInclusion>& inclusions) {
    SeparationReport rep;
    rep.d0 = (1.0 - model.inclusion_scale) * model.period;
    rep.diameter_bound = model.inclusion_scale * model.period * std::sqrt(2.0);
    rep.min_gap = std::numeric_limits<double>::infinity();
    rep.max_diameter = 0.0;
    for (size_t a = 0; a < inclusions.size(); ++a) {
        rep.max_diameter = std::max(rep.max_diameter, inclusion_diameter(inclusions[a]));
        for (size_t b = a + 1; b < inclusions.size(); ++b)
            rep.min_gap = std::min(rep.min_gap, inclusion_gap(inclusions[a], inclusions[b]));
    }
    const double slop = 1e-12 * model.period;
    rep.pass = rep.min_gap >= rep.d0 - slop && rep.max_diameter <= rep.diameter_bound + slop;
    return rep;
}

} // namespace perchs
