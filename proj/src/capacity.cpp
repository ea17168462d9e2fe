#include "perchs/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace perchs {

namespace {

constexpr double kTwoPi = 6.283185307179586;

DomainMask strip_rim_dirichlet(const DomainMask& mask) {
    DomainMask m = mask;
    std::fill(m.outer_dirichlet.begin(), m.outer_dirichlet.end(), 0);
    return m;
}

double dist_cells(const GridSpec& g, int a, int bi, int bj) {
    int ai = a % g.nx, aj = a / g.nx;
    return std::hypot((ai - bi) * g.h, (aj - bj) * g.h);
}

std::vector<int> collar_cells(const DomainMask& mask, int ci, int cj, double r_box) {
    std::vector<int> out;
    for (int c = 0; c < mask.grid.cells(); ++c)
        if (mask.fluid[c] && dist_cells(mask.grid, c, ci, cj) >= r_box) out.push_back(c);
    return out;
}

} // namespace

CapacityResult capacity(const DomainMask& mask_in, const std::vector<int>& inner,
                        const std::vector<int>& outer, const SolverConfig& cfg) {
    DomainMask mask = strip_rim_dirichlet(mask_in);
    const GridSpec& g = mask.grid;
    CapacityResult res;
    res.inner_set = inner;
    res.outer_set = outer;

    std::vector<std::uint8_t> pinned(g.cells(), 0);
    ScalarField vals = make_field(mask);
    int inner_fluid = 0, outer_fluid = 0;
    for (int c : inner) {
        if (pinned[c]) throw std::invalid_argument("capacity: inner/outer overlap");
        if (mask.fluid[c]) {
            pinned[c] = 1;
            vals.values[c] = 1.0;
            ++inner_fluid;
        }
    }
    for (int c : outer) {
        if (pinned[c]) throw std::invalid_argument("capacity: inner/outer overlap");
        if (mask.fluid[c]) {
            pinned[c] = 2;
            vals.values[c] = 0.0;
            ++outer_fluid;
        }
    }
    if (inner_fluid == 0 || outer_fluid == 0)
        throw std::invalid_argument("capacity: a set does not intersect the fluid");

    // Fluid path check from inner to outer.
    {
        std::vector<std::uint8_t> seen(g.cells(), 0);
        std::queue<int> q;
        for (int c : inner)
            if (mask.fluid[c]) {
                seen[c] = 1;
                q.push(c);
            }
        bool reached = false;
        while (!q.empty() && !reached) {
            int c = q.front();
            q.pop();
            int i = c % g.nx, j = c / g.nx;
            auto visit = [&](int ni, int nj) {
                if (!g.in_grid(ni, nj)) return;
                int n = g.idx(ni, nj);
                if (!mask.fluid[n] || seen[n]) return;
                seen[n] = 1;
                if (pinned[n] == 2) reached = true;
                q.push(n);
            };
            visit(i - 1, j);
            visit(i + 1, j);
            visit(i, j - 1);
            visit(i, j + 1);
        }
        if (!reached) {
            res.no_fluid_path = true;
            res.value = 0.0;
            res.potential = vals;
            return res;
        }
    }

    std::vector<std::uint8_t> pin01(g.cells(), 0);
    for (int c = 0; c < g.cells(); ++c) pin01[c] = pinned[c] ? 1 : 0;
    ScalarField rhs = make_field(mask);
    ScalarField v = solve_constrained(mask, rhs, cfg, nullptr, &pin01, &vals);

    // Dirichlet energy over open faces (grid-independent in 2D).
    double e = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int c = g.idx(i, j);
            if (!mask.fluid[c]) continue;
            if (i + 1 < g.nx && mask.open_x[mask.xface(i, j)]) {
                double d = v.values[g.idx(i + 1, j)] - v.values[c];
                e += d * d;
            }
            if (j + 1 < g.ny && mask.open_y[mask.yface(i, j)]) {
                double d = v.values[g.idx(i, j + 1)] - v.values[c];
                e += d * d;
            }
        }
    res.value = e;
    res.potential = std::move(v);
    return res;
}

ScalarField collared_green(const DomainMask& mask_in, int iy, int jy, double r_box,
                           const SolverConfig& cfg) {
    DomainMask mask = strip_rim_dirichlet(mask_in);
    const GridSpec& g = mask.grid;
    if (!g.in_grid(iy, jy) || !mask.is_fluid(iy, jy))
        throw std::invalid_argument("collared_green: source cell is not fluid");
    std::vector<std::uint8_t> pinned(g.cells(), 0);
    for (int c : collar_cells(mask, iy, jy, r_box)) pinned[c] = 1;
    ScalarField rhs = make_field(mask);
    rhs.at(iy, jy) = 1.0 / (g.h * g.h);
    ScalarField zeros = make_field(mask);
    return solve_constrained(mask, rhs, cfg, nullptr, &pinned, &zeros);
}

std::vector<int> shell_cells(const DomainMask& mask, int ci, int cj, double r) {
    std::vector<int> out;
    const GridSpec& g = mask.grid;
    for (int c = 0; c < g.cells(); ++c) {
        if (!mask.fluid[c]) continue;
        double d = dist_cells(g, c, ci, cj);
        if (d >= r - g.h / 2 && d < r + g.h / 2) out.push_back(c);
    }
    return out;
}

std::vector<LevelSetCapacityRow> level_set_capacity_check(
    const DomainMask& mask, int iy, int jy, const std::vector<double>& a_list,
    double r_box, const SolverConfig& cfg) {
    const GridSpec& g = mask.grid;
    ScalarField G = collared_green(mask, iy, jy, r_box, cfg);
    std::vector<int> outer = collar_cells(mask, iy, jy, r_box);

    std::vector<LevelSetCapacityRow> rows;
    for (double a : a_list) {
        std::vector<int> J;
        bool touches = false;
        for (int c = 0; c < g.cells(); ++c) {
            if (!mask.fluid[c] || !(G.values[c] >= a)) continue;
            J.push_back(c);
            if (dist_cells(g, c, iy, jy) >= r_box - 1.5 * g.h) touches = true;
        }
        if (J.empty()) throw std::invalid_argument("level_set_capacity_check: level-set-empty");
        if (touches)
            throw std::invalid_argument(
                "level_set_capacity_check: level-set-touches-outer-boundary");
        CapacityResult cap = capacity(mask, J, outer, cfg);
        rows.push_back({a, cap.value, a * cap.value});
    }
    return rows;
}

std::vector<GreenBoundsRow> green_bounds_check(const DomainMask& mask, int iy, int jy,
                                               const std::vector<double>& radii,
                                               double r_box, const SolverConfig& cfg) {
    const GridSpec& g = mask.grid;
    ScalarField G = collared_green(mask, iy, jy, r_box, cfg);
    std::vector<int> outer = collar_cells(mask, iy, jy, r_box);

    std::vector<GreenBoundsRow> rows;
    for (double r : radii) {
        std::vector<int> shell = shell_cells(mask, iy, jy, r);
        if (shell.empty()) throw std::invalid_argument("green_bounds_check: empty shell");
        GreenBoundsRow row;
        row.r = r;
        row.g_min = std::numeric_limits<double>::infinity();
        row.g_max = -row.g_min;
        for (int c : shell) {
            row.g_min = std::min(row.g_min, G.values[c]);
            row.g_max = std::max(row.g_max, G.values[c]);
        }
        row.reference = std::log(r_box / r) / kTwoPi;
        row.ratio_min = row.g_min / row.reference;
        row.ratio_max = row.g_max / row.reference;

        std::vector<int> inner;
        for (int c = 0; c < g.cells(); ++c)
            if (mask.fluid[c] && dist_cells(g, c, iy, jy) <= r) inner.push_back(c);
        CapacityResult cap = capacity(mask, inner, outer, cfg);
        row.inv_capacity = cap.value > 0 ? 1.0 / cap.value : 0.0;
        double slack = 0.02 * row.inv_capacity + 1e-12;
        row.sandwich_ok =
            row.g_min <= row.inv_capacity + slack && row.inv_capacity <= row.g_max + slack;
        rows.push_back(row);
    }
    return rows;
}

std::vector<MetricsRecord> capacity_lower_bound_check(
    const PerforationModel& model, const std::vector<double>& eps_list, double r,
    double r_box, const GridSpec& grid, const SolverConfig& cfg,
    const std::string& experiment_id) {
    int ci = grid.nx / 2, cj = grid.ny / 2;
    DomainMask full = all_fluid_mask(grid);
    auto inner_of = [&](const DomainMask& m) {
        std::vector<int> v;
        for (int c = 0; c < grid.cells(); ++c)
            if (m.fluid[c] && dist_cells(grid, c, ci, cj) <= r) v.push_back(c);
        return v;
    };
    auto outer_of = [&](const DomainMask& m) { return collar_cells(m, ci, cj, r_box); };
    double cap_full = capacity(full, inner_of(full), outer_of(full), cfg).value;

    std::vector<MetricsRecord> out;
    for (double eps : eps_list) {
        PerforationModel m = model;
        m.period = eps;
        DomainMask mask = generate_domain(m, grid);
        double cap_eps = capacity(mask, inner_of(mask), outer_of(mask), cfg).value;
        out.push_back({experiment_id, eps, m.seed, 0.0, "capacity_ratio",
                       cap_eps / cap_full});
    }
    return out;
}

} // namespace perchs
