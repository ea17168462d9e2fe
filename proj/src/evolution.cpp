#include "perchs/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace perchs {

namespace {

double cell_dist(const GridSpec& g, int a, int b) {
    int ai = a % g.nx, aj = a / g.nx, bi = b % g.nx, bj = b / g.nx;
    return std::hypot((ai - bi) * g.h, (aj - bj) * g.h);
}

std::vector<std::uint8_t> active_union_d0(const ObstacleSolution& sol,
                                          const std::vector<std::uint8_t>& d0) {
    std::vector<std::uint8_t> a(sol.active);
    for (size_t c = 0; c < a.size(); ++c)
        if (d0[c]) a[c] = 1;
    return a;
}

ScalarField build_load(const DomainMask& mask, const ObstacleState& state,
                       const ScalarField& tau_next, const EffectiveTensor* tensor) {
    const double mu = tensor ? tensor->mu : 1.0;
    ScalarField load = make_field(mask);
    for (int c = 0; c < mask.grid.cells(); ++c)
        if (mask.fluid[c])
            load.values[c] = mu * ((state.d0_mask[c] ? 0.0 : -1.0) + tau_next.values[c]);
    return load;
}

int count_decreases(const DomainMask& mask, const ScalarField& before,
                    const ScalarField& after, double slack) {
    int n = 0;
    for (int c = 0; c < mask.grid.cells(); ++c)
        if (mask.fluid[c] && after.values[c] < before.values[c] - slack) ++n;
    return n;
}

} // namespace

bool RegionSpec::contains(double x, double y) const {
    if (shape == Shape::Disc) {
        double dx = x - cx, dy = y - cy;
        return dx * dx + dy * dy <= radius * radius;
    }
    // Even-odd crossing test.
    bool inside = false;
    size_t n = polygon.size();
    for (size_t a = 0, b = n - 1; a < n; b = a++) {
        auto [xa, ya] = polygon[a];
        auto [xb, yb] = polygon[b];
        if ((ya > y) != (yb > y) && x < (xb - xa) * (y - ya) / (yb - ya) + xa)
            inside = !inside;
    }
    return inside;
}

ObstacleState init_state(const DomainMask& mask, const RegionSpec& d0) {
    const GridSpec& g = mask.grid;
    ObstacleState s;
    s.t = 0.0;
    s.p = make_field(mask);
    s.tau = make_field(mask);
    s.d0_mask.assign(g.cells(), 0);
    s.active.assign(g.cells(), 0);
    int n = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int c = g.idx(i, j);
            if (mask.fluid[c] && d0.contains(g.cx(i), g.cy(j))) {
                s.d0_mask[c] = 1;
                s.active[c] = 1;
                ++n;
            }
        }
    if (n == 0) throw std::invalid_argument("init_state: empty-initial-set");
    return s;
}

StepReport step(ObstacleState& state, double dt, StepMode mode, const SolverConfig& cfg,
                const DomainMask& mask, const EffectiveTensor* tensor, int inner_max) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
    const GridSpec& g = mask.grid;
    StepReport rep;
    const double slack = 10 * cfg.tol * std::max(1.0, norm_inf(mask, state.p));

    // Occupancy increment from the active set at step start.
    ScalarField tau_next = state.tau;
    for (int c = 0; c < g.cells(); ++c)
        if (mask.fluid[c] && state.active[c]) tau_next.values[c] += dt;

    ScalarField load = build_load(mask, state, tau_next, tensor);
    ObstacleSolution sol = solve_obstacle(mask, load, cfg, tensor, &state.p);
    rep.monotonicity_violations += count_decreases(mask, state.p, sol.p, slack);

    if (mode == StepMode::FixedPoint) {
        std::vector<std::uint8_t> act = active_union_d0(sol, state.d0_mask);
        bool stable = false;
        for (int it = 0; it < inner_max; ++it) {
            ScalarField tau_it = state.tau;
            for (int c = 0; c < g.cells(); ++c)
                if (mask.fluid[c] && act[c]) tau_it.values[c] += dt;
            ScalarField load_it = build_load(mask, state, tau_it, tensor);
            ObstacleSolution next = solve_obstacle(mask, load_it, cfg, tensor, &sol.p);
            ++rep.inner_iterations;
            rep.monotonicity_violations += count_decreases(mask, sol.p, next.p, slack);
            std::vector<std::uint8_t> act_next = active_union_d0(next, state.d0_mask);
            sol = std::move(next);
            if (act_next == act) {
                stable = true;
                tau_next = tau_it;
                break;
            }
            act = std::move(act_next);
        }
        if (!stable) {
            // Active set failed to settle; keep the explicit update.
            rep.fell_back_to_explicit = true;
            tau_next = state.tau;
            for (int c = 0; c < g.cells(); ++c)
                if (mask.fluid[c] && state.active[c]) tau_next.values[c] += dt;
            load = build_load(mask, state, tau_next, tensor);
            sol = solve_obstacle(mask, load, cfg, tensor, &state.p);
        }
    }

    state.t += dt;
    state.p = std::move(sol.p);
    state.tau = std::move(tau_next);
    state.active = active_union_d0(sol, state.d0_mask);
    return rep;
}

void evolve(ObstacleState& state, const DomainMask& mask, double T, double dt,
            StepMode mode, const SolverConfig& cfg, const EffectiveTensor* tensor,
            const std::function<void(const ObstacleState&, const StepReport&)>& on_step) {
    if (!(dt > 0.0) || !(T > state.t))
        throw std::invalid_argument("evolve: need dt > 0 and T > current time");
    int nsteps = static_cast<int>(std::llround((T - state.t) / dt));
    if (nsteps < 1) nsteps = 1;
    for (int k = 0; k < nsteps; ++k) {
        StepReport rep = step(state, dt, mode, cfg, mask, tensor);
        if (on_step) on_step(state, rep);
    }
}

ScalarField recover_u(const ObstacleState& state, const DomainMask& mask,
                      const SolverConfig& cfg, const EffectiveTensor* tensor) {
    const GridSpec& g = mask.grid;
    bool any = false;
    std::vector<std::uint8_t> pinned(g.cells(), 0);
    for (int c = 0; c < g.cells(); ++c) {
        if (!mask.fluid[c]) continue;
        if (state.active[c]) any = true;
        else pinned[c] = 1;
    }
    if (!any) throw std::invalid_argument("recover_u: active set is empty");
    ScalarField rhs = make_field(mask);
    const double mu = tensor ? tensor->mu : 1.0;
    for (int c = 0; c < g.cells(); ++c)
        if (mask.fluid[c] && state.active[c]) rhs.values[c] = mu;
    ScalarField zeros = make_field(mask);
    return solve_constrained(mask, rhs, cfg, tensor, &pinned, &zeros);
}

FreeBoundary extract_free_boundary(const ObstacleState& state, const DomainMask& mask) {
    const GridSpec& g = mask.grid;
    FreeBoundary fb;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int c = g.idx(i, j);
            if (!mask.fluid[c] || !state.active[c]) continue;
            auto inactive_fluid = [&](int ii, int jj) {
                if (!g.in_grid(ii, jj)) return false;
                int n = g.idx(ii, jj);
                return mask.fluid[n] && !state.active[n];
            };
            if (inactive_fluid(i - 1, j) || inactive_fluid(i + 1, j) ||
                inactive_fluid(i, j - 1) || inactive_fluid(i, j + 1))
                fb.cells.push_back(c);
        }
    return fb;
}

double hausdorff_distance(const FreeBoundary& a, const FreeBoundary& b,
                          const GridSpec& grid) {
    if (a.cells.empty() || b.cells.empty())
        throw std::invalid_argument("hausdorff_distance: empty-input");
    auto directed = [&](const std::vector<int>& from, const std::vector<int>& to) {
        double worst = 0.0;
        for (int c : from) {
            double best = std::numeric_limits<double>::infinity();
            for (int d : to) best = std::min(best, cell_dist(grid, c, d));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a.cells, b.cells), directed(b.cells, a.cells));
}

NondegeneracyReport nondegeneracy_probe(const ObstacleState& state, const DomainMask& mask,
                                        const std::vector<double>& radii) {
    const GridSpec& g = mask.grid;
    FreeBoundary fb = extract_free_boundary(state, mask);
    if (fb.cells.empty() || radii.size() < 2)
        throw std::invalid_argument("nondegeneracy_probe: insufficient-radii");

    std::vector<int> d0_cells;
    for (int c = 0; c < g.cells(); ++c)
        if (state.d0_mask[c]) d0_cells.push_back(c);

    // Deterministic subsample of free-boundary cells.
    size_t stride = std::max<size_t>(1, fb.cells.size() / 128);
    NondegeneracyReport rep;
    rep.min_coefficient = std::numeric_limits<double>::infinity();
    double slope_sum = 0.0;
    for (size_t k = 0; k < fb.cells.size(); k += stride) {
        int c = fb.cells[k];
        int ci = c % g.nx, cj = c / g.nx;
        double dist_d0 = std::numeric_limits<double>::infinity();
        for (int d : d0_cells) dist_d0 = std::min(dist_d0, cell_dist(g, c, d));

        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (double r : radii) {
            if (r < 2 * g.h || r > 0.5 * dist_d0) continue;
            int span = static_cast<int>(std::ceil(r / g.h));
            double sup = 0.0;
            for (int j = std::max(0, cj - span); j <= std::min(g.ny - 1, cj + span); ++j)
                for (int i = std::max(0, ci - span); i <= std::min(g.nx - 1, ci + span); ++i) {
                    int n2 = g.idx(i, j);
                    if (!mask.fluid[n2]) continue;
                    if (std::hypot((i - ci) * g.h, (j - cj) * g.h) > r) continue;
                    sup = std::max(sup, state.p.values[n2]);
                }
            if (sup <= 0.0) continue;
            double lx = std::log(r), ly = std::log(sup);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++n;
            rep.min_coefficient = std::min(rep.min_coefficient, sup / (r * r));
        }
        if (n >= 2) {
            double denom = n * sxx - sx * sx;
            if (denom > 0) {
                slope_sum += (n * sxy - sx * sy) / denom;
                ++rep.sampled_cells;
            }
        }
    }
    if (rep.sampled_cells == 0)
        throw std::invalid_argument("nondegeneracy_probe: insufficient data");
    rep.slope = slope_sum / rep.sampled_cells;
    return rep;
}

std::vector<EvolutionCheckRow> evolution_checks(const std::vector<ObstacleState>& trajectory,
                                                const DomainMask& mask,
                                                double solver_tol) {
    const GridSpec& g = mask.grid;
    std::vector<EvolutionCheckRow> rows;
    if (trajectory.size() < 2) return rows;
    double area0 = 0.0;
    for (int c = 0; c < g.cells(); ++c)
        if (mask.fluid[c] && trajectory.front().d0_mask[c]) area0 += g.h * g.h;

    for (size_t k = 0; k + 1 < trajectory.size(); ++k) {
        const ObstacleState& s1 = trajectory[k];
        const ObstacleState& s2 = trajectory[k + 1];
        EvolutionCheckRow row;
        row.t1 = s1.t;
        row.t2 = s2.t;
        double slack = 10 * solver_tol * std::max(1.0, norm_inf(mask, s2.p));
        row.monotonicity_violations = count_decreases(mask, s1.p, s2.p, slack);
        double dmax = 0.0, area2 = 0.0;
        for (int c = 0; c < g.cells(); ++c)
            if (mask.fluid[c]) {
                dmax = std::max(dmax, std::abs(s2.p.values[c] - s1.p.values[c]));
                if (s2.active[c]) area2 += g.h * g.h;
            }
        row.lipschitz_ratio = dmax / (s2.t - s1.t);
        row.area_ratio = area2 * std::exp(-s2.t) / area0;

        // Surface cells of D_{t1}: active cells with any non-active neighbor.
        std::vector<int> surface;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                int c = g.idx(i, j);
                if (!mask.fluid[c] || !s1.active[c]) continue;
                auto notact = [&](int ii, int jj) {
                    return !g.in_grid(ii, jj) || !s1.active[g.idx(ii, jj)];
                };
                if (notact(i - 1, j) || notact(i + 1, j) || notact(i, j - 1) ||
                    notact(i, j + 1))
                    surface.push_back(c);
            }
        double rho = 0.0;
        for (int c = 0; c < g.cells(); ++c) {
            if (!mask.fluid[c] || !s2.active[c] || s1.active[c]) continue;
            double best = std::numeric_limits<double>::infinity();
            for (int d : surface) best = std::min(best, cell_dist(g, c, d));
            rho = std::max(rho, best);
        }
        row.containment_radius = rho;
        rows.push_back(row);
    }
    return rows;
}

StarShapeResult star_shape_check(const ObstacleState& state, const DomainMask& mask,
                                 double center_x, double center_y, double r) {
    const GridSpec& g = mask.grid;
    StarShapeResult res;

    auto active_at = [&](double x, double y) {
        int i = static_cast<int>(std::floor((x - g.ox) / g.h));
        int j = static_cast<int>(std::floor((y - g.oy) / g.h));
        if (!g.in_grid(i, j)) return false;
        return state.active[g.idx(i, j)] != 0;
    };

    // Sample anchor points: center plus a ring of radius r.
    std::vector<std::pair<double, double>> anchors{{center_x, center_y}};
    for (int k = 0; k < 16; ++k) {
        double a = 2 * M_PI * k / 16;
        anchors.emplace_back(center_x + r * std::cos(a), center_y + r * std::sin(a));
    }

    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int c = g.idx(i, j);
            if (!mask.fluid[c] || !state.active[c]) continue;
            double x = g.cx(i), y = g.cy(j);
            bool blocked = false;
            for (auto [ax, ay] : anchors) {
                double len = std::hypot(x - ax, y - ay);
                int steps = static_cast<int>(std::ceil(len / (g.h / 2)));
                for (int s = 0; s < steps - 1 && !blocked; ++s) {
                    double t = static_cast<double>(s) / steps;
                    // Skip the quantization zone near the cell itself.
                    if ((1 - t) * len < g.h) continue;
                    if (!active_at(ax + t * (x - ax), ay + t * (y - ay))) blocked = true;
                }
                if (blocked) break;
            }
            if (!blocked) continue;
            ++res.violations;
            // Within one cell layer of the active-set boundary?
            bool boundary_layer = false;
            for (int dj = -1; dj <= 1 && !boundary_layer; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    int ii = i + di, jj = j + dj;
                    if (!g.in_grid(ii, jj) || !state.active[g.idx(ii, jj)]) {
                        boundary_layer = true;
                        break;
                    }
                }
            if (!boundary_layer) ++res.interior_violations;
        }
    res.pass = res.interior_violations == 0;
    return res;
}

} // namespace perchs
