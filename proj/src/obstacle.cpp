#include "perchs/obstacle.hpp"

#include <algorithm>
#include <cmath>

namespace perchs {

double activation_threshold(double p_max) { return 1e-12 * std::max(1.0, p_max); }

namespace {

struct Window {
    int i0, i1, j0, j1; // inclusive
    bool whole(const GridSpec& g) const {
        return i0 == 0 && j0 == 0 && i1 == g.nx - 1 && j1 == g.ny - 1;
    }
};

Window support_window(const GridSpec& g, const std::vector<double>& load,
                      const std::vector<double>& guess, int margin) {
    int i0 = g.nx, i1 = -1, j0 = g.ny, j1 = -1;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int c = g.idx(i, j);
            if (load[c] > 0.0 || guess[c] > 0.0) {
                i0 = std::min(i0, i);
                i1 = std::max(i1, i);
                j0 = std::min(j0, j);
                j1 = std::max(j1, j);
            }
        }
    if (i1 < 0) return {0, -1, 0, -1}; // empty
    i0 = std::max(0, i0 - margin);
    j0 = std::max(0, j0 - margin);
    i1 = std::min(g.nx - 1, i1 + margin);
    j1 = std::min(g.ny - 1, j1 + margin);
    return {i0, i1, j0, j1};
}

bool positive_on_rim(const GridSpec& g, const std::vector<double>& p, const Window& w,
                     double thresh) {
    for (int i = w.i0; i <= w.i1; ++i)
        if ((w.j0 > 0 && p[g.idx(i, w.j0)] > thresh) ||
            (w.j1 < g.ny - 1 && p[g.idx(i, w.j1)] > thresh))
            return true;
    for (int j = w.j0; j <= w.j1; ++j)
        if ((w.i0 > 0 && p[g.idx(w.i0, j)] > thresh) ||
            (w.i1 < g.nx - 1 && p[g.idx(w.i1, j)] > thresh))
            return true;
    return false;
}

} // namespace

ObstacleSolution solve_obstacle(const DomainMask& mask, const ScalarField& load,
                                const SolverConfig& cfg, const EffectiveTensor* tensor,
                                const ScalarField* initial_guess) {
    cfg.validate();
    if (!same_grid(mask.grid, load.grid))
        throw std::invalid_argument("solve_obstacle: grid mismatch");
    const GridSpec& g = mask.grid;
    EllipticOperator op(mask, tensor);

    std::vector<double> f(g.cells(), 0.0);
    double load_inf = 0.0;
    for (int c = 0; c < g.cells(); ++c)
        if (mask.fluid[c]) {
            f[c] = load.values[c];
            load_inf = std::max(load_inf, std::abs(f[c]));
        }

    if (!op.has_dirichlet()) {
        double total = 0.0;
        for (int c = 0; c < g.cells(); ++c)
            if (mask.fluid[c]) total += f[c];
        if (total > 0.0)
            throw SolverError("solve_obstacle: unbounded-below (pure Neumann, positive net load)");
    }

    std::vector<double> p(g.cells(), 0.0);
    if (initial_guess) {
        for (int c = 0; c < g.cells(); ++c)
            if (mask.fluid[c] && op.is_unknown(c))
                p[c] = std::max(0.0, initial_guess->values[c]);
    }

    const double omega = std::min(cfg.relaxation, 1.95);
    int margin = 6;
    Window w = support_window(g, f, p, margin);
    int sweeps = 0;
    if (w.i1 >= w.i0) {
        for (;;) {
            double pmax = 0.0;
            bool converged = false;
            while (sweeps < cfg.max_iter) {
                double max_update = 0.0;
                pmax = 0.0;
                for (int j = w.j0; j <= w.j1; ++j)
                    for (int i = w.i0; i <= w.i1; ++i) {
                        int c = g.idx(i, j);
                        if (!op.is_unknown(c)) continue;
                        double gs = (f[c] - op.offdiag_apply(p, i, j)) / op.diag(c);
                        double pn = p[c] + omega * (gs - p[c]);
                        if (pn < 0.0) pn = 0.0;
                        max_update = std::max(max_update, std::abs(pn - p[c]));
                        p[c] = pn;
                        pmax = std::max(pmax, pn);
                    }
                ++sweeps;
                if (max_update < cfg.tol * std::max(1.0, pmax)) {
                    converged = true;
                    break;
                }
            }
            if (!converged)
                throw SolverError("solve_obstacle: no-convergence (hit max_iter)");
            if (w.whole(g) || !positive_on_rim(g, p, w, activation_threshold(pmax)))
                break;
            margin *= 2;
            w = support_window(g, f, p, margin);
        }
    }

    ObstacleSolution sol;
    sol.p = make_field(mask);
    for (int c = 0; c < g.cells(); ++c)
        if (mask.fluid[c]) sol.p.values[c] = p[c];
    double pmax = norm_inf(mask, sol.p);
    double thresh = activation_threshold(pmax);
    sol.active.assign(g.cells(), 0);
    for (int c = 0; c < g.cells(); ++c)
        if (mask.fluid[c] && p[c] > thresh) sol.active[c] = 1;
    sol.residual_stats = complementarity_report(mask, sol, load, tensor);
    sol.residual_stats.iterations = sweeps;
    return sol;
}

ComplementarityStats complementarity_report(const DomainMask& mask,
                                            const ObstacleSolution& sol,
                                            const ScalarField& load,
                                            const EffectiveTensor* tensor) {
    ComplementarityStats st;
    ScalarField lp = apply_operator(mask, sol.p, tensor);
    st.min_inactive_residual = std::numeric_limits<double>::infinity();
    bool any_inactive = false;
    double pmax = norm_inf(mask, sol.p);
    double thresh = activation_threshold(pmax);
    for (int c = 0; c < mask.grid.cells(); ++c) {
        if (!mask.fluid[c]) continue;
        double r = lp.values[c] - load.values[c];
        st.max_negative_p = std::min(st.max_negative_p, sol.p.values[c]);
        if (sol.p.values[c] > thresh) {
            st.max_active_residual = std::max(st.max_active_residual, std::abs(r));
        } else {
            any_inactive = true;
            st.min_inactive_residual = std::min(st.min_inactive_residual, r);
        }
    }
    if (!any_inactive) st.min_inactive_residual = 0.0;
    st.max_negative_p = -std::min(0.0, st.max_negative_p);
    return st;
}

} // namespace perchs
