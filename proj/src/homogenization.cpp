#include "perchs/homogenization.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace perchs {

namespace {

constexpr double kRow = 0.8660254037844386; // sqrt(3)/2

std::int64_t imod(std::int64_t k, std::int64_t m) { return ((k % m) + m) % m; }

// Periodic masked Laplacian y = L x over fluid cells (wraparound faces).
void apply_periodic(const DomainMask& m, const std::vector<double>& x,
                    std::vector<double>& y) {
    const GridSpec& g = m.grid;
    const double ih2 = 1.0 / (g.h * g.h);
    y.assign(g.cells(), 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int c = g.idx(i, j);
            if (!m.fluid[c]) continue;
            double acc = 0.0;
            auto face = [&](int ni, int nj) {
                int n = g.idx(imod(ni, g.nx), imod(nj, g.ny));
                if (m.fluid[n]) acc += ih2 * (x[c] - x[n]);
            };
            face(i - 1, j);
            face(i + 1, j);
            face(i, j - 1);
            face(i, j + 1);
            y[c] = acc;
        }
}

int periodic_components(const DomainMask& m) {
    const GridSpec& g = m.grid;
    std::vector<std::uint8_t> seen(g.cells(), 0);
    int comps = 0;
    std::queue<int> q;
    for (int start = 0; start < g.cells(); ++start) {
        if (!m.fluid[start] || seen[start]) continue;
        ++comps;
        seen[start] = 1;
        q.push(start);
        while (!q.empty()) {
            int c = q.front();
            q.pop();
            int i = c % g.nx, j = c / g.nx;
            auto visit = [&](int ni, int nj) {
                int n = g.idx(static_cast<int>(imod(ni, g.nx)),
                              static_cast<int>(imod(nj, g.ny)));
                if (m.fluid[n] && !seen[n]) {
                    seen[n] = 1;
                    q.push(n);
                }
            };
            visit(i - 1, j);
            visit(i + 1, j);
            visit(i, j - 1);
            visit(i, j + 1);
        }
    }
    return comps;
}

void project_fluid_mean(const DomainMask& m, std::vector<double>& v) {
    double s = 0.0;
    long n = 0;
    for (int c = 0; c < m.grid.cells(); ++c)
        if (m.fluid[c]) {
            s += v[c];
            ++n;
        }
    double mean = s / n;
    for (int c = 0; c < m.grid.cells(); ++c)
        if (m.fluid[c]) v[c] -= mean;
}

} // namespace

DomainMask periodic_cell_mask(const PerforationModel& model, int cells_per_period,
                              int n_periods) {
    model.validate();
    if (cells_per_period < 4)
        throw std::invalid_argument("periodic_cell_mask: need >= 4 cells per period");
    if (n_periods < 1) throw std::invalid_argument("periodic_cell_mask: n_periods >= 1");

    const double P = model.period;
    const double h = P / cells_per_period;
    GridSpec g;
    g.h = h;
    g.nx = n_periods * cells_per_period;
    g.ox = 0.0;
    g.oy = 0.0;

    int rows = 0;
    double ry = P;
    if (model.kind == PerforationKind::TriangularSite) {
        rows = std::max(2, 2 * static_cast<int>(std::llround(n_periods / (2 * kRow))));
        g.ny = std::max(4, static_cast<int>(std::llround(rows * kRow * cells_per_period)));
        ry = g.ny * h / rows; // slightly distorted row spacing to land on the grid
    } else {
        g.ny = g.nx;
        rows = n_periods;
    }

    DomainMask mask;
    mask.grid = g;
    mask.fluid.assign(g.cells(), 1);
    mask.outer_dirichlet.assign(g.cells(), 0);

    if (model.kind != PerforationKind::None) {
        auto occupied = [&](std::int64_t kx, std::int64_t ky, std::uint32_t stream) {
            return site_uniform(model.seed, imod(kx, n_periods), imod(ky, rows), stream);
        };
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double x = g.cx(i), y = g.cy(j);
                bool solid = false;
                if (model.kind == PerforationKind::TriangularSite) {
                    std::int64_t ky0 = static_cast<std::int64_t>(std::floor(y / ry));
                    std::int64_t kx0 = static_cast<std::int64_t>(std::floor(x / P));
                    for (std::int64_t ky = ky0 - 1; ky <= ky0 + 1 && !solid; ++ky)
                        for (std::int64_t kx = kx0 - 2; kx <= kx0 + 1 && !solid; ++kx) {
                            if (occupied(kx, ky, 0) >= model.occupancy_prob) continue;
                            double sx = (kx + 0.5 + 0.5 * imod(ky, 2)) * P;
                            double sy = (ky + 0.5) * ry;
                            double rad = model.inclusion_scale * P / 2;
                            if ((x - sx) * (x - sx) + (y - sy) * (y - sy) <= rad * rad)
                                solid = true;
                        }
                } else {
                    std::int64_t kx = static_cast<std::int64_t>(std::floor(x / P));
                    std::int64_t ky = static_cast<std::int64_t>(std::floor(y / P));
                    if (occupied(kx, ky, 0) < model.occupancy_prob) {
                        double cx = (kx + 0.5) * P, cy = (ky + 0.5) * P;
                        double side = model.inclusion_scale * P;
                        if (model.kind == PerforationKind::Chessboard) {
                            double f = 0.5 + 0.5 * site_uniform(model.seed,
                                                                imod(kx, n_periods),
                                                                imod(ky, rows), 1);
                            double s2 = f * side;
                            double slack = (side - s2) / 2;
                            cx += slack * (2 * site_uniform(model.seed, imod(kx, n_periods),
                                                            imod(ky, rows), 2) -
                                           1);
                            cy += slack * (2 * site_uniform(model.seed, imod(kx, n_periods),
                                                            imod(ky, rows), 3) -
                                           1);
                            side = s2;
                        }
                        if (std::abs(x - cx) <= side / 2 && std::abs(y - cy) <= side / 2)
                            solid = true;
                    }
                }
                if (solid) mask.fluid[g.idx(i, j)] = 0;
            }
    }
    mask.rebuild_faces();
    if (periodic_components(mask) != 1)
        throw SolverError("periodic_cell_mask: fluid disconnected across periods");
    return mask;
}

CorrectorSolution solve_corrector(const DomainMask& mask, double xi_x, double xi_y,
                                  const SolverConfig& cfg) {
    cfg.validate();
    const GridSpec& g = mask.grid;
    const double h = g.h;

    // Right-hand side: -div(1_fluid xi) in finite-volume form.
    std::vector<double> b(g.cells(), 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int c = g.idx(i, j);
            if (!mask.fluid[c]) continue;
            auto open = [&](int ni, int nj) {
                return mask.fluid[g.idx(static_cast<int>(imod(ni, g.nx)),
                                        static_cast<int>(imod(nj, g.ny)))] != 0;
            };
            // b = div(1_fluid xi) in finite-volume form, one term per open face.
            double acc = 0.0;
            if (open(i - 1, j)) acc -= xi_x / h;
            if (open(i + 1, j)) acc += xi_x / h;
            if (open(i, j - 1)) acc -= xi_y / h;
            if (open(i, j + 1)) acc += xi_y / h;
            b[c] = acc;
        }

    // CG on the singular periodic system; constants projected out.
    std::vector<double> x(g.cells(), 0.0), r(b), z(g.cells(), 0.0), p(g.cells(), 0.0),
        Ap(g.cells(), 0.0);
    double bnorm = 0.0;
    for (int c = 0; c < g.cells(); ++c)
        if (mask.fluid[c]) bnorm += b[c] * b[c];
    bnorm = std::sqrt(bnorm);
    if (bnorm > 0.0) {
        project_fluid_mean(mask, r);
        z = r;
        p = z;
        double rz = 0.0;
        for (int c = 0; c < g.cells(); ++c)
            if (mask.fluid[c]) rz += r[c] * z[c];
        bool done = false;
        for (int it = 0; it < cfg.max_iter && !done; ++it) {
            apply_periodic(mask, p, Ap);
            double pAp = 0.0;
            for (int c = 0; c < g.cells(); ++c)
                if (mask.fluid[c]) pAp += p[c] * Ap[c];
            if (pAp <= 0.0) throw SolverError("solve_corrector: CG breakdown");
            double alpha = rz / pAp;
            double rn = 0.0;
            for (int c = 0; c < g.cells(); ++c)
                if (mask.fluid[c]) {
                    x[c] += alpha * p[c];
                    r[c] -= alpha * Ap[c];
                }
            project_fluid_mean(mask, r);
            for (int c = 0; c < g.cells(); ++c)
                if (mask.fluid[c]) rn += r[c] * r[c];
            rn = std::sqrt(rn);
            if (rn <= cfg.tol * bnorm) {
                done = true;
                break;
            }
            double rz_new = 0.0;
            for (int c = 0; c < g.cells(); ++c)
                if (mask.fluid[c]) rz_new += r[c] * r[c];
            double beta = rz_new / rz;
            rz = rz_new;
            for (int c = 0; c < g.cells(); ++c)
                if (mask.fluid[c]) p[c] = r[c] + beta * p[c];
        }
        if (!done) throw SolverError("solve_corrector: no-convergence");
        project_fluid_mean(mask, x);
    }

    CorrectorSolution sol;
    sol.xi_x = xi_x;
    sol.xi_y = xi_y;
    sol.chi = make_field(mask);
    for (int c = 0; c < g.cells(); ++c)
        if (mask.fluid[c]) sol.chi.values[c] = x[c];

    // Cell-average masked gradient of w = xi.x + chi via open faces;
    // every periodic face counted once.
    double fx = 0.0, fy = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int c = g.idx(i, j);
            if (!mask.fluid[c]) continue;
            int cr = g.idx((i + 1) % g.nx, j);
            int cu = g.idx(i, (j + 1) % g.ny);
            if (mask.fluid[cr]) fx += (x[cr] - x[c]) / h + xi_x;
            if (mask.fluid[cu]) fy += (x[cu] - x[c]) / h + xi_y;
        }
    sol.flux_x = fx / g.cells();
    sol.flux_y = fy / g.cells();
    return sol;
}

EffectiveTensorResult effective_tensor(const DomainMask& periodic_mask,
                                       const SolverConfig& cfg) {
    CorrectorSolution c1 = solve_corrector(periodic_mask, 1.0, 0.0, cfg);
    CorrectorSolution c2 = solve_corrector(periodic_mask, 0.0, 1.0, cfg);
    EffectiveTensorResult res;
    res.asymmetry = std::abs(c2.flux_x - c1.flux_y);
    res.tensor.a11 = c1.flux_x;
    res.tensor.a22 = c2.flux_y;
    res.tensor.a12 = (c1.flux_y + c2.flux_x) / 2;
    res.tensor.mu = volume_fraction(periodic_mask);
    return res;
}

EffectiveTensorResult effective_tensor_ensemble(const PerforationModel& model,
                                                int cells_per_period, int n_periods,
                                                const std::vector<std::uint64_t>& seeds,
                                                const SolverConfig& cfg) {
    if (seeds.empty()) throw std::invalid_argument("effective_tensor_ensemble: no seeds");
    EffectiveTensorResult acc;
    acc.tensor = {0, 0, 0, 0};
    for (auto s : seeds) {
        PerforationModel m = model;
        m.seed = s;
        EffectiveTensorResult r =
            effective_tensor(periodic_cell_mask(m, cells_per_period, n_periods), cfg);
        acc.tensor.a11 += r.tensor.a11;
        acc.tensor.a12 += r.tensor.a12;
        acc.tensor.a22 += r.tensor.a22;
        acc.tensor.mu += r.tensor.mu;
        acc.asymmetry = std::max(acc.asymmetry, r.asymmetry);
    }
    double n = static_cast<double>(seeds.size());
    acc.tensor.a11 /= n;
    acc.tensor.a12 /= n;
    acc.tensor.a22 /= n;
    acc.tensor.mu /= n;
    return acc;
}

std::vector<MetricsRecord> linear_homogenization_experiment(
    const PerforationModel& model, const std::vector<double>& eps_list, double rhs_value,
    const GridSpec& grid, const EffectiveTensor& tensor, const SolverConfig& cfg,
    const std::string& experiment_id) {
    if (eps_list.empty())
        throw std::invalid_argument("linear_homogenization_experiment: empty eps_list");

    DomainMask full = all_fluid_mask(grid);
    ScalarField rhs_h = make_field(full, tensor.mu * rhs_value);
    ScalarField u = solve_poisson(full, rhs_h, cfg, &tensor);
    double u_l2 = norm_l2(full, u);
    double u_inf = norm_inf(full, u);

    std::vector<MetricsRecord> out;
    for (double eps : eps_list) {
        if (eps < 4 * grid.h)
            throw std::invalid_argument("linear_homogenization_experiment: eps < 4h");
        PerforationModel m = model;
        m.period = eps;
        DomainMask mask = generate_domain(m, grid);
        ScalarField rhs = make_field(mask, rhs_value);
        ScalarField ue = solve_poisson(mask, rhs, cfg);
        double dl2 = 0.0, dinf = 0.0;
        for (int c = 0; c < grid.cells(); ++c)
            if (mask.fluid[c]) {
                double d = ue.values[c] - u.values[c];
                dl2 += d * d;
                dinf = std::max(dinf, std::abs(d));
            }
        dl2 = std::sqrt(dl2) * grid.h;
        out.push_back({experiment_id, eps, model.seed, 0.0, "l2_error", dl2 / u_l2});
        out.push_back({experiment_id, eps, model.seed, 0.0, "linf_error", dinf / u_inf});
    }
    return out;
}

void homogenized_evolution(const EffectiveTensor& tensor, const RegionSpec& d0, double T,
                           double dt, const GridSpec& grid, const SolverConfig& cfg,
                           StepMode mode,
                           const std::function<void(const ObstacleState&,
                                                    const StepReport&)>& on_step) {
    tensor.validate();
    DomainMask mask = all_fluid_mask(grid);
    ObstacleState state = init_state(mask, d0);
    evolve(state, mask, T, dt, mode, cfg, &tensor, on_step);
}

std::vector<MetricsRecord> heleshaw_convergence_experiment(
    const PerforationModel& model, const std::vector<double>& eps_list,
    const RegionSpec& d0, double T, double dt, const GridSpec& grid,
    const EffectiveTensor& tensor, const SolverConfig& cfg, StepMode mode,
    const std::string& experiment_id) {
    std::vector<MetricsRecord> out;
    DomainMask full = all_fluid_mask(grid);
    for (double eps : eps_list) {
        PerforationModel m = model;
        m.period = eps;
        DomainMask mask = generate_domain(m, grid);
        ObstacleState se = init_state(mask, d0);
        ObstacleState sh = init_state(full, d0);
        int nsteps = static_cast<int>(std::llround(T / dt));
        for (int k = 0; k < nsteps; ++k) {
            step(se, dt, mode, cfg, mask);
            step(sh, dt, mode, cfg, full, &tensor);
            double sup = 0.0;
            for (int c = 0; c < grid.cells(); ++c)
                if (mask.fluid[c]) sup = std::max(sup, std::abs(se.p.values[c] - sh.p.values[c]));
            out.push_back({experiment_id, eps, m.seed, se.t, "sup_norm_diff", sup});
            FreeBoundary fe = extract_free_boundary(se, mask);
            FreeBoundary fh = extract_free_boundary(sh, full);
            if (!fe.cells.empty() && !fh.cells.empty())
                out.push_back({experiment_id, eps, m.seed, se.t, "hausdorff",
                               hausdorff_distance(fe, fh, grid)});
        }
    }
    return out;
}

} // namespace perchs
