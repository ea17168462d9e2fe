#include "perchs/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace perchs {

namespace {

double ball_dist(const GridSpec& g, int i, int j, int ci, int cj) {
    double dx = (i - ci) * g.h, dy = (j - cj) * g.h;
    return std::hypot(dx, dy);
}

} // namespace

EllipticOperator::EllipticOperator(const DomainMask& mask, const EffectiveTensor* tensor,
                                   const std::vector<std::uint8_t>* pinned)
    : mask_(&mask) {
    const GridSpec& g = mask.grid;
    if (tensor) {
        tensor->validate();
        tensor_ = *tensor;
        anisotropic_ = true;
        for (int c = 0; c < g.cells(); ++c)
            if (!mask.fluid[c])
                throw std::invalid_argument(
                    "EllipticOperator: anisotropic operator requires an all-fluid mask");
    }
    unknown_.assign(g.cells(), 0);
    diag_.assign(g.cells(), 0.0);
    const double ih2 = 1.0 / (g.h * g.h);
    const double a11 = anisotropic_ ? tensor_.a11 : 1.0;
    const double a22 = anisotropic_ ? tensor_.a22 : 1.0;
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            int c = g.idx(i, j);
            if (!mask.fluid[c]) continue;
            unknown_[c] = !(pinned && (*pinned)[c]);
            if (!unknown_[c]) has_dirichlet_ = true;
            double d = 0.0;
            bool rim_dirichlet = mask.outer_dirichlet[c] != 0;
            // x faces
            if (i > 0 && mask.open_x[mask.xface(i - 1, j)]) d += a11 * ih2;
            else if (i == 0 && rim_dirichlet) d += 2 * a11 * ih2;
            if (i + 1 < g.nx && mask.open_x[mask.xface(i, j)]) d += a11 * ih2;
            else if (i + 1 == g.nx && rim_dirichlet) d += 2 * a11 * ih2;
            // y faces
            if (j > 0 && mask.open_y[mask.yface(i, j - 1)]) d += a22 * ih2;
            else if (j == 0 && rim_dirichlet) d += 2 * a22 * ih2;
            if (j + 1 < g.ny && mask.open_y[mask.yface(i, j)]) d += a22 * ih2;
            else if (j + 1 == g.ny && rim_dirichlet) d += 2 * a22 * ih2;
            diag_[c] = d;
            if (rim_dirichlet && (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1))
                has_dirichlet_ = true;
        }
    }
}

double EllipticOperator::offdiag_apply(const std::vector<double>& x, int i, int j) const {
    const DomainMask& m = *mask_;
    const GridSpec& g = m.grid;
    const double ih2 = 1.0 / (g.h * g.h);
    const double a11 = anisotropic_ ? tensor_.a11 : 1.0;
    const double a22 = anisotropic_ ? tensor_.a22 : 1.0;
    double s = 0.0;
    auto val = [&](int ii, int jj) {
        int n = g.idx(ii, jj);
        return unknown_[n] ? x[n] : 0.0;
    };
    if (i > 0 && m.open_x[m.xface(i - 1, j)]) s -= a11 * ih2 * val(i - 1, j);
    if (i + 1 < g.nx && m.open_x[m.xface(i, j)]) s -= a11 * ih2 * val(i + 1, j);
    if (j > 0 && m.open_y[m.yface(i, j - 1)]) s -= a22 * ih2 * val(i, j - 1);
    if (j + 1 < g.ny && m.open_y[m.yface(i, j)]) s -= a22 * ih2 * val(i, j + 1);
    if (anisotropic_ && tensor_.a12 != 0.0) {
        const double cx = tensor_.a12 * ih2 / 2;
        if (i + 1 < g.nx && j + 1 < g.ny) s -= cx * val(i + 1, j + 1);
        if (i > 0 && j > 0) s -= cx * val(i - 1, j - 1);
        if (i > 0 && j + 1 < g.ny) s += cx * val(i - 1, j + 1);
        if (i + 1 < g.nx && j > 0) s += cx * val(i + 1, j - 1);
    }
    return s;
}

void EllipticOperator::apply(const std::vector<double>& x, std::vector<double>& y) const {
    const GridSpec& g = mask_->grid;
    y.assign(g.cells(), 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int c = g.idx(i, j);
            if (!unknown_[c]) continue;
            y[c] = diag_[c] * x[c] + offdiag_apply(x, i, j);
        }
}

double EllipticOperator::sor_sweep(std::vector<double>& x, const std::vector<double>& b,
                                   double omega, bool project, double* max_abs_x) const {
    const GridSpec& g = mask_->grid;
    double max_update = 0.0, max_x = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int c = g.idx(i, j);
            if (!unknown_[c]) continue;
            double gs = (b[c] - offdiag_apply(x, i, j)) / diag_[c];
            double xn = x[c] + omega * (gs - x[c]);
            if (project && xn < 0.0) xn = 0.0;
            max_update = std::max(max_update, std::abs(xn - x[c]));
            x[c] = xn;
            max_x = std::max(max_x, std::abs(xn));
        }
    if (max_abs_x) *max_abs_x = max_x;
    return max_update;
}

namespace {

// Sum, l2 norm, dot over unknown cells.
double masked_dot(const std::vector<std::uint8_t>& u, const std::vector<double>& a,
                  const std::vector<double>& b) {
    double s = 0.0;
    for (size_t c = 0; c < u.size(); ++c)
        if (u[c]) s += a[c] * b[c];
    return s;
}

void project_mean(const std::vector<std::uint8_t>& u, std::vector<double>& v) {
    double s = 0.0;
    long n = 0;
    for (size_t c = 0; c < u.size(); ++c)
        if (u[c]) {
            s += v[c];
            ++n;
        }
    if (n == 0) return;
    double m = s / n;
    for (size_t c = 0; c < u.size(); ++c)
        if (u[c]) v[c] -= m;
}

void solve_system(const EllipticOperator& op, const std::vector<double>& b,
                  std::vector<double>& x, const SolverConfig& cfg) {
    const auto& u = op.unknowns();
    const bool singular = !op.has_dirichlet();
    double bnorm = std::sqrt(masked_dot(u, b, b));
    if (bnorm == 0.0) {
        for (size_t c = 0; c < u.size(); ++c)
            if (u[c]) x[c] = 0.0;
        return;
    }

    if (cfg.method == SolveMethod::SOR) {
        const GridSpec& g = op.mask().grid;
        std::vector<double> r(g.cells(), 0.0);
        for (int it = 0; it < cfg.max_iter; ++it) {
            op.sor_sweep(x, b, cfg.relaxation, false);
            if (singular) project_mean(u, x);
            if (it % 20 == 19 || it + 1 == cfg.max_iter) {
                op.apply(x, r);
                double rn = 0.0;
                for (size_t c = 0; c < u.size(); ++c)
                    if (u[c]) rn += (b[c] - r[c]) * (b[c] - r[c]);
                if (std::sqrt(rn) <= cfg.tol * bnorm) return;
            }
        }
        throw SolverError("solve: no-convergence (SOR hit max_iter)");
    }

    // Jacobi-preconditioned CG.
    size_t n = u.size();
    std::vector<double> r(b), z(n, 0.0), p(n, 0.0), Ap(n, 0.0);
    for (size_t c = 0; c < n; ++c)
        if (!u[c]) r[c] = 0.0;
    if (singular) project_mean(u, r);
    for (size_t c = 0; c < n; ++c)
        if (u[c]) z[c] = r[c] / op.diag(c);
    if (singular) project_mean(u, z);
    p = z;
    double rz = masked_dot(u, r, z);
    for (int it = 0; it < cfg.max_iter; ++it) {
        op.apply(p, Ap);
        double pAp = masked_dot(u, p, Ap);
        if (pAp <= 0.0) throw SolverError("solve: singular-system (CG breakdown)");
        double alpha = rz / pAp;
        for (size_t c = 0; c < n; ++c)
            if (u[c]) {
                x[c] += alpha * p[c];
                r[c] -= alpha * Ap[c];
            }
        if (singular) project_mean(u, r);
        double rn = std::sqrt(masked_dot(u, r, r));
        if (rn <= cfg.tol * bnorm) {
            if (singular) project_mean(u, x);
            return;
        }
        for (size_t c = 0; c < n; ++c)
            if (u[c]) z[c] = r[c] / op.diag(c);
        if (singular) project_mean(u, z);
        double rz_new = masked_dot(u, r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (size_t c = 0; c < n; ++c)
            if (u[c]) p[c] = z[c] + beta * p[c];
    }
    throw SolverError("solve: no-convergence (CG hit max_iter)");
}

} // namespace

ScalarField apply_operator(const DomainMask& mask, const ScalarField& x,
                           const EffectiveTensor* tensor) {
    if (!same_grid(mask.grid, x.grid))
        throw std::invalid_argument("apply_operator: grid mismatch");
    EllipticOperator op(mask, tensor);
    std::vector<double> in(x.values), out;
    for (int c = 0; c < mask.grid.cells(); ++c)
        if (!mask.fluid[c]) in[c] = 0.0;
    op.apply(in, out);
    ScalarField y = make_field(mask);
    for (int c = 0; c < mask.grid.cells(); ++c)
        if (mask.fluid[c]) y.values[c] = out[c];
    return y;
}

ScalarField solve_constrained(const DomainMask& mask, const ScalarField& rhs,
                              const SolverConfig& cfg, const EffectiveTensor* tensor,
                              const std::vector<std::uint8_t>* pinned,
                              const ScalarField* pinned_values) {
    cfg.validate();
    if (!same_grid(mask.grid, rhs.grid))
        throw std::invalid_argument("solve_constrained: grid mismatch");
    const GridSpec& g = mask.grid;
    EllipticOperator op(mask, tensor, pinned);

    // Move pinned values to the right-hand side via the unpinned operator.
    std::vector<double> b(g.cells(), 0.0);
    for (int c = 0; c < g.cells(); ++c)
        if (op.is_unknown(c)) b[c] = rhs.values[c];
    std::vector<double> fixed(g.cells(), 0.0);
    bool any_fixed = false;
    if (pinned && pinned_values) {
        for (int c = 0; c < g.cells(); ++c)
            if (mask.fluid[c] && (*pinned)[c] && (*pinned_values).values[c] != 0.0) {
                fixed[c] = (*pinned_values).values[c];
                any_fixed = true;
            }
    }
    if (any_fixed) {
        EllipticOperator full(mask, tensor);
        std::vector<double> lf;
        full.apply(fixed, lf);
        for (int c = 0; c < g.cells(); ++c)
            if (op.is_unknown(c)) b[c] -= lf[c];
    }

    if (!op.has_dirichlet()) {
        double total = 0.0, scale = 0.0;
        for (int c = 0; c < g.cells(); ++c)
            if (mask.fluid[c]) {
                total += b[c];
                scale += std::abs(b[c]);
            }
        if (std::abs(total) > 1e-10 * std::max(scale, 1e-300) && scale > 0.0)
            throw SolverError("solve: singular-system (pure Neumann, nonzero-mean rhs)");
        // Enforce exact compatibility against round-off.
        long n = 0;
        for (int c = 0; c < g.cells(); ++c) n += mask.fluid[c] ? 1 : 0;
        for (int c = 0; c < g.cells(); ++c)
            if (mask.fluid[c]) b[c] -= total / n;
    }

    std::vector<double> x(g.cells(), 0.0);
    solve_system(op, b, x, cfg);

    ScalarField out = make_field(mask);
    for (int c = 0; c < g.cells(); ++c) {
        if (!mask.fluid[c]) continue;
        out.values[c] = op.is_unknown(c) ? x[c] : fixed[c];
    }
    return out;
}

ScalarField solve_poisson(const DomainMask& mask, const ScalarField& rhs,
                          const SolverConfig& cfg, const EffectiveTensor* tensor) {
    return solve_constrained(mask, rhs, cfg, tensor);
}

ScalarField greens_function(const DomainMask& mask, int iy, int jy,
                            const SolverConfig& cfg) {
    const GridSpec& g = mask.grid;
    if (!g.in_grid(iy, jy) || !mask.is_fluid(iy, jy))
        throw std::invalid_argument("greens_function: source cell is not fluid");
    ScalarField rhs = make_field(mask);
    rhs.at(iy, jy) = 1.0 / (g.h * g.h);
    EllipticOperator probe(mask);
    if (!probe.has_dirichlet())
        throw std::invalid_argument("greens_function: mask has no outer Dirichlet boundary");
    return solve_poisson(mask, rhs, cfg);
}

ScalarField harmonic_in_ball(const DomainMask& mask, int ci, int cj, double r,
                             const std::function<double(double, double)>& boundary_data,
                             const SolverConfig& cfg) {
    const GridSpec& g = mask.grid;
    std::vector<std::uint8_t> pinned(g.cells(), 0);
    ScalarField vals = make_field(mask);
    int interior = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            int c = g.idx(i, j);
            if (!mask.fluid[c]) continue;
            if (ball_dist(g, i, j, ci, cj) >= r) {
                pinned[c] = 1;
                vals.values[c] = boundary_data(g.cx(i), g.cy(j));
            } else {
                ++interior;
            }
        }
    if (interior == 0)
        throw std::invalid_argument("harmonic_in_ball: empty fluid intersection");
    ScalarField rhs = make_field(mask);
    return solve_constrained(mask, rhs, cfg, nullptr, &pinned, &vals);
}

std::vector<double> harnack_probe(const DomainMask& mask, int ci, int cj,
                                  const std::vector<double>& radii,
                                  const SolverConfig& cfg) {
    const GridSpec& g = mask.grid;
    const double cy = g.cy(cj);
    std::vector<double> out;
    for (double r : radii) {
        ScalarField v = harmonic_in_ball(
            mask, ci, cj, r, [&](double, double y) { return y >= cy ? 1.0 : 0.1; }, cfg);
        double sup = -std::numeric_limits<double>::infinity();
        double inf = std::numeric_limits<double>::infinity();
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                int c = g.idx(i, j);
                if (!mask.fluid[c] || ball_dist(g, i, j, ci, cj) >= r / 2) continue;
                sup = std::max(sup, v.values[c]);
                inf = std::min(inf, v.values[c]);
            }
        if (!(inf < std::numeric_limits<double>::infinity()))
            throw std::invalid_argument("harnack_probe: empty fluid intersection");
        out.push_back(sup / inf);
    }
    return out;
}

std::vector<double> holder_probe(const DomainMask& mask, int ci, int cj, double r,
                                 int levels, const SolverConfig& cfg) {
    const GridSpec& g = mask.grid;
    const double cy = g.cy(cj);
    ScalarField v = harmonic_in_ball(
        mask, ci, cj, r, [&](double, double y) { return (y - cy) / r; }, cfg);
    std::vector<double> osc(levels + 1, 0.0);
    for (int k = 0; k <= levels; ++k) {
        double rk = r / std::pow(2.0, k);
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                int c = g.idx(i, j);
                if (!mask.fluid[c] || ball_dist(g, i, j, ci, cj) >= rk) continue;
                lo = std::min(lo, v.values[c]);
                hi = std::max(hi, v.values[c]);
            }
        if (!(lo < hi) && !(lo == hi)) throw std::invalid_argument("holder_probe: empty ball");
        osc[k] = hi - lo;
    }
    std::vector<double> ratios;
    for (int k = 1; k <= levels; ++k) {
        if (osc[k - 1] <= 1e-300)
            ratios.push_back(std::numeric_limits<double>::quiet_NaN());
        else
            ratios.push_back(osc[k] / osc[k - 1]);
    }
    return ratios;
}

} // namespace perchs
