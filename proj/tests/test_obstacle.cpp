#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "perchs/geometry.hpp"
#include "perchs/obstacle.hpp"

using namespace perchs;

namespace {

// Exact expanding-disc solution of the time-integrated problem with a unit
// initial disc: the positivity set at time t is the disc of radius e^{t/2},
//   p(r,t) = (e^t - 1 - r^2 t)/4                       for r <= 1,
//   p(r,t) = (e^t - r^2 - r^2 t + 2 r^2 log r)/4       for 1 <= r <= e^{t/2},
// and the load it solves against is -1 outside the unit disc plus the
// occupancy time tau(r,t) = min(t, t - 2 log r)^+.
double radial_p(double r, double t) {
    double R = std::exp(t / 2);
    if (r >= R) return 0.0;
    if (r <= 1.0) return (std::exp(t) - 1.0 - r * r * t) / 4;
    return (std::exp(t) - r * r - r * r * t + 2 * r * r * std::log(r)) / 4;
}

double radial_tau(double r, double t) {
    if (r <= 1.0) return t;
    double v = t - 2 * std::log(r);
    return v > 0 ? v : 0.0;
}

ScalarField radial_load(const DomainMask& m, double t) {
    ScalarField f = make_field(m);
    const GridSpec& g = m.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            if (!m.is_fluid(i, j)) continue;
            double r = std::hypot(g.cx(i), g.cy(j));
            f.at(i, j) = (r <= 1.0 ? 0.0 : -1.0) + radial_tau(r, t);
        }
    return f;
}

} // namespace

TEST_CASE("expanding-disc load reproduces the analytic solution and radius") {
    GridSpec g{256, 256, 1.0 / 32, -4.0, -4.0};
    DomainMask m = all_fluid_mask(g);
    const double t = 1.0;
    ScalarField load = radial_load(m, t);
    SolverConfig cfg;
    cfg.tol = 1e-9;
    ObstacleSolution sol = solve_obstacle(m, load, cfg);

    double perr = 0.0, pmax = 0.0;
    double rmax = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double r = std::hypot(g.cx(i), g.cy(j));
            double exact = radial_p(r, t);
            pmax = std::max(pmax, exact);
            perr = std::max(perr, std::abs(sol.p.at(i, j) - exact));
            if (sol.active[g.idx(i, j)]) rmax = std::max(rmax, r);
        }
    CHECK(perr <= 0.03 * pmax);
    CHECK(rmax == doctest::Approx(std::exp(0.5)).epsilon(0.03));
    CHECK(sol.p.at(128, 128) == doctest::Approx((std::exp(1.0) - 1.0) / 4).epsilon(0.03));
}

TEST_CASE("complementarity holds at the solver tolerance") {
    GridSpec g{128, 128, 1.0 / 16, -4.0, -4.0};
    DomainMask m = all_fluid_mask(g);
    ScalarField load = radial_load(m, 0.75);
    SolverConfig cfg;
    ObstacleSolution sol = solve_obstacle(m, load, cfg);
    CHECK(sol.residual_stats.max_negative_p == 0.0);
    CHECK(sol.residual_stats.max_active_residual <= 1e-5);
    CHECK(sol.residual_stats.min_inactive_residual >= -1e-8);
}

TEST_CASE("solution is monotone in the load") {
    GridSpec g{96, 96, 1.0 / 16, -3.0, -3.0};
    DomainMask m = all_fluid_mask(g);
    SolverConfig cfg;
    ScalarField f1 = radial_load(m, 0.5);
    ScalarField f2 = radial_load(m, 0.8); // pointwise larger
    ObstacleSolution a = solve_obstacle(m, f1, cfg);
    ObstacleSolution b = solve_obstacle(m, f2, cfg);
    double slack = 10 * cfg.tol * std::max(1.0, norm_inf(m, b.p));
    for (int c = 0; c < g.cells(); ++c)
        CHECK(b.p.values[c] >= a.p.values[c] - slack);
}

TEST_CASE("solution is independent of the initial guess") {
    GridSpec g{96, 96, 1.0 / 16, -3.0, -3.0};
    DomainMask m = all_fluid_mask(g);
    SolverConfig cfg;
    ScalarField load = radial_load(m, 0.6);
    ObstacleSolution cold = solve_obstacle(m, load, cfg);
    ScalarField guess = make_field(m, 0.7); // far too large everywhere
    ObstacleSolution warm = solve_obstacle(m, load, cfg, nullptr, &guess);
    double slack = 10 * cfg.tol * std::max(1.0, norm_inf(m, cold.p));
    for (int c = 0; c < g.cells(); ++c)
        CHECK(std::abs(warm.p.values[c] - cold.p.values[c]) <= slack);
}

TEST_CASE("nonpositive load gives the zero solution") {
    GridSpec g{32, 32, 1.0 / 8, -2.0, -2.0};
    DomainMask m = all_fluid_mask(g);
    SolverConfig cfg;
    ScalarField load = make_field(m, -1.0);
    ObstacleSolution sol = solve_obstacle(m, load, cfg);
    CHECK(norm_inf(m, sol.p) == 0.0);
    for (auto a : sol.active) CHECK(a == 0);
}

TEST_CASE("pure-Neumann domains reject loads with positive total mass") {
    GridSpec g{32, 32, 1.0 / 8, -2.0, -2.0};
    DomainMask m = all_fluid_mask(g, false);
    SolverConfig cfg;
    ScalarField load = make_field(m, 0.25);
    CHECK_THROWS_WITH_AS(solve_obstacle(m, load, cfg), doctest::Contains("unbounded-below"),
                         SolverError);
}

TEST_CASE("solution stays inside any supersolution ceiling") {
    // With load <= 1 on a disc, p is dominated by the unconstrained solve of
    // the positive part of the load (energy comparison).
    GridSpec g{96, 96, 1.0 / 16, -3.0, -3.0};
    DomainMask m = all_fluid_mask(g);
    SolverConfig cfg;
    ScalarField load = radial_load(m, 0.5);
    ObstacleSolution sol = solve_obstacle(m, load, cfg);
    ScalarField pos = make_field(m);
    for (int c = 0; c < g.cells(); ++c)
        pos.values[c] = std::max(0.0, load.values[c]);
    ScalarField ceiling = solve_poisson(m, pos, cfg);
    double slack = 10 * cfg.tol * std::max(1.0, norm_inf(m, ceiling));
    for (int c = 0; c < g.cells(); ++c)
        CHECK(sol.p.values[c] <= ceiling.values[c] + slack);
}

TEST_CASE("perforated domain: obstacle solve respects walls and positivity") {
    PerforationModel pm{PerforationKind::SquareSite, 0.5, 1.0, 0.25, 2};
    GridSpec g{128, 128, 1.0 / 32, -2.0, -2.0};
    DomainMask m = generate_domain(pm, g);
    ScalarField load = radial_load(m, 0.5);
    SolverConfig cfg;
    ObstacleSolution sol = solve_obstacle(m, load, cfg);
    CHECK(sol.residual_stats.max_negative_p == 0.0);
    CHECK(sol.residual_stats.max_active_residual <= 1e-5);
    CHECK(norm_inf(m, sol.p) > 0.0);
}
