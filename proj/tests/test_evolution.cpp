#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "perchs/evolution.hpp"
#include "perchs/geometry.hpp"

using namespace perchs;

namespace {

GridSpec box(int n, double half) { return {n, n, 2 * half / n, -half, -half}; }

RegionSpec unit_disc() { return {RegionSpec::Shape::Disc, 0.0, 0.0, 1.0, {}}; }

double active_radius(const ObstacleState& s, const DomainMask& m) {
    const GridSpec& g = m.grid;
    double r = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (s.active[g.idx(i, j)]) r = std::max(r, std::hypot(g.cx(i), g.cy(j)));
    return r;
}

double active_area(const ObstacleState& s, const DomainMask& m) {
    double a = 0.0;
    for (int c = 0; c < m.grid.cells(); ++c)
        if (m.fluid[c] && s.active[c]) a += m.grid.h * m.grid.h;
    return a;
}

} // namespace

TEST_CASE("region containment tests") {
    RegionSpec disc = unit_disc();
    CHECK(disc.contains(0.5, 0.5));
    CHECK(!disc.contains(1.0, 1.0));
    RegionSpec tri{RegionSpec::Shape::Polygon, 0, 0, 0, {{0, 0}, {2, 0}, {0, 2}}};
    CHECK(tri.contains(0.5, 0.5));
    CHECK(!tri.contains(1.5, 1.5));
    CHECK(!tri.contains(-0.1, 0.5));
}

TEST_CASE("init_state rejects droplets that miss the fluid") {
    DomainMask m = all_fluid_mask(box(32, 2.0));
    RegionSpec far{RegionSpec::Shape::Disc, 10.0, 10.0, 0.5, {}};
    CHECK_THROWS_WITH_AS(init_state(m, far), doctest::Contains("empty-initial-set"),
                         std::invalid_argument);
    ObstacleState s = init_state(m, unit_disc());
    CHECK(s.t == 0.0);
    CHECK(active_area(s, m) == doctest::Approx(3.14159265).epsilon(0.05));
}

TEST_CASE("expanding disc: radius, center value, and area law") {
    DomainMask m = all_fluid_mask(box(128, 4.0)); // h = 1/16
    ObstacleState s = init_state(m, unit_disc());
    SolverConfig cfg;
    double area0 = active_area(s, m);
    int violations = 0;
    evolve(s, m, 1.0, 1.0 / 16, StepMode::FixedPoint, cfg, nullptr,
           [&](const ObstacleState& st, const StepReport& rep) {
               violations += rep.monotonicity_violations;
               CHECK(rep.inner_iterations <= 50);
               // Flux identity: area grows like e^t.
               CHECK(active_area(st, m) * std::exp(-st.t) ==
                     doctest::Approx(area0).epsilon(0.08));
           });
    CHECK(violations == 0);
    CHECK(s.t == doctest::Approx(1.0));
    CHECK(active_radius(s, m) == doctest::Approx(std::exp(0.5)).epsilon(0.06));
    CHECK(s.p.at(64, 64) == doctest::Approx((std::exp(1.0) - 1) / 4).epsilon(0.06));
}

TEST_CASE("explicit and fixed-point stepping agree to first order") {
    DomainMask m = all_fluid_mask(box(64, 2.0));
    SolverConfig cfg;
    ObstacleState a = init_state(m, unit_disc());
    ObstacleState b = init_state(m, unit_disc());
    evolve(a, m, 0.5, 1.0 / 32, StepMode::Explicit, cfg);
    evolve(b, m, 0.5, 1.0 / 32, StepMode::FixedPoint, cfg);
    double d = 0.0;
    for (int c = 0; c < m.grid.cells(); ++c)
        d = std::max(d, std::abs(a.p.values[c] - b.p.values[c]));
    CHECK(d <= 0.05 * norm_inf(m, b.p));
}

TEST_CASE("pressure recovery matches the discrete time derivative") {
    DomainMask m = all_fluid_mask(box(128, 4.0));
    SolverConfig cfg;
    const double dt = 1.0 / 32;
    ObstacleState s = init_state(m, unit_disc());
    evolve(s, m, 0.5, dt, StepMode::FixedPoint, cfg);
    ScalarField p_prev = s.p;
    std::vector<std::uint8_t> act_prev = s.active;
    step(s, dt, StepMode::FixedPoint, cfg, m);
    ScalarField u = recover_u(s, m, cfg);
    // u(center) for the expanding disc is e^t/4.
    CHECK(u.at(64, 64) == doctest::Approx(std::exp(s.t) / 4).epsilon(0.1));
    double derr = 0.0, umax = norm_inf(m, u);
    for (int c = 0; c < m.grid.cells(); ++c)
        if (m.fluid[c] && act_prev[c] && s.active[c]) {
            double du = (s.p.values[c] - p_prev.values[c]) / dt;
            derr = std::max(derr, std::abs(u.values[c] - du));
        }
    CHECK(derr <= 0.15 * umax);
}

TEST_CASE("free boundary extraction and Hausdorff distance") {
    DomainMask m = all_fluid_mask(box(64, 2.0));
    SolverConfig cfg;
    ObstacleState s = init_state(m, unit_disc());
    FreeBoundary f0 = extract_free_boundary(s, m);
    REQUIRE(!f0.cells.empty());
    CHECK(hausdorff_distance(f0, f0, m.grid) == 0.0);
    step(s, 1.0 / 8, StepMode::FixedPoint, cfg, m);
    FreeBoundary f1 = extract_free_boundary(s, m);
    double d = hausdorff_distance(f0, f1, m.grid);
    // One step of dt = 1/8 moves the radius by about e^{1/16} - 1 ~ 0.065.
    CHECK(d > 0.0);
    CHECK(d < 0.2);
    FreeBoundary empty;
    CHECK_THROWS_WITH_AS(hausdorff_distance(f0, empty, m.grid),
                         doctest::Contains("empty-input"), std::invalid_argument);
}

TEST_CASE("trajectory checks: monotone, Lipschitz in time, contained growth") {
    DomainMask m = all_fluid_mask(box(64, 2.0));
    SolverConfig cfg;
    ObstacleState s = init_state(m, unit_disc());
    std::vector<ObstacleState> traj{s};
    evolve(s, m, 0.5, 1.0 / 16, StepMode::FixedPoint, cfg, nullptr,
           [&](const ObstacleState& st, const StepReport&) { traj.push_back(st); });
    auto rows = evolution_checks(traj, m, cfg.tol);
    REQUIRE(rows.size() == traj.size() - 1);
    for (const auto& row : rows) {
        CHECK(row.monotonicity_violations == 0);
        CHECK(row.area_ratio == doctest::Approx(1.0).epsilon(0.08));
        // p grows at most like sup u per unit time.
        CHECK(row.lipschitz_ratio < 1.5 * std::exp(row.t2) / 4);
        CHECK(row.containment_radius < 0.25);
    }
}

TEST_CASE("star-shape check on a radial droplet") {
    DomainMask m = all_fluid_mask(box(64, 2.0));
    SolverConfig cfg;
    ObstacleState s = init_state(m, unit_disc());
    evolve(s, m, 0.5, 1.0 / 16, StepMode::FixedPoint, cfg);
    StarShapeResult res = star_shape_check(s, m, 0.0, 0.0, 0.25);
    CHECK(res.pass);
    // A deliberately broken active set fails: cut a slit through the droplet.
    ObstacleState broken = s;
    const GridSpec& g = m.grid;
    for (int i = 0; i < g.nx; ++i) {
        double x = g.cx(i);
        if (x > 0.4 && x < 1.1) {
            int j = g.ny / 2 + 3;
            broken.active[g.idx(i, j)] = 0;
        }
    }
    StarShapeResult bad = star_shape_check(broken, m, 0.0, 0.0, 0.25);
    CHECK(bad.violations > 0);
}

TEST_CASE("nondegeneracy: quadratic growth of p off the free boundary") {
    DomainMask m = all_fluid_mask(box(192, 4.0)); // h = 1/24
    SolverConfig cfg;
    ObstacleState s = init_state(m, unit_disc());
    evolve(s, m, 1.0, 1.0 / 16, StepMode::FixedPoint, cfg);
    std::vector<double> radii;
    for (double r = 2.0 / 24; r <= 0.6; r *= std::sqrt(2.0)) radii.push_back(r);
    NondegeneracyReport rep = nondegeneracy_probe(s, m, radii);
    CHECK(rep.sampled_cells > 0);
    CHECK(rep.slope > 1.6);
    CHECK(rep.slope < 2.4);
    CHECK(rep.min_coefficient > 0.0);
    CHECK_THROWS_AS(nondegeneracy_probe(s, m, {0.1}), std::invalid_argument);
}

TEST_CASE("perforated evolution stays monotone and conserves the area law") {
    PerforationModel pm{PerforationKind::SquareSite, 0.5, 1.0, 0.25, 4};
    DomainMask m = generate_domain(pm, box(128, 2.0)); // h = 1/32
    SolverConfig cfg;
    ObstacleState s = init_state(m, unit_disc());
    double area0 = active_area(s, m);
    int violations = 0;
    evolve(s, m, 0.5, 1.0 / 16, StepMode::FixedPoint, cfg, nullptr,
           [&](const ObstacleState& st, const StepReport& rep) {
               violations += rep.monotonicity_violations;
               CHECK(active_area(st, m) * std::exp(-st.t) ==
                     doctest::Approx(area0).epsilon(0.1));
           });
    CHECK(violations == 0);
}
