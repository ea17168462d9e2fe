#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "perchs/geometry.hpp"

using namespace perchs;

namespace {

GridSpec unit_box(int n, double extent = 1.0) {
    return {n, n, extent / n, 0.0, 0.0};
}

PerforationModel squares(double scale = 0.5, double q = 1.0, double period = 0.25,
                         std::uint64_t seed = 7) {
    return {PerforationKind::SquareSite, scale, q, period, seed};
}

} // namespace

TEST_CASE("site_uniform is deterministic, in range, and stream-separated") {
    for (std::int64_t k = -5; k <= 5; ++k) {
        double u = site_uniform(42, k, 2 * k + 1, 0);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(u == site_uniform(42, k, 2 * k + 1, 0));
    }
    CHECK(site_uniform(1, 3, 4, 0) != site_uniform(1, 3, 4, 1));
    CHECK(site_uniform(1, 3, 4, 0) != site_uniform(2, 3, 4, 0));
}

TEST_CASE("site_uniform law depends only on the site index") {
    // Mean over a window far from the origin matches a window near it.
    auto mean = [](std::int64_t x0, std::int64_t y0) {
        double s = 0.0;
        for (std::int64_t j = 0; j < 32; ++j)
            for (std::int64_t i = 0; i < 32; ++i) s += site_uniform(9, x0 + i, y0 + j, 0);
        return s / (32.0 * 32.0);
    };
    CHECK(std::abs(mean(0, 0) - 0.5) < 0.1);
    CHECK(std::abs(mean(1000000, -777) - 0.5) < 0.1);
}

TEST_CASE("kind=none produces an all-fluid mask with a Dirichlet rim") {
    PerforationModel m; // defaults to None
    DomainMask d = generate_domain(m, unit_box(16));
    CHECK(d.fluid_cell_count() == 16 * 16);
    CHECK(d.fluid_components() == 1);
    CHECK(d.outer_dirichlet[d.grid.idx(0, 0)] == 1);
    CHECK(d.outer_dirichlet[d.grid.idx(8, 8)] == 0);
}

TEST_CASE("square_site occupancy one rasterizes one inclusion per lattice cell") {
    PerforationModel m = squares(0.5, 1.0, 0.25);
    GridSpec g = unit_box(64); // h = 1/64, 16 cells per period
    DomainMask d = generate_domain(m, g);
    // Raster volume fraction of the fluid should be near 1 - scale^2 = 0.75.
    CHECK(volume_fraction(d) == doctest::Approx(0.75).epsilon(0.02));
    CHECK(d.fluid_components() == 1);
}

TEST_CASE("open faces require fluid on both sides") {
    PerforationModel m = squares();
    DomainMask d = generate_domain(m, unit_box(64));
    const GridSpec& g = d.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i + 1 < g.nx; ++i)
            CHECK(static_cast<bool>(d.open_x[d.xface(i, j)]) ==
                  (d.is_fluid(i, j) && d.is_fluid(i + 1, j)));
}

TEST_CASE("generation is deterministic in the seed") {
    GridSpec g = unit_box(64);
    PerforationModel m = squares(0.5, 0.6, 0.25, 11);
    DomainMask a = generate_domain(m, g);
    DomainMask b = generate_domain(m, g);
    CHECK(a.fluid == b.fluid);
    m.seed = 12;
    DomainMask c = generate_domain(m, g);
    CHECK(a.fluid != c.fluid);
}

TEST_CASE("placements translate with the lattice, not the grid window") {
    PerforationModel m = squares(0.5, 0.5, 0.25, 3);
    GridSpec g1 = unit_box(32);
    GridSpec g2 = g1;
    g2.ox += m.period; // shift the window by one period
    auto p1 = generate_placements(m, g1);
    auto p2 = generate_placements(m, g2);
    // Every inclusion well inside both windows appears in both lists.
    for (const auto& a : p1) {
        if (a.x < 0.3 || a.x > 0.7 || a.y < 0.3 || a.y > 0.7) continue;
        bool found = false;
        for (const auto& b : p2)
            found = found || (std::abs(a.x - b.x) < 1e-12 && std::abs(a.y - b.y) < 1e-12);
        CHECK(found);
    }
}

TEST_CASE("resolution guard rejects unresolved periods") {
    PerforationModel m = squares(0.5, 1.0, 0.05);
    CHECK_THROWS_WITH_AS(generate_domain(m, unit_box(16)),
                         doctest::Contains("resolution too coarse"),
                         std::invalid_argument);
}

TEST_CASE("separation report: square lattice") {
    PerforationModel m = squares(0.5, 1.0, 0.25);
    auto inc = generate_placements(m, unit_box(64));
    SeparationReport rep = verify_separation(m, inc);
    CHECK(rep.pass);
    CHECK(rep.min_gap == doctest::Approx((1 - 0.5) * 0.25));
    CHECK(rep.max_diameter == doctest::Approx(0.5 * 0.25 * std::sqrt(2.0)));
}

TEST_CASE("separation report: triangular lattice of discs") {
    PerforationModel m{PerforationKind::TriangularSite, 0.5, 1.0, 0.25, 5};
    auto inc = generate_placements(m, unit_box(64));
    REQUIRE(!inc.empty());
    for (const auto& p : inc) CHECK(p.shape == PlacedInclusion::Shape::Disc);
    SeparationReport rep = verify_separation(m, inc);
    CHECK(rep.min_gap >= rep.d0 - 1e-12);
    CHECK(rep.pass);
    DomainMask d = generate_domain(m, unit_box(64));
    CHECK(d.fluid_components() == 1);
}

TEST_CASE("separation report: chessboard keeps the gap despite jitter") {
    PerforationModel m{PerforationKind::Chessboard, 0.5, 1.0, 0.25, 17};
    auto inc = generate_placements(m, {128, 128, 1.0 / 32, -2.0, -2.0});
    REQUIRE(inc.size() > 50);
    SeparationReport rep = verify_separation(m, inc);
    CHECK(rep.min_gap >= rep.d0 - 1e-12);
    CHECK(rep.pass);
    // Sizes actually vary.
    double lo = 1e9, hi = 0;
    for (const auto& p : inc) {
        lo = std::min(lo, p.size);
        hi = std::max(hi, p.size);
    }
    CHECK(hi > lo * 1.2);
}

TEST_CASE("occupancy zero leaves the domain unperforated") {
    PerforationModel m = squares(0.5, 0.0, 0.25);
    DomainMask d = generate_domain(m, unit_box(64));
    CHECK(d.fluid_cell_count() == 64 * 64);
}

TEST_CASE("occupancy fraction matches the requested probability") {
    PerforationModel m = squares(0.5, 0.3, 0.25, 23);
    GridSpec g{256, 256, 1.0 / 32, -4.0, -4.0}; // 32x32 lattice sites
    auto inc = generate_placements(m, g);
    // 36x36 candidate window incl. the overscan; accept a generous band.
    double frac = inc.size() / (36.0 * 36.0);
    CHECK(frac > 0.15);
    CHECK(frac < 0.45);
}

TEST_CASE("model validation") {
    PerforationModel m = squares();
    m.inclusion_scale = 1.5;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = squares();
    m.occupancy_prob = -0.1;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
    m = squares();
    m.period = 0.0;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}
