#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "perchs/homogenization.hpp"

using namespace perchs;

namespace {

PerforationModel squares(double scale = 0.5, double q = 1.0, std::uint64_t seed = 0) {
    return {PerforationKind::SquareSite, scale, q, 1.0, seed};
}

} // namespace

TEST_CASE("unperforated cell: zero corrector and identity tensor") {
    PerforationModel m; // kind none
    DomainMask cell = periodic_cell_mask(m, 16, 1);
    CorrectorSolution c = solve_corrector(cell, 1.0, 0.0, {});
    CHECK(norm_inf(cell, c.chi) == 0.0);
    CHECK(c.flux_x == doctest::Approx(1.0));
    CHECK(c.flux_y == doctest::Approx(0.0));
    EffectiveTensorResult r = effective_tensor(cell, {});
    CHECK(r.tensor.a11 == doctest::Approx(1.0));
    CHECK(r.tensor.a22 == doctest::Approx(1.0));
    CHECK(r.tensor.a12 == doctest::Approx(0.0));
    CHECK(r.tensor.mu == 1.0);
}

TEST_CASE("periodic cell rasterizes the square inclusion exactly") {
    DomainMask cell = periodic_cell_mask(squares(), 32, 1);
    CHECK(volume_fraction(cell) == doctest::Approx(0.75));
    // Tiling two periods reproduces the one-period pattern.
    DomainMask two = periodic_cell_mask(squares(), 32, 2);
    for (int j = 0; j < two.grid.ny; ++j)
        for (int i = 0; i < two.grid.nx; ++i)
            CHECK(two.fluid[two.grid.idx(i, j)] ==
                  cell.fluid[cell.grid.idx(i % 32, j % 32)]);
}

TEST_CASE("full-occupancy square lattice: symmetric tensor below the fluid fraction") {
    SolverConfig cfg;
    cfg.tol = 1e-12;
    DomainMask cell = periodic_cell_mask(squares(), 32, 1);
    EffectiveTensorResult r = effective_tensor(cell, cfg);
    CHECK(r.asymmetry <= 1e-8);
    CHECK(std::abs(r.tensor.a12) <= 1e-8);
    // Square symmetry of the geometry makes the tensor isotropic.
    CHECK(r.tensor.a11 == doctest::Approx(r.tensor.a22).epsilon(1e-8));
    auto [lmin, lmax] = r.tensor.eigenvalues();
    CHECK(lmin > 0.0);
    CHECK(lmax <= r.tensor.mu + 1e-9); // averaged-gradient (Voigt) ceiling
    CHECK(r.tensor.mu == doctest::Approx(0.75));
}

TEST_CASE("tensor is stable under grid refinement") {
    SolverConfig cfg;
    cfg.tol = 1e-12;
    double a32 = effective_tensor(periodic_cell_mask(squares(), 32, 1), cfg).tensor.a11;
    double a64 = effective_tensor(periodic_cell_mask(squares(), 64, 1), cfg).tensor.a11;
    CHECK(a64 == doctest::Approx(a32).epsilon(0.005));
}

TEST_CASE("random chessboard: SPD tensor, Voigt bound, deterministic ensemble") {
    PerforationModel m{PerforationKind::Chessboard, 0.5, 0.8, 1.0, 3};
    SolverConfig cfg;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    EffectiveTensorResult a = effective_tensor_ensemble(m, 16, 4, seeds, cfg);
    EffectiveTensorResult b = effective_tensor_ensemble(m, 16, 4, seeds, cfg);
    CHECK(a.tensor.a11 == b.tensor.a11);
    CHECK(a.tensor.a12 == b.tensor.a12);
    CHECK(a.tensor.mu == b.tensor.mu);
    CHECK(a.tensor.spd());
    auto [lmin, lmax] = a.tensor.eigenvalues();
    CHECK(lmin > 0.0);
    CHECK(lmax <= a.tensor.mu + 1e-9);
}

TEST_CASE("more solid means less conductive") {
    SolverConfig cfg;
    double thin = effective_tensor(periodic_cell_mask(squares(0.3), 32, 1), cfg).tensor.a11;
    double thick = effective_tensor(periodic_cell_mask(squares(0.7), 32, 1), cfg).tensor.a11;
    CHECK(thick < thin);
    CHECK(thin < 1.0);
    CHECK(thick > 0.0);
}

TEST_CASE("linear problem: perforated solutions approach the homogenized one") {
    SolverConfig cfg;
    PerforationModel m = squares();
    EffectiveTensor t = effective_tensor(periodic_cell_mask(m, 32, 1), cfg).tensor;
    GridSpec g{128, 128, 1.0 / 64, -1.0, -1.0};
    auto rows = linear_homogenization_experiment(m, {0.25, 0.125}, 1.0, g, t, cfg);
    REQUIRE(rows.size() == 4);
    double e4 = -1, e8 = -1;
    for (const auto& r : rows)
        if (r.metric_name == "l2_error") (r.epsilon == 0.25 ? e4 : e8) = r.value;
    CHECK(e4 > 0.0);
    CHECK(e8 > 0.0);
    CHECK(e8 < e4);
    CHECK_THROWS_AS(
        linear_homogenization_experiment(m, {1.0 / 32}, 1.0, g, t, cfg),
        std::invalid_argument);
}

TEST_CASE("homogenized droplet keeps the exponential area law") {
    SolverConfig cfg;
    EffectiveTensor t = effective_tensor(periodic_cell_mask(squares(), 32, 1), cfg).tensor;
    GridSpec g{96, 96, 1.0 / 24, -2.0, -2.0};
    RegionSpec d0{RegionSpec::Shape::Disc, 0.0, 0.0, 0.75, {}};
    double area0 = 3.14159265 * 0.75 * 0.75;
    homogenized_evolution(t, d0, 0.5, 1.0 / 16, g, cfg, StepMode::FixedPoint,
                          [&](const ObstacleState& st, const StepReport&) {
                              double area = 0.0;
                              for (auto a : st.active) area += a * g.h * g.h;
                              CHECK(area * std::exp(-st.t) ==
                                    doctest::Approx(area0).epsilon(0.1));
                          });
}

TEST_CASE("Hele-Shaw convergence experiment emits both metrics per step") {
    SolverConfig cfg;
    PerforationModel m = squares();
    EffectiveTensor t = effective_tensor(periodic_cell_mask(m, 32, 1), cfg).tensor;
    GridSpec g{96, 96, 1.0 / 32, -1.5, -1.5};
    RegionSpec d0{RegionSpec::Shape::Disc, 0.0, 0.0, 0.5, {}};
    auto rows = heleshaw_convergence_experiment(m, {0.25}, d0, 0.25, 1.0 / 16, g, t, cfg,
                                                StepMode::FixedPoint);
    int sup_rows = 0, haus_rows = 0;
    for (const auto& r : rows) {
        CHECK(std::isfinite(r.value));
        CHECK(r.value >= 0.0);
        if (r.metric_name == "sup_norm_diff") ++sup_rows;
        if (r.metric_name == "hausdorff") ++haus_rows;
    }
    CHECK(sup_rows == 4);
    CHECK(haus_rows == 4);
}
