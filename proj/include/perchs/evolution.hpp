#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "perchs/obstacle.hpp"

namespace perchs {

// Initial droplet region descriptor: a disc or a simple polygon.
struct RegionSpec {
    enum class Shape { Disc, Polygon } shape = Shape::Disc;
    double cx = 0.0, cy = 0.0, radius = 0.0;
    std::vector<std::pair<double, double>> polygon; // CCW vertices

    bool contains(double x, double y) const;
};

// Droplet state at time t under the time-integrated (obstacle) formulation:
// -L p = load * 1{p>0}, load = -1 outside D0 plus the cumulative occupancy
// tau(x) = integral of 1{p(.,s)>0} ds.
struct ObstacleState {
    double t = 0.0;
    ScalarField p;
    ScalarField tau;
    std::vector<std::uint8_t> d0_mask;
    std::vector<std::uint8_t> active; // {p > 0}, seeded with d0 at t = 0
};

enum class StepMode { Explicit, FixedPoint };

struct StepReport {
    int inner_iterations = 1;    // fixed-point outer solves (1 for explicit)
    int monotonicity_violations = 0; // cells with p decreasing beyond 10*tol
    bool fell_back_to_explicit = false;
};

struct FreeBoundary {
    std::vector<int> cells; // active fluid cells with an inactive fluid face-neighbor
};

ObstacleState init_state(const DomainMask& mask, const RegionSpec& d0);

// Advance by dt. Explicit mode uses the old active set for the occupancy
// increment; fixed_point iterates solve / re-increment until the active set is
// stable (the monotone scheme of the existence construction).
StepReport step(ObstacleState& state, double dt, StepMode mode, const SolverConfig& cfg,
                const DomainMask& mask, const EffectiveTensor* tensor = nullptr,
                int inner_max = 50);

// March from the current state to time T with uniform dt, invoking on_step
// after every step. Callers keep whatever history they need.
void evolve(ObstacleState& state, const DomainMask& mask, double T, double dt,
            StepMode mode, const SolverConfig& cfg,
            const EffectiveTensor* tensor = nullptr,
            const std::function<void(const ObstacleState&, const StepReport&)>& on_step = {});

// Pressure u at the current time: -L u = 1 (or mu for the homogenized
// operator) on the active set, zero Dirichlet on inactive fluid neighbors of
// the free boundary, Neumann on perforation walls.
ScalarField recover_u(const ObstacleState& state, const DomainMask& mask,
                      const SolverConfig& cfg, const EffectiveTensor* tensor = nullptr);

FreeBoundary extract_free_boundary(const ObstacleState& state, const DomainMask& mask);

double hausdorff_distance(const FreeBoundary& a, const FreeBoundary& b,
                          const GridSpec& grid);

struct NondegeneracyReport {
    double slope = 0.0;        // log-log fit of sup_{B_r} p against r
    double min_coefficient = 0.0; // min over x, r of sup_{B_r} p / r^2
    int sampled_cells = 0;
};

NondegeneracyReport nondegeneracy_probe(const ObstacleState& state, const DomainMask& mask,
                                        const std::vector<double>& radii);

struct EvolutionCheckRow {
    double t1 = 0.0, t2 = 0.0;
    int monotonicity_violations = 0;
    double lipschitz_ratio = 0.0;   // max |p(t2)-p(t1)| / (t2-t1)
    double containment_radius = 0.0; // smallest rho with D_t2 in D_t1 + B_rho
    double area_ratio = 0.0;         // |D_t2 cap O| e^{-t2} / |D_0 cap O|
};

std::vector<EvolutionCheckRow> evolution_checks(const std::vector<ObstacleState>& trajectory,
                                                const DomainMask& mask,
                                                double solver_tol);

struct StarShapeResult {
    bool pass = false;
    int violations = 0;          // active cells with a blocked segment
    int interior_violations = 0; // violations deeper than one cell layer
};

// Checks that every active cell sees the ball B_r(center) along active
// rasterized segments. Violations confined to one boundary cell layer pass.
StarShapeResult star_shape_check(const ObstacleState& state, const DomainMask& mask,
                                 double center_x, double center_y, double r);

} // namespace perchs
