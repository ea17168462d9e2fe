#pragma once

#include "perchs/elliptic.hpp"
#include "perchs/geometry.hpp"
#include "perchs/metrics.hpp"

namespace perchs {

// Condenser capacity between an inner set (potential 1) and an outer set
// (potential 0). All 2D capacities here are condenser capacities relative to
// an explicit outer set; the whole-plane capacity degenerates in d = 2.
struct CapacityResult {
    double value = 0.0;      // discrete Dirichlet energy of the potential
    ScalarField potential;   // in [0,1]
    std::vector<int> inner_set, outer_set;
    bool no_fluid_path = false; // capacity 0, flagged
};

CapacityResult capacity(const DomainMask& mask, const std::vector<int>& inner,
                        const std::vector<int>& outer, const SolverConfig& cfg);

// Finite-box Green's function with a circular Dirichlet collar of radius
// r_box around the source (fluid cells at distance >= r_box pinned to 0).
ScalarField collared_green(const DomainMask& mask, int iy, int jy, double r_box,
                           const SolverConfig& cfg);

// Fluid cells at center distance within [r - h/2, r + h/2) of cell (ci, cj).
std::vector<int> shell_cells(const DomainMask& mask, int ci, int cj, double r);

struct LevelSetCapacityRow {
    double a = 0.0;
    double cap = 0.0;
    double product = 0.0; // a * Cap({G >= a}); continuum value 1
};

std::vector<LevelSetCapacityRow> level_set_capacity_check(
    const DomainMask& mask, int iy, int jy, const std::vector<double>& a_list,
    double r_box, const SolverConfig& cfg);

struct GreenBoundsRow {
    double r = 0.0;
    double g_min = 0.0, g_max = 0.0;
    double reference = 0.0;  // log(r_box / r) / (2 pi)
    double ratio_min = 0.0, ratio_max = 0.0;
    double inv_capacity = 0.0;
    bool sandwich_ok = false; // g_min <= 1/Cap(B_r) <= g_max, 2% slack
};

std::vector<GreenBoundsRow> green_bounds_check(const DomainMask& mask, int iy, int jy,
                                               const std::vector<double>& radii,
                                               double r_box, const SolverConfig& cfg);

// Cap_eps(B_r) / Cap_allfluid(B_r) with a shared collar; one ratio per eps.
std::vector<MetricsRecord> capacity_lower_bound_check(
    const PerforationModel& model, const std::vector<double>& eps_list, double r,
    double r_box, const GridSpec& grid, const SolverConfig& cfg,
    const std::string& experiment_id = "capacity");

} // namespace perchs
