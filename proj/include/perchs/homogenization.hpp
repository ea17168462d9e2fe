#pragma once

#include "perchs/evolution.hpp"
#include "perchs/geometry.hpp"
#include "perchs/metrics.hpp"

namespace perchs {

// Corrector on a periodized cell: w = xi.x + chi with periodic zero-mean chi,
// div(1_fluid grad w) = 0 with zero-Neumann perforation walls.
struct CorrectorSolution {
    ScalarField chi;         // periodic part, zero mean over fluid cells
    double xi_x = 0.0, xi_y = 0.0;
    double flux_x = 0.0, flux_y = 0.0; // cell average of 1_fluid grad w
};

// Rasterize the model onto one periodic supercell of n_periods x n_periods
// lattice cells at cells_per_period cells per period. Site randomness is
// folded modulo the supercell so the pattern tiles exactly.
DomainMask periodic_cell_mask(const PerforationModel& model, int cells_per_period,
                              int n_periods);

CorrectorSolution solve_corrector(const DomainMask& periodic_mask, double xi_x,
                                  double xi_y, const SolverConfig& cfg);

struct EffectiveTensorResult {
    EffectiveTensor tensor;
    double asymmetry = 0.0; // |a12 - a21| before symmetrization
};

// Columns of A are the corrector flux averages for e1, e2; mu is the fluid
// volume fraction of the cell.
EffectiveTensorResult effective_tensor(const DomainMask& periodic_mask,
                                       const SolverConfig& cfg);

// Seed-averaged tensor for random models (ergodic spatial-average surrogate).
EffectiveTensorResult effective_tensor_ensemble(const PerforationModel& model,
                                                int cells_per_period, int n_periods,
                                                const std::vector<std::uint64_t>& seeds,
                                                const SolverConfig& cfg);

// Perforated Dirichlet solve vs homogenized solve for each epsilon; reports
// relative L2 and Linf differences over fluid cells.
std::vector<MetricsRecord> linear_homogenization_experiment(
    const PerforationModel& model, const std::vector<double>& eps_list, double rhs_value,
    const GridSpec& grid, const EffectiveTensor& tensor, const SolverConfig& cfg,
    const std::string& experiment_id = "converge-linear");

// Anisotropic evolution on an all-fluid mask with load scaled by mu.
void homogenized_evolution(const EffectiveTensor& tensor, const RegionSpec& d0, double T,
                           double dt, const GridSpec& grid, const SolverConfig& cfg,
                           StepMode mode,
                           const std::function<void(const ObstacleState&,
                                                    const StepReport&)>& on_step);

// Perforated vs homogenized evolution from the same initial set; per epsilon
// and output time reports sup_norm_diff and hausdorff.
std::vector<MetricsRecord> heleshaw_convergence_experiment(
    const PerforationModel& model, const std::vector<double>& eps_list,
    const RegionSpec& d0, double T, double dt, const GridSpec& grid,
    const EffectiveTensor& tensor, const SolverConfig& cfg, StepMode mode,
    const std::string& experiment_id = "converge-heleshaw");

} // namespace perchs
