#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "perchs/field.hpp"
#include "perchs/tensor.hpp"

namespace perchs {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SolveMethod { CG, SOR };

struct SolverConfig {
    double tol = 1e-10;     // relative residual target
    int max_iter = 200000;  // iteration cap
    double relaxation = 1.9;
    SolveMethod method = SolveMethod::CG;

    void validate() const {
        if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: tol must be > 0");
        if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
        if (!(relaxation > 0.0 && relaxation < 2.0))
            throw std::invalid_argument("SolverConfig: relaxation must be in (0,2)");
    }
};

// Finite-volume elliptic operator on a DomainMask. Closed faces carry zero
// flux; outer-rim faces of outer_dirichlet cells see a zero wall value at the
// face (mirror ghost). With a tensor, the 9-point -div(A grad .) stencil is
// used; it requires an all-fluid mask. An optional pinned set turns cells into
// interior Dirichlet cells with value 0 for the homogeneous operator.
class EllipticOperator {
public:
    EllipticOperator(const DomainMask& mask, const EffectiveTensor* tensor = nullptr,
                     const std::vector<std::uint8_t>* pinned = nullptr);

    // y = L x, treating pinned cells as zero. x and y are full-grid arrays.
    void apply(const std::vector<double>& x, std::vector<double>& y) const;

    double diag(int cell) const { return diag_[cell]; }
    bool is_unknown(int cell) const { return unknown_[cell] != 0; }
    const std::vector<std::uint8_t>& unknowns() const { return unknown_; }
    bool has_dirichlet() const { return has_dirichlet_; }
    const DomainMask& mask() const { return *mask_; }

    // One SOR sweep toward L x = b; clamps at zero when project is true.
    // Returns the max absolute update and tracks max |x|.
    double sor_sweep(std::vector<double>& x, const std::vector<double>& b, double omega,
                     bool project, double* max_abs_x = nullptr) const;

    // Off-diagonal row sum at a cell: L x restricted to neighbors.
    double offdiag_apply(const std::vector<double>& x, int i, int j) const;

private:
    const DomainMask* mask_;
    EffectiveTensor tensor_;
    bool anisotropic_ = false;
    bool has_dirichlet_ = false;
    std::vector<std::uint8_t> unknown_;
    std::vector<double> diag_;
};

// L x on all fluid cells (no pinning). Solid cells of the result carry NaN.
ScalarField apply_operator(const DomainMask& mask, const ScalarField& x,
                           const EffectiveTensor* tensor = nullptr);

// Solve L v = rhs with zero outer Dirichlet (from the mask) and optional
// pinned interior cells held at pinned_values. Pure-Neumann systems require a
// zero-mean rhs. Throws SolverError on no-convergence or singular systems.
ScalarField solve_constrained(const DomainMask& mask, const ScalarField& rhs,
                              const SolverConfig& cfg,
                              const EffectiveTensor* tensor = nullptr,
                              const std::vector<std::uint8_t>* pinned = nullptr,
                              const ScalarField* pinned_values = nullptr);

ScalarField solve_poisson(const DomainMask& mask, const ScalarField& rhs,
                          const SolverConfig& cfg,
                          const EffectiveTensor* tensor = nullptr);

// Finite-box Green's function: L G = delta_y / h^2, zero outer Dirichlet.
ScalarField greens_function(const DomainMask& mask, int iy, int jy,
                            const SolverConfig& cfg);

// Discrete harmonic function in B_r(center): fluid cells at distance >= r are
// pinned to boundary_data(x, y); the interior is solved with zero rhs.
ScalarField harmonic_in_ball(const DomainMask& mask, int ci, int cj, double r,
                             const std::function<double(double, double)>& boundary_data,
                             const SolverConfig& cfg);

// sup/inf over B_{r/2} of a nonnegative harmonic function per radius; default
// boundary data is 1 on the upper half of the shell, 0.1 on the lower.
std::vector<double> harnack_probe(const DomainMask& mask, int ci, int cj,
                                  const std::vector<double>& radii,
                                  const SolverConfig& cfg);

// osc(B_{r/2^k}) / osc(B_{r/2^{k-1}}) for k = 1..levels; NaN marks 0/0.
std::vector<double> holder_probe(const DomainMask& mask, int ci, int cj, double r,
                                 int levels, const SolverConfig& cfg);

} // namespace perchs
