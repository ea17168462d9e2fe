#pragma once

#include "perchs/elliptic.hpp"

namespace perchs {

struct ComplementarityStats {
    double max_negative_p = 0.0;      // most negative p value (0 when clean)
    double max_active_residual = 0.0; // max |L p - f| on {p > 0}
    double min_inactive_residual = 0.0; // min (L p - f) on {p = 0}
    int iterations = 0;
};

struct ObstacleSolution {
    ScalarField p;
    std::vector<std::uint8_t> active; // {p > activation_threshold}
    ComplementarityStats residual_stats;
};

// Minimize (1/2) <L p, p> - <load, p> over p >= 0 by projected SOR. The sweep
// is restricted to an adaptive window around {load > 0} u {guess > 0}; the
// window grows until no positive value touches its rim, so the restriction is
// exact for compactly supported solutions.
ObstacleSolution solve_obstacle(const DomainMask& mask, const ScalarField& load,
                                const SolverConfig& cfg,
                                const EffectiveTensor* tensor = nullptr,
                                const ScalarField* initial_guess = nullptr);

ComplementarityStats complementarity_report(const DomainMask& mask,
                                            const ObstacleSolution& sol,
                                            const ScalarField& load,
                                            const EffectiveTensor* tensor = nullptr);

// {p > 1e-12 * max(1, |p|_inf)}; clamping produces exact zeros, the threshold
// only guards round-off.
double activation_threshold(double p_max);

} // namespace perchs
