#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perchs/mask.hpp"

namespace perchs {

enum class PerforationKind { None, SquareSite, TriangularSite, Chessboard };

std::string to_string(PerforationKind k);
PerforationKind perforation_kind_from_string(const std::string& s);

// Lattice-indexed random perforation model. `period` is the microstructure
// period in physical units (the epsilon of a rescaled domain).
struct PerforationModel {
    PerforationKind kind = PerforationKind::None;
    double inclusion_scale = 0.5; // side/diameter as fraction of the lattice cell, in (0,1)
    double occupancy_prob = 1.0;  // probability a site carries an inclusion
    double period = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// One placed inclusion in physical coordinates.
struct PlacedInclusion {
    enum class Shape { Square, Disc } shape;
    double x = 0.0, y = 0.0; // center
    double size = 0.0;       // square side or disc diameter
};

struct SeparationReport {
    double min_gap = 0.0;      // +inf sentinel when fewer than two inclusions
    double max_diameter = 0.0; // shape diameter (diagonal for squares)
    double d0 = 0.0;           // required separation (1 - scale) * period
    double diameter_bound = 0.0;
    bool pass = false;
};

// Deterministic placement stage: every inclusion whose lattice cell carries a
// site and which can intersect the grid.
std::vector<PlacedInclusion> generate_placements(const PerforationModel& model,
                                                 const GridSpec& grid);

// Rasterize the perforation model onto the grid. Cells are solid iff their
// center lies inside an inclusion; the outer rim is marked Dirichlet. Throws
// on unresolved periods (period < 4h) and on connectivity-repair failure.
DomainMask generate_domain(const PerforationModel& model, const GridSpec& grid);

SeparationReport verify_separation(const PerforationModel& model,
                                   const std::vector<PlacedInclusion>& inclusions);

// Per-site uniform variate: splitmix64 hash of (seed, site coordinates).
// Lattice translation invariance of the law comes from using absolute site
// indices, not grid positions.
double site_uniform(std::uint64_t seed, std::int64_t kx, std::int64_t ky,
                    std::uint32_t stream = 0);

} // namespace perchs
