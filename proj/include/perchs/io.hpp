#pragma once

#include <string>

#include "perchs/field.hpp"
#include "perchs/geometry.hpp"
#include "perchs/tensor.hpp"

namespace perchs {

// Binary PGM (P5). Masks: 0 = solid, 255 = fluid. Fields are linearly
// rescaled to [0, 255]; NaN (solid) renders as 0. Row j = 0 at the bottom
// of the image.
void write_mask_pgm(const std::string& path, const DomainMask& mask);
void write_field_pgm(const std::string& path, const ScalarField& field);

// One line per cell: i,j,value (solid cells written as nan).
void write_field_csv(const std::string& path, const ScalarField& field);
ScalarField read_field_csv(const std::string& path, const GridSpec& grid);

std::string model_to_json(const PerforationModel& model);
PerforationModel model_from_json(const std::string& text);

std::string tensor_to_json(const EffectiveTensor& tensor, const PerforationModel& model,
                           const GridSpec& grid, const std::vector<std::uint64_t>& seeds);

} // namespace perchs
