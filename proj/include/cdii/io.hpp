#pragma once

// Plain-text field files ("grid-text v1"): header line `nx ny hx hy ox oy`,
// then nx*ny values row-major with the bottom row first, 17 significant
// digits. Boundary traces travel as CSV `index,value` rows in boundary-cycle
// order. Read errors name the file and line.

#include "cdii/grid.hpp"

#include <string>

namespace cdii {

void write_grid_text(const std::string& path, const ScalarField& f);
ScalarField read_grid_text(const std::string& path);

void write_trace_csv(const std::string& path, const BoundaryTrace& t);
BoundaryTrace read_trace_csv(const std::string& path, const Grid2D& g);

} // namespace cdii
