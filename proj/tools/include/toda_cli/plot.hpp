#pragma once

#include <string>

#include "toda/io.hpp"

namespace toda::cli {

/// Renders a thermo or sweep CSV as a static SVG.
///
/// Cartesian thermo tables (x, y columns) become a grayscale heatmap, radial ones
/// (rho column) a polyline over rho, and sweep tables one polyline over t per beta.
/// `column` defaults to S for thermo tables and inf_S for sweeps. The output
/// depends only on the table.
std::string render_svg(const io::Table& table, const std::string& column = "");

}  // namespace toda::cli
