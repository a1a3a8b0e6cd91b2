#pragma once

// Level sets of sampled scalar fields.
//
// Grids are row-major matrices v(i, j) with i along the first axis (rows) and
// j along the second (columns). Contour points are returned in fractional
// index coordinates (row, col) and mapped to physical axes separately, so the
// same code handles linear and logarithmic axes.

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace jcl {

struct IndexPoint {
    double row = 0.0;
    double col = 0.0;
};

using IndexPolyline = std::vector<IndexPoint>;

/// Marching squares at `level`. A corner counts as inside when v >= level;
/// saddle cells are resolved by the mean of the four corners. Cells with a
/// non-finite corner are skipped. Segments are stitched into maximal
/// polylines (closed loops repeat their first point at the end).
std::vector<IndexPolyline> marching_squares(const Eigen::MatrixXd& v, double level);

/// Columns (fractional) where the polylines cross the horizontal line at
/// `row`, sorted ascending.
std::vector<double> crossings_at_row(const std::vector<IndexPolyline>& lines, double row);

/// Points where the piecewise-linear sampled function crosses `level`,
/// sorted ascending. Samples exactly on the level count once.
std::vector<double> level_crossings(std::span<const double> x, std::span<const double> f, double level);

/// Maps a fractional index onto the axis by interpolating between
/// neighbouring samples. Interpolation is geometric when `log_scale` and both
/// neighbours are positive, linear otherwise. Clamped to the axis ends.
double axis_value(std::span<const double> axis, double fractional_index, bool log_scale);

/// True when all values are positive and consecutive ratios agree to 1e-9.
bool is_geometric(std::span<const double> axis);

}  // namespace jcl
