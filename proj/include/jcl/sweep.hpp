#pragma once

// Phase-diagram sweeps over (J, Δ).

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jcl/contour.hpp"
#include "jcl/groundstate.hpp"
#include "jcl/lindblad.hpp"

namespace jcl {

enum class SweepMode { equilibrium, dynamics };

std::string to_string(SweepMode m);
/// "equilibrium" or "dynamics"; throws std::invalid_argument otherwise.
SweepMode parse_sweep_mode(const std::string& s);

enum class AxisScale { linear, log };

std::string to_string(AxisScale s);
AxisScale parse_axis_scale(const std::string& s);

/// n points from lo to hi inclusive (n = 1 gives {lo}).
std::vector<double> linear_axis(double lo, double hi, int n);
/// Geometric spacing; needs 0 < lo.
std::vector<double> log_axis(double lo, double hi, int n);
std::vector<double> make_axis(double lo, double hi, int n, AxisScale scale);

struct GridSpec {
    std::vector<double> j_values;      // units of g, grid rows
    std::vector<double> delta_values;  // units of g, grid columns
    AxisScale j_scale = AxisScale::log;
    AxisScale delta_scale = AxisScale::log;
    SweepMode mode = SweepMode::equilibrium;
    /// Chain template; J and the detuning are overwritten per cell.
    LatticeParams base{};

    // equilibrium
    int site = -1;  // variance site (0-based); −1 picks the central site
    GroundStateOptions ground_state{};

    // dynamics
    DissipationRates rates{};
    double t_avg = 0.0;  // averaging horizon T
    int samples = 401;   // samples over [0, T], both ends included
    EvolveOptions evolve{};

    /// Throws std::invalid_argument on empty or non-increasing axes, a bad
    /// site, or (dynamics) a missing horizon or too few samples.
    void validate() const;
    int variance_site() const;
    std::size_t rows() const { return j_values.size(); }
    std::size_t cols() const { return delta_values.size(); }
};

/// Per-cell quality flags (bitwise OR).
enum CellFlag : std::uint32_t {
    kNearDegenerate = 1u << 0,
    kNotConverged = 1u << 1,
    kRwaHorizon = 1u << 2,  // T·J_eff < 2π: exchange not resolved within the horizon
    kIntegrationFailure = 1u << 3,
    kFailed = 1u << 4,  // value is NaN
};

struct CellDiagnostics {
    double residual = 0.0;           // equilibrium: ‖Hv − Ev‖
    double max_trace_dev = 0.0;      // dynamics: over all samples
    double max_hermiticity = 0.0;
    double min_eigenvalue = 0.0;
    double purity_drift = 0.0;       // max |tr ρ² − tr ρ₀²|
    long steps = 0;
    std::string error;  // message of a failed cell
};

struct CellResult {
    double value = 0.0;
    std::uint32_t flags = 0;
    CellDiagnostics diag;
};

/// One cell, independent of every other cell.
CellResult compute_cell(const GridSpec& spec, std::size_t row, std::size_t col);

struct PhaseGrid {
    GridSpec spec;
    Eigen::MatrixXd values;  // rows: J, cols: Δ
    std::vector<std::uint32_t> flags;          // row-major
    std::vector<CellDiagnostics> diagnostics;  // row-major

    std::uint32_t flag(std::size_t row, std::size_t col) const { return flags[row * spec.cols() + col]; }
    const CellDiagnostics& diag(std::size_t row, std::size_t col) const {
        return diagnostics[row * spec.cols() + col];
    }
    /// Largest finite value (0 for an all-NaN grid).
    double max_value() const;
    std::size_t count_flag(std::uint32_t mask) const;
};

/// OpenMP work-pool over cells. workers <= 0 uses the OpenMP default.
/// Results do not depend on the worker count.
PhaseGrid run_grid(const GridSpec& spec, int workers = 0);
/// Plain loop over cells, the reference for run_grid.
PhaseGrid run_grid_serial(const GridSpec& spec);

struct PhysicalPoint {
    double j = 0.0;
    double delta = 0.0;
};

struct Boundary {
    double level = 0.0;
    std::vector<IndexPolyline> index_lines;
    std::vector<std::vector<PhysicalPoint>> lines;
    bool empty() const { return index_lines.empty(); }
};

/// Level set at ½·max(values).
Boundary extract_boundary(const PhaseGrid& grid);
/// Level set at an explicit level (e.g. half the equilibrium maximum).
Boundary extract_boundary(const PhaseGrid& grid, double level);

/// Fractional index of `value` on the axis, inverse of axis_value.
double fractional_index(std::span<const double> axis, double value, bool log_scale);

/// Δ values where the boundary crosses the row J = j (interpolated between
/// grid rows in index space), ascending. Empty when j is off the grid.
std::vector<double> boundary_deltas_at(const Boundary& b, const PhaseGrid& grid, double j);

/// Δ values where one grid row crosses `level` (1-D interpolation), ascending.
std::vector<double> row_crossings(const PhaseGrid& grid, std::size_t row, double level);

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Resolved grid settings as key/value pairs, in a fixed order.
Metadata grid_metadata(const GridSpec& spec);

/// `# key=value` lines (extra first, then grid_metadata, then the boundary
/// level), the header `j,delta,value,flag`, then rows with J outer.
/// Numbers use the shortest form that round-trips exactly.
void write_csv(std::ostream& os, const PhaseGrid& grid, const Metadata& extra = {});

/// Heatmap with log/linear axes in units of g and the boundary overlaid.
void write_svg(std::ostream& os, const PhaseGrid& grid, const Boundary* boundary = nullptr,
               const std::string& title = {});

/// Shortest round-trip representation with up to 17 significant digits.
std::string format_number(double v);

}  // namespace jcl
