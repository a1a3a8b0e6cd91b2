#include "jcl/sweep.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <charconv>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <omp.h>

namespace jcl {

std::string to_string(SweepMode m) { return m == SweepMode::equilibrium ? "equilibrium" : "dynamics"; }

SweepMode parse_sweep_mode(const std::string& s) {
    if (s == "equilibrium") return SweepMode::equilibrium;
    if (s == "dynamics") return SweepMode::dynamics;
    throw std::invalid_argument("unknown mode '" + s + "' (expected equilibrium or dynamics)");
}

std::string to_string(AxisScale s) { return s == AxisScale::log ? "log" : "linear"; }

AxisScale parse_axis_scale(const std::string& s) {
    if (s == "log") return AxisScale::log;
    if (s == "linear") return AxisScale::linear;
    throw std::invalid_argument("unknown axis scale '" + s + "' (expected log or linear)");
}

std::vector<double> linear_axis(double lo, double hi, int n) {
    if (n < 1) throw std::invalid_argument("axis needs at least one point");
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw std::invalid_argument("axis bounds must be finite");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) v[std::size_t(k)] = n == 1 ? lo : lo + (hi - lo) * double(k) / double(n - 1);
    if (n > 1) v.back() = hi;
    return v;
}

std::vector<double> log_axis(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > 0.0)) throw std::invalid_argument("log axis needs positive bounds");
    auto v = linear_axis(std::log(lo), std::log(hi), n);
    for (auto& x : v) x = std::exp(x);
    v.front() = lo;
    if (n > 1) v.back() = hi;
    return v;
}

std::vector<double> make_axis(double lo, double hi, int n, AxisScale scale) {
    return scale == AxisScale::log ? log_axis(lo, hi, n) : linear_axis(lo, hi, n);
}

// ---------------------------------------------------------------- GridSpec

namespace {

void check_axis(const std::vector<double>& a, const char* name, bool nonneg) {
    if (a.empty()) throw std::invalid_argument(std::string(name) + " axis is empty");
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (!std::isfinite(a[k])) throw std::invalid_argument(std::string(name) + " axis has non-finite values");
        if (nonneg && a[k] < 0.0) throw std::invalid_argument(std::string(name) + " axis must be >= 0");
        if (k > 0 && !(a[k] > a[k - 1]))
            throw std::invalid_argument(std::string(name) + " axis must be strictly increasing");
    }
}

}  // namespace

void GridSpec::validate() const {
    check_axis(j_values, "J", true);
    check_axis(delta_values, "detuning", false);
    base.validate();
    if (site < -1 || site >= base.sites) throw std::invalid_argument("variance site out of range");
    if (mode == SweepMode::dynamics) {
        rates.validate();
        if (!(t_avg > 0.0) || !std::isfinite(t_avg))
            throw std::invalid_argument("dynamics mode needs an averaging time T > 0");
        if (samples < kMinAveragingSamples)
            throw std::invalid_argument("dynamics mode needs at least " + std::to_string(kMinAveragingSamples) +
                                        " samples");
    }
}

int GridSpec::variance_site() const { return site >= 0 ? site : central_site(base.sites); }

// ---------------------------------------------------------------- cells

namespace {

LatticeParams cell_params(const GridSpec& spec, std::size_t row, std::size_t col) {
    LatticeParams lp = spec.base;
    lp.J = spec.j_values[row] * spec.base.jc.g;
    lp.jc = JCParams::from_detuning(spec.delta_values[col] * spec.base.jc.g, spec.base.jc.g, spec.base.jc.omega_c);
    return lp;
}

CellResult equilibrium_cell(const GridSpec& spec, const LatticeParams& lp) {
    CellResult r;
    const auto gs = sector_ground_state(lp, lp.sites, spec.ground_state);
    r.value = excitation_variance(gs, spec.variance_site());
    r.diag.residual = gs.residual;
    if (gs.near_degenerate) r.flags |= kNearDegenerate;
    return r;
}

CellResult dynamics_cell(const GridSpec& spec, const LatticeParams& lp) {
    CellResult r;
    const auto sys = make_open_system(lp, spec.rates, SubspaceMode::reachable);
    const auto rho0 = initial_polariton_product(sys.params, sys.basis);
    auto opt = spec.evolve;
    opt.policy = KernelPolicy::serial;  // one trajectory per thread
    const auto tr = evolve(rho0, sys, spec.t_avg, spec.samples, opt);
    r.value = averaged_p2(tr, spec.t_avg);
    r.diag.steps = tr.steps;
    r.diag.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        r.diag.max_trace_dev = std::max(r.diag.max_trace_dev, tr.trace_dev[k]);
        r.diag.max_hermiticity = std::max(r.diag.max_hermiticity, tr.hermiticity_defect[k]);
        r.diag.min_eigenvalue = std::min(r.diag.min_eigenvalue, tr.min_eigenvalue[k]);
        r.diag.purity_drift = std::max(r.diag.purity_drift, std::abs(tr.purity[k] - tr.purity.front()));
    }
    const double j_eff = effective_coupling(lp.J, lp.jc, lp.coupling);
    if (spec.t_avg * j_eff < 2.0 * std::numbers::pi) r.flags |= kRwaHorizon;
    return r;
}

}  // namespace

CellResult compute_cell(const GridSpec& spec, std::size_t row, std::size_t col) {
    if (row >= spec.rows() || col >= spec.cols()) throw std::out_of_range("compute_cell: index out of range");
    const auto lp = cell_params(spec, row, col);
    try {
        return spec.mode == SweepMode::equilibrium ? equilibrium_cell(spec, lp) : dynamics_cell(spec, lp);
    } catch (const ConvergenceError& e) {
        CellResult r;
        r.value = std::numeric_limits<double>::quiet_NaN();
        r.flags = kNotConverged | kFailed;
        r.diag.residual = e.last_residual;
        r.diag.error = e.what();
        return r;
    } catch (const IntegrationQualityError& e) {
        CellResult r;
        r.value = std::numeric_limits<double>::quiet_NaN();
        r.flags = kIntegrationFailure | kFailed;
        r.diag.min_eigenvalue = e.min_eigenvalue;
        r.diag.error = e.what();
        return r;
    } catch (const std::exception& e) {
        CellResult r;
        r.value = std::numeric_limits<double>::quiet_NaN();
        r.flags = kFailed;
        if (dynamic_cast<const StiffnessError*>(&e)) r.flags |= kIntegrationFailure;
        r.diag.error = e.what();
        return r;
    }
}

// ---------------------------------------------------------------- grids

double PhaseGrid::max_value() const {
    double m = 0.0;
    bool any = false;
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        const double v = values.data()[k];
        if (!std::isfinite(v)) continue;
        m = any ? std::max(m, v) : v;
        any = true;
    }
    return m;
}

std::size_t PhaseGrid::count_flag(std::uint32_t mask) const {
    return std::size_t(std::count_if(flags.begin(), flags.end(), [mask](std::uint32_t f) { return (f & mask) != 0; }));
}

namespace {

PhaseGrid empty_grid(const GridSpec& spec) {
    spec.validate();
    PhaseGrid g;
    g.spec = spec;
    g.values = Eigen::MatrixXd::Zero(Eigen::Index(spec.rows()), Eigen::Index(spec.cols()));
    g.flags.assign(spec.rows() * spec.cols(), 0);
    g.diagnostics.assign(spec.rows() * spec.cols(), {});
    return g;
}

void store(PhaseGrid& g, std::size_t cell, CellResult r) {
    const std::size_t cols = g.spec.cols();
    g.values(Eigen::Index(cell / cols), Eigen::Index(cell % cols)) = r.value;
    g.flags[cell] = r.flags;
    g.diagnostics[cell] = std::move(r.diag);
}

}  // namespace

PhaseGrid run_grid_serial(const GridSpec& spec) {
    PhaseGrid g = empty_grid(spec);
    const std::size_t cols = spec.cols();
    for (std::size_t cell = 0; cell < spec.rows() * cols; ++cell)
        store(g, cell, compute_cell(g.spec, cell / cols, cell % cols));
    return g;
}

PhaseGrid run_grid(const GridSpec& spec, int workers) {
    PhaseGrid g = empty_grid(spec);
    const std::size_t cols = spec.cols();
    const auto cells = static_cast<std::ptrdiff_t>(spec.rows() * cols);
    const int threads = workers > 0 ? workers : omp_get_max_threads();
#pragma omp parallel for num_threads(threads) schedule(dynamic, 1)
    for (std::ptrdiff_t cell = 0; cell < cells; ++cell) {
        const auto c = std::size_t(cell);
        store(g, c, compute_cell(g.spec, c / cols, c % cols));
    }
    return g;
}

// ---------------------------------------------------------------- boundary

double fractional_index(std::span<const double> axis, double value, bool log_scale) {
    if (axis.empty()) throw std::invalid_argument("fractional_index: empty axis");
    if (axis.size() == 1 || value <= axis.front()) return 0.0;
    if (value >= axis.back()) return double(axis.size() - 1);
    const auto it = std::upper_bound(axis.begin(), axis.end(), value);
    const auto k = std::size_t(it - axis.begin()) - 1;
    const double a = axis[k], b = axis[k + 1];
    const double w = (log_scale && a > 0.0) ? std::log(value / a) / std::log(b / a) : (value - a) / (b - a);
    return double(k) + w;
}

Boundary extract_boundary(const PhaseGrid& grid) { return extract_boundary(grid, 0.5 * grid.max_value()); }

Boundary extract_boundary(const PhaseGrid& grid, double level) {
    Boundary b;
    b.level = level;
    // A constant grid has no level set even when level equals the constant.
    double lo = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < grid.values.size(); ++k)
        if (std::isfinite(grid.values.data()[k])) lo = std::min(lo, grid.values.data()[k]);
    if (!(grid.max_value() > lo)) return b;
    b.index_lines = marching_squares(grid.values, level);
    const bool jlog = grid.spec.j_scale == AxisScale::log && is_geometric(grid.spec.j_values);
    const bool dlog = grid.spec.delta_scale == AxisScale::log && is_geometric(grid.spec.delta_values);
    for (const auto& line : b.index_lines) {
        std::vector<PhysicalPoint> pts;
        for (const auto& p : line)
            pts.push_back({axis_value(grid.spec.j_values, p.row, jlog), axis_value(grid.spec.delta_values, p.col, dlog)});
        b.lines.push_back(std::move(pts));
    }
    return b;
}

std::vector<double> boundary_deltas_at(const Boundary& b, const PhaseGrid& grid, double j) {
    const auto& ja = grid.spec.j_values;
    if (j < ja.front() || j > ja.back()) return {};
    const bool jlog = grid.spec.j_scale == AxisScale::log && is_geometric(ja);
    const bool dlog = grid.spec.delta_scale == AxisScale::log && is_geometric(grid.spec.delta_values);
    std::vector<double> out;
    for (double c : crossings_at_row(b.index_lines, fractional_index(ja, j, jlog)))
        out.push_back(axis_value(grid.spec.delta_values, c, dlog));
    return out;
}

std::vector<double> row_crossings(const PhaseGrid& grid, std::size_t row, double level) {
    if (row >= grid.spec.rows()) throw std::out_of_range("row_crossings: row out of range");
    std::vector<double> f(grid.spec.cols());
    for (std::size_t c = 0; c < f.size(); ++c) f[c] = grid.values(Eigen::Index(row), Eigen::Index(c));
    const bool dlog = grid.spec.delta_scale == AxisScale::log && is_geometric(grid.spec.delta_values);
    if (!dlog) return level_crossings(grid.spec.delta_values, f, level);
    // Interpolate in log Δ, matching the contour's axis mapping.
    std::vector<double> x(grid.spec.delta_values.size());
    for (std::size_t c = 0; c < x.size(); ++c) x[c] = std::log(grid.spec.delta_values[c]);
    auto out = level_crossings(x, f, level);
    for (auto& v : out) v = std::exp(v);
    return out;
}

// ---------------------------------------------------------------- output

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Metadata grid_metadata(const GridSpec& spec) {
    auto axis_entries = [](Metadata& m, const std::string& name, const std::vector<double>& a, AxisScale s) {
        m.emplace_back(name + "_min", format_number(a.front()));
        m.emplace_back(name + "_max", format_number(a.back()));
        m.emplace_back(name + "_count", std::to_string(a.size()));
        m.emplace_back(name + "_scale", to_string(s));
    };
    Metadata m;
    m.emplace_back("mode", to_string(spec.mode));
    m.emplace_back("sites", std::to_string(spec.base.sites));
    m.emplace_back("coupling", to_string(spec.base.coupling));
    m.emplace_back("omega_c", format_number(spec.base.jc.omega_c));
    axis_entries(m, "j", spec.j_values, spec.j_scale);
    axis_entries(m, "delta", spec.delta_values, spec.delta_scale);
    if (spec.mode == SweepMode::equilibrium) {
        m.emplace_back("n_max", std::to_string(spec.base.sites));
        m.emplace_back("site", std::to_string(spec.variance_site() + 1));
        m.emplace_back("dense_limit", std::to_string(spec.ground_state.dense_limit));
        m.emplace_back("seed", std::to_string(spec.ground_state.seed));
    } else {
        m.emplace_back("n_max", std::to_string(std::max(spec.base.sites, 2)));
        m.emplace_back("gamma_q", format_number(spec.rates.gamma_q));
        m.emplace_back("gamma_c", format_number(spec.rates.gamma_c));
        m.emplace_back("t_avg", format_number(spec.t_avg));
        m.emplace_back("samples", std::to_string(spec.samples));
        m.emplace_back("rtol", format_number(spec.evolve.rtol));
        m.emplace_back("atol", format_number(spec.evolve.atol));
    }
    return m;
}

void write_csv(std::ostream& os, const PhaseGrid& grid, const Metadata& extra) {
    for (const auto& [k, v] : extra) os << "# " << k << '=' << v << '\n';
    for (const auto& [k, v] : grid_metadata(grid.spec)) os << "# " << k << '=' << v << '\n';
    os << "# boundary_level=" << format_number(0.5 * grid.max_value()) << '\n';
    os << "# flags=1:near_degenerate,2:not_converged,4:rwa_horizon,8:integration_failure,16:failed\n";
    os << "j,delta,value,flag\n";
    for (std::size_t r = 0; r < grid.spec.rows(); ++r)
        for (std::size_t c = 0; c < grid.spec.cols(); ++c)
            os << format_number(grid.spec.j_values[r]) << ',' << format_number(grid.spec.delta_values[c]) << ','
               << format_number(grid.values(Eigen::Index(r), Eigen::Index(c))) << ',' << grid.flag(r, c) << '\n';
}

namespace {

// Fixed perceptual palette (viridis stops).
constexpr std::array<std::array<int, 3>, 9> kPalette{{{68, 1, 84},
                                                      {71, 44, 122},
                                                      {59, 81, 139},
                                                      {44, 113, 142},
                                                      {33, 144, 141},
                                                      {39, 173, 129},
                                                      {92, 200, 99},
                                                      {170, 220, 50},
                                                      {253, 231, 37}}};

std::string color(double x) {
    char buf[8];
    if (!std::isfinite(x)) return "#808080";
    x = std::clamp(x, 0.0, 1.0) * double(kPalette.size() - 1);
    const auto k = std::min(std::size_t(x), kPalette.size() - 2);
    const double w = x - double(k);
    int rgb[3];
    for (int c = 0; c < 3; ++c)
        rgb[c] = int(std::lround((1 - w) * kPalette[k][std::size_t(c)] + w * kPalette[k + 1][std::size_t(c)]));
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rgb[0], rgb[1], rgb[2]);
    return buf;
}

}  // namespace

void write_svg(std::ostream& os, const PhaseGrid& grid, const Boundary* boundary, const std::string& title) {
    const double left = 70, top = 30, w = 480, h = 480, right = 110;
    const auto rows = grid.spec.rows(), cols = grid.spec.cols();
    const double cw = w / double(cols), ch = h / double(rows);
    const double vmax = grid.max_value() > 0 ? grid.max_value() : 1.0;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + w + right << "\" height=\"" << top + h + 60
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    if (!title.empty()) os << "<text x=\"" << left << "\" y=\"18\">" << title << "</text>\n";
    // Cell (r, c) centred on index (r, c); J grows upwards.
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            os << "<rect x=\"" << format_number(left + double(c) * cw) << "\" y=\""
               << format_number(top + h - double(r + 1) * ch) << "\" width=\"" << format_number(cw + 0.05)
               << "\" height=\"" << format_number(ch + 0.05) << "\" fill=\""
               << color(grid.values(Eigen::Index(r), Eigen::Index(c)) / vmax) << "\"/>\n";
    if (boundary) {
        for (const auto& line : boundary->index_lines) {
            os << "<polyline fill=\"none\" stroke=\"white\" stroke-width=\"1.5\" stroke-dasharray=\"4,2\" points=\"";
            for (const auto& p : line)
                os << format_number(left + (p.col + 0.5) * cw) << ',' << format_number(top + h - (p.row + 0.5) * ch)
                   << ' ';
            os << "\"/>\n";
        }
    }
    // Axes: end labels and the scale.
    const auto& ja = grid.spec.j_values;
    const auto& da = grid.spec.delta_values;
    os << "<text x=\"" << left << "\" y=\"" << top + h + 18 << "\">" << format_number(da.front()) << "</text>\n";
    os << "<text x=\"" << left + w << "\" y=\"" << top + h + 18 << "\" text-anchor=\"end\">"
       << format_number(da.back()) << "</text>\n";
    os << "<text x=\"" << left + w / 2 << "\" y=\"" << top + h + 40 << "\" text-anchor=\"middle\">detuning / g ("
       << to_string(grid.spec.delta_scale) << ")</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << top + h << "\" text-anchor=\"end\">" << format_number(ja.front())
       << "</text>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << top + 10 << "\" text-anchor=\"end\">" << format_number(ja.back())
       << "</text>\n";
    os << "<text transform=\"translate(" << left - 40 << ',' << top + h / 2
       << ") rotate(-90)\" text-anchor=\"middle\">J / g (" << to_string(grid.spec.j_scale) << ")</text>\n";
    // Colour bar.
    const double bx = left + w + 20;
    for (int k = 0; k < 50; ++k)
        os << "<rect x=\"" << bx << "\" y=\"" << format_number(top + h - (k + 1) * h / 50) << "\" width=\"16\" height=\""
           << format_number(h / 50 + 0.05) << "\" fill=\"" << color((k + 0.5) / 50) << "\"/>\n";
    os << "<text x=\"" << bx + 20 << "\" y=\"" << top + 10 << "\">" << format_number(vmax) << "</text>\n";
    os << "<text x=\"" << bx + 20 << "\" y=\"" << top + h << "\">0</text>\n";
    os << "</svg>\n";
}

}  // namespace jcl
