#include "jcl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "jcl/microscopic.hpp"
#include "jcl/sweep.hpp"

namespace jcl::cli {

double to_g_units(double value, Units u, double g_mhz) { return u == Units::g ? value : value / g_mhz; }

double time_to_g_units(double value, Units u, double g_mhz) {
    return u == Units::g ? value : value * 2.0 * std::numbers::pi * g_mhz;
}

Units parse_units(const std::string& s) {
    std::string l = s;
    std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    if (l == "g") return Units::g;
    if (l == "mhz") return Units::mhz;
    throw std::invalid_argument("unknown units '" + s + "' (expected g or MHz)");
}

namespace {

double parse_double(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("cannot parse " + what + " '" + s + "'");
    }
    if (pos != s.size()) throw std::invalid_argument("cannot parse " + what + " '" + s + "'");
    return v;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

double parse_time_spec(const std::string& s_in, Units u, double g_mhz, double gamma_q, double gamma_c) {
    const std::string s = trim(s_in);
    const auto slash = s.find('/');
    if (slash == std::string::npos) {
        const double t = time_to_g_units(parse_double(s, "time"), u, g_mhz);
        if (!(t > 0.0)) throw std::invalid_argument("time must be > 0");
        return t;
    }
    const double k = parse_double(s.substr(0, slash), "time factor");
    const std::string rate = s.substr(slash + 1);
    double r = 0.0;
    if (rate == "gq") r = gamma_q;
    else if (rate == "gc") r = gamma_c;
    else if (rate == "g") r = 1.0;
    else throw std::invalid_argument("unknown rate '" + rate + "' in time '" + s + "' (use gq, gc or g)");
    if (!(r > 0.0)) throw std::invalid_argument("time '" + s + "' refers to a zero rate");
    if (!(k > 0.0)) throw std::invalid_argument("time must be > 0");
    return k / r;
}

std::map<std::string, std::string> read_config(std::istream& is) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(is, line)) {
        std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#' || t[0] == ';') t = trim(t.substr(1));
        const auto eq = t.find('=');
        if (eq == std::string::npos || eq == 0) continue;
        const std::string key = trim(t.substr(0, eq));
        if (key.find_first_of(" ,\t") != std::string::npos) continue;
        kv[key] = trim(t.substr(eq + 1));
    }
    return kv;
}

namespace {

// Values from the config file fill options not given on the command line.
void apply_config(CLI::App& sub, const std::string& path) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    for (const auto& [key, value] : read_config(in)) {
        std::string name = key;
        std::replace(name.begin(), name.end(), '_', '-');
        if (name == "config") continue;
        CLI::Option* opt = sub.get_option_no_throw("--" + name);
        if (opt == nullptr || opt->count() > 0) continue;
        opt->add_result(value);
        opt->run_callback();
    }
}

std::optional<double> opt_double(const std::string& s, const std::string& what) {
    if (s.empty()) return std::nullopt;
    return parse_double(s, what);
}

struct UnitOptions {
    std::string units = "g";
    double g_mhz = 10.0;
    double omega_c = 0.0;

    Units u() const { return parse_units(units); }
    double freq(const std::optional<double>& v, double default_in_g) const {
        return v ? to_g_units(*v, u(), g_mhz) : default_in_g;
    }
    void add(CLI::App* sub) {
        sub->add_option("--units", units, "g (all frequencies in units of g) or MHz (ordinary frequencies)")
            ->capture_default_str();
        sub->add_option("--g", g_mhz, "qubit-oscillator coupling g in MHz (used with --units MHz)")
            ->capture_default_str();
        sub->add_option("--omega-c", omega_c, "oscillator frequency (frame choice; drops out of observables)")
            ->capture_default_str();
    }
    void validate() const {
        (void)u();
        if (!(g_mhz > 0.0)) throw std::invalid_argument("--g must be > 0");
    }
    void metadata(Metadata& m) const {
        m.emplace_back("units", "g");
        m.emplace_back("input_units", u() == Units::g ? "g" : "MHz");
        m.emplace_back("g", format_number(g_mhz));
    }
};

// Default rates in units of g: γ_q = 0.1 g, γ_c = 0.01 g (that is
// 2π×1 MHz and 2π×0.1 MHz at g = 2π×10 MHz).
constexpr double kDefaultGammaQ = 0.1;
constexpr double kDefaultGammaC = 0.01;

Metadata header(const std::string& command) {
    return {{"artifact", kArtifactName}, {"version", kArtifactVersion}, {"command", command}};
}

std::ostream& open_output(const std::string& path, std::ofstream& file, std::ostream& fallback) {
    if (path.empty() || path == "-") return fallback;
    file.open(path);
    if (!file) throw std::invalid_argument("cannot write '" + path + "'");
    return file;
}

void echo(std::ostream& err, const Metadata& m) {
    for (const auto& [k, v] : m) err << "# " << k << '=' << v << '\n';
}

// ---------------------------------------------------------------- phase-diagram

struct PhaseDiagramOptions {
    UnitOptions units;
    std::string config;
    int sites = 2;
    std::string coupling = "qq";
    std::string mode = "equilibrium";
    std::string j_min, j_max, delta_min, delta_max;
    int j_count = 64, delta_count = 64;
    std::string j_scale = "log", delta_scale = "log";
    std::string gamma_q, gamma_c;
    std::string t_avg = "5/gq";
    int samples = 401;
    double rtol = 1e-10, atol = 1e-12;
    int site = 0;  // 1-based; 0 = central
    std::size_t dense_limit = 512;
    std::uint64_t seed = kDefaultStartSeed;
    int workers = 0;
    std::string output, svg;
    bool overlay = false;
};

void add_phase_diagram(CLI::App& app, PhaseDiagramOptions& o) {
    auto* s = app.add_subcommand("phase-diagram", "equilibrium var(N_j) or time-averaged P2 over a (J, detuning) grid");
    o.units.add(s);
    s->add_option("--config", o.config, "key=value file (a CSV written by this tool also works)");
    s->add_option("--sites", o.sites, "number of sites M")->capture_default_str();
    s->add_option("--coupling", o.coupling, "qq or cc")->capture_default_str();
    s->add_option("--mode", o.mode, "equilibrium or dynamics")->capture_default_str();
    s->add_option("--j-min", o.j_min, "smallest J (default 0.01 g)");
    s->add_option("--j-max", o.j_max, "largest J (default 1 g)");
    s->add_option("--j-count", o.j_count, "J points")->capture_default_str();
    s->add_option("--j-scale", o.j_scale, "log or linear")->capture_default_str();
    s->add_option("--delta-min", o.delta_min, "smallest detuning (default 0.01 g)");
    s->add_option("--delta-max", o.delta_max, "largest detuning (default 50 g)");
    s->add_option("--delta-count", o.delta_count, "detuning points")->capture_default_str();
    s->add_option("--delta-scale", o.delta_scale, "log or linear")->capture_default_str();
    s->add_option("--gamma-q", o.gamma_q, "qubit decay rate (default 0.1 g)");
    s->add_option("--gamma-c", o.gamma_c, "oscillator decay rate (default 0.01 g)");
    s->add_option("--t-avg", o.t_avg, "averaging time: number (1/g or us) or k/gq, k/gc, k/g")->capture_default_str();
    s->add_option("--samples", o.samples, "samples over [0, T]")->capture_default_str();
    s->add_option("--rtol", o.rtol, "integrator relative tolerance")->capture_default_str();
    s->add_option("--atol", o.atol, "integrator absolute tolerance")->capture_default_str();
    s->add_option("--site", o.site, "variance site, 1-based (default: central site)");
    s->add_option("--dense-limit", o.dense_limit, "largest sector solved densely")->capture_default_str();
    s->add_option("--seed", o.seed, "iterative solver start-vector seed")->capture_default_str();
    s->add_option("--workers", o.workers, "parallel workers (0: OpenMP default)")->capture_default_str();
    s->add_option("-o,--output", o.output, "CSV path (default stdout)");
    s->add_option("--svg", o.svg, "optional SVG heatmap path");
    s->add_flag("--overlay-equilibrium", o.overlay, "dynamics mode: overlay the equilibrium half-max boundary");
}

GridSpec build_grid_spec(const PhaseDiagramOptions& o) {
    o.units.validate();
    GridSpec spec;
    spec.mode = parse_sweep_mode(o.mode);
    spec.base.sites = o.sites;
    spec.base.coupling = parse_coupling(o.coupling);
    spec.base.jc = JCParams::from_detuning(0.0, 1.0, o.units.omega_c);
    spec.base.n_max = std::max(o.sites, 2);
    spec.j_scale = parse_axis_scale(o.j_scale);
    spec.delta_scale = parse_axis_scale(o.delta_scale);
    const auto& u = o.units;
    spec.j_values = make_axis(u.freq(opt_double(o.j_min, "--j-min"), 1e-2), u.freq(opt_double(o.j_max, "--j-max"), 1.0),
                              o.j_count, spec.j_scale);
    spec.delta_values = make_axis(u.freq(opt_double(o.delta_min, "--delta-min"), 1e-2),
                                  u.freq(opt_double(o.delta_max, "--delta-max"), 50.0), o.delta_count,
                                  spec.delta_scale);
    if (o.site < 0 || o.site > o.sites) throw std::invalid_argument("--site must lie in 1..M");
    spec.site = o.site - 1;
    spec.ground_state.dense_limit = o.dense_limit;
    spec.ground_state.seed = o.seed;
    if (spec.mode == SweepMode::dynamics) {
        spec.rates.gamma_q = u.freq(opt_double(o.gamma_q, "--gamma-q"), kDefaultGammaQ);
        spec.rates.gamma_c = u.freq(opt_double(o.gamma_c, "--gamma-c"), kDefaultGammaC);
        spec.t_avg = parse_time_spec(o.t_avg, u.u(), u.g_mhz, spec.rates.gamma_q, spec.rates.gamma_c);
        spec.samples = o.samples;
        spec.evolve.rtol = o.rtol;
        spec.evolve.atol = o.atol;
    }
    spec.validate();
    return spec;
}

int phase_diagram(const PhaseDiagramOptions& o, std::ostream& out, std::ostream& err) {
    const GridSpec spec = build_grid_spec(o);
    const PhaseGrid grid = run_grid(spec, o.workers);

    Metadata meta = header("phase-diagram");
    o.units.metadata(meta);
    std::optional<PhaseGrid> eq;
    double eq_level = 0.0;
    if (spec.mode == SweepMode::dynamics && o.overlay) {
        GridSpec es = spec;
        es.mode = SweepMode::equilibrium;
        eq = run_grid(es, o.workers);
        eq_level = 0.5 * eq->max_value();
        meta.emplace_back("overlay_equilibrium", "true");
        meta.emplace_back("equilibrium_boundary_level", format_number(eq_level));
    }

    std::ofstream file;
    write_csv(open_output(o.output, file, out), grid, meta);
    if (!o.svg.empty()) {
        std::ofstream svg(o.svg);
        if (!svg) throw std::invalid_argument("cannot write '" + o.svg + "'");
        if (eq) {
            const Boundary b = extract_boundary(*eq, eq_level);
            write_svg(svg, grid, &b, "time-averaged P2, equilibrium boundary overlaid");
        } else {
            const Boundary b = extract_boundary(grid);
            write_svg(svg, grid, &b, spec.mode == SweepMode::equilibrium ? "var(N_j)" : "time-averaged P2");
        }
    }

    echo(err, meta);
    echo(err, grid_metadata(spec));
    err << "max value " << format_number(grid.max_value()) << ", boundary level "
        << format_number(0.5 * grid.max_value()) << '\n';
    const auto failed = grid.count_flag(kFailed);
    const auto degenerate = grid.count_flag(kNearDegenerate);
    const auto horizon = grid.count_flag(kRwaHorizon);
    if (failed) err << "warning: " << failed << " cell(s) failed (value nan)\n";
    if (degenerate) err << "warning: " << degenerate << " cell(s) with a near-degenerate ground state\n";
    if (horizon)
        err << "warning: " << horizon << " cell(s) where T*J_eff < 2*pi; exchange is not resolved there\n";
    return kExitOk;
}

// ---------------------------------------------------------------- dynamics

struct DynamicsOptions {
    UnitOptions units;
    std::string config;
    int sites = 2;
    std::string coupling = "qq";
    double j = 0.5;
    double delta = 1.0;
    std::string gamma_q, gamma_c;
    std::string t_final = "5/gq";
    int samples = 1001;
    std::string subspace = "reachable";
    int n_max = 2;
    double rtol = 1e-10, atol = 1e-12;
    std::string output;
};

void add_dynamics(CLI::App& app, DynamicsOptions& o) {
    auto* s = app.add_subcommand("dynamics", "Lindblad evolution of P2(t) from one |1,-> polariton per site");
    o.units.add(s);
    s->add_option("--config", o.config, "key=value file (a CSV written by this tool also works)");
    s->add_option("--sites", o.sites, "number of sites M")->capture_default_str();
    s->add_option("--coupling", o.coupling, "qq or cc")->capture_default_str();
    s->add_option("--j", o.j, "inter-site coupling J")->capture_default_str();
    s->add_option("--delta", o.delta, "detuning omega_q - omega_c")->capture_default_str();
    s->add_option("--gamma-q", o.gamma_q, "qubit decay rate (default 0.1 g)");
    s->add_option("--gamma-c", o.gamma_c, "oscillator decay rate (default 0.01 g)");
    s->add_option("--t-final", o.t_final, "horizon: number (1/g or us) or k/gq, k/gc, k/g")->capture_default_str();
    s->add_option("--samples", o.samples, "samples over [0, T]")->capture_default_str();
    s->add_option("--subspace", o.subspace, "reachable or full")->capture_default_str();
    s->add_option("--n-max", o.n_max, "Fock cutoff for --subspace full")->capture_default_str();
    s->add_option("--rtol", o.rtol, "integrator relative tolerance")->capture_default_str();
    s->add_option("--atol", o.atol, "integrator absolute tolerance")->capture_default_str();
    s->add_option("-o,--output", o.output, "CSV path (default stdout)");
}

int dynamics(const DynamicsOptions& o, std::ostream& out, std::ostream& err) {
    o.units.validate();
    const auto& u = o.units;
    LatticeParams lp;
    lp.sites = o.sites;
    lp.coupling = parse_coupling(o.coupling);
    lp.J = to_g_units(o.j, u.u(), u.g_mhz);
    lp.jc = JCParams::from_detuning(to_g_units(o.delta, u.u(), u.g_mhz), 1.0, u.omega_c);
    lp.n_max = o.n_max;
    DissipationRates rates{u.freq(opt_double(o.gamma_q, "--gamma-q"), kDefaultGammaQ),
                           u.freq(opt_double(o.gamma_c, "--gamma-c"), kDefaultGammaC)};
    SubspaceMode mode;
    if (o.subspace == "reachable") mode = SubspaceMode::reachable;
    else if (o.subspace == "full") mode = SubspaceMode::full;
    else throw std::invalid_argument("--subspace must be reachable or full");
    if (mode == SubspaceMode::full && o.n_max < 2) throw std::invalid_argument("P2 needs --n-max >= 2");
    const double t_final = parse_time_spec(o.t_final, u.u(), u.g_mhz, rates.gamma_q, rates.gamma_c);

    const auto sys = make_open_system(lp, rates, mode);
    const auto rho0 = initial_polariton_product(sys.params, sys.basis);
    EvolveOptions eo;
    eo.rtol = o.rtol;
    eo.atol = o.atol;
    const auto tr = evolve(rho0, sys, t_final, o.samples, eo);

    Metadata meta = header("dynamics");
    u.metadata(meta);
    meta.emplace_back("sites", std::to_string(lp.sites));
    meta.emplace_back("coupling", to_string(lp.coupling));
    meta.emplace_back("j", format_number(lp.J));
    meta.emplace_back("delta", format_number(lp.jc.detuning()));
    meta.emplace_back("omega_c", format_number(lp.jc.omega_c));
    meta.emplace_back("gamma_q", format_number(rates.gamma_q));
    meta.emplace_back("gamma_c", format_number(rates.gamma_c));
    meta.emplace_back("t_final", format_number(t_final));
    meta.emplace_back("samples", std::to_string(o.samples));
    meta.emplace_back("subspace", o.subspace);
    meta.emplace_back("n_max", std::to_string(sys.params.n_max));
    meta.emplace_back("dim", std::to_string(sys.basis.size()));
    meta.emplace_back("rtol", format_number(eo.rtol));
    meta.emplace_back("atol", format_number(eo.atol));
    meta.emplace_back("time_unit", "1/g");
    const double j_eff = effective_coupling(lp.J, lp.jc, lp.coupling);
    meta.emplace_back("j_eff", format_number(j_eff));
    meta.emplace_back("delta_eff", format_number(effective_repulsion(lp.jc)));
    const bool horizon = t_final * j_eff < 2.0 * std::numbers::pi;
    meta.emplace_back("rwa_horizon_warning", horizon ? "true" : "false");
    if (o.samples >= kMinAveragingSamples) meta.emplace_back("p2_avg", format_number(averaged_p2(tr, t_final)));
    meta.emplace_back("steps", std::to_string(tr.steps));

    std::ofstream file;
    std::ostream& os = open_output(o.output, file, out);
    for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
    os << 't';
    for (int j = 1; j <= tr.sites; ++j) os << ",p2_site_" << j;
    os << ",p2_mean,n_total,trace_dev,min_eig,purity\n";
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
        os << format_number(tr.times[k]);
        for (double p : tr.p2_per_site[k]) os << ',' << format_number(p);
        os << ',' << format_number(tr.p2_mean[k]) << ',' << format_number(tr.n_total[k]) << ','
           << format_number(tr.trace_dev[k]) << ',' << format_number(tr.min_eigenvalue[k]) << ','
           << format_number(tr.purity[k]) << '\n';
    }
    echo(err, meta);
    if (horizon) err << "warning: T*J_eff < 2*pi; the exchange dynamics is not resolved within the horizon\n";
    return kExitOk;
}

// ---------------------------------------------------------------- effective-params

struct EffectiveOptions {
    UnitOptions units;
    std::string config;
    double j = 0.1;
    double delta_min = 0.0, delta_max = 50.0;
    int delta_count = 101;
    std::string delta_scale = "linear";
    std::string output;
};

void add_effective(CLI::App& app, EffectiveOptions& o) {
    auto* s = app.add_subcommand("effective-params", "effective repulsion, effective couplings and crossing detunings");
    o.units.add(s);
    s->add_option("--config", o.config, "key=value file");
    s->add_option("--j", o.j, "inter-site coupling J for the crossing detunings")->capture_default_str();
    s->add_option("--delta-min", o.delta_min, "smallest detuning")->capture_default_str();
    s->add_option("--delta-max", o.delta_max, "largest detuning")->capture_default_str();
    s->add_option("--delta-count", o.delta_count, "detuning points")->capture_default_str();
    s->add_option("--delta-scale", o.delta_scale, "log or linear")->capture_default_str();
    s->add_option("-o,--output", o.output, "CSV path (default stdout)");
}

int effective_params(const EffectiveOptions& o, std::ostream& out, std::ostream& err) {
    o.units.validate();
    const auto& u = o.units;
    const Units un = u.u();
    const double j = to_g_units(o.j, un, u.g_mhz);
    if (!(j >= 0.0)) throw std::invalid_argument("--j must be >= 0");
    if (o.delta_min < 0.0) throw std::invalid_argument("--delta-min must be >= 0");
    const auto axis = make_axis(to_g_units(o.delta_min, un, u.g_mhz), to_g_units(o.delta_max, un, u.g_mhz),
                                o.delta_count, parse_axis_scale(o.delta_scale));
    for (std::size_t k = 1; k < axis.size(); ++k)
        if (!(axis[k] > axis[k - 1])) throw std::invalid_argument("detuning range must be increasing");
    // Back to the input units for printing.
    const double scale = un == Units::g ? 1.0 : u.g_mhz;

    // Frequencies in this table stay in the input units.
    Metadata meta = header("effective-params");
    meta.emplace_back("units", un == Units::g ? "g" : "MHz");
    meta.emplace_back("g", format_number(u.g_mhz));
    meta.emplace_back("j", format_number(o.j));
    for (Coupling c : {Coupling::qubit_qubit, Coupling::cavity_cavity}) {
        std::string v;
        try {
            v = format_number(crossing_detuning(j, JCParams::from_detuning(0.0, 1.0), c) * scale);
        } catch (const NoCrossingError&) {
            v = "absent";
        }
        meta.emplace_back("crossing_" + to_string(c), v);
    }

    std::ofstream file;
    std::ostream& os = open_output(o.output, file, out);
    for (const auto& [k, v] : meta) os << "# " << k << '=' << v << '\n';
    os << "delta,delta_eff,jeff_qq_over_j,jeff_cc_over_j,jeff_qq,jeff_cc\n";
    for (double d : axis) {
        const auto p = JCParams::from_detuning(d, 1.0);
        const double rq = effective_coupling(1.0, p, Coupling::qubit_qubit);
        const double rc = effective_coupling(1.0, p, Coupling::cavity_cavity);
        os << format_number(d * scale) << ',' << format_number(effective_repulsion(p) * scale) << ','
           << format_number(rq) << ',' << format_number(rc) << ',' << format_number(rq * j * scale) << ','
           << format_number(rc * j * scale) << '\n';
    }
    for (const auto& [k, v] : meta)
        if (k.starts_with("crossing_")) err << k << '=' << v << '\n';
    return kExitOk;
}

// ---------------------------------------------------------------- validate-collective

struct CollectiveOptions {
    std::string config;
    std::vector<int> spins{4};
    std::string couplings = "uniform";
    int excitations = 1;
    double t_final = 10.0;
    int samples = 201;
    double omega_q = 0.0, omega_c = 0.0;
    std::uint64_t seed = 1;
    double exact_tol = 1e-10;
};

void add_collective(CLI::App& app, CollectiveOptions& o) {
    auto* s = app.add_subcommand("validate-collective",
                                 "check the collective bosonic mode of a spin ensemble against exact propagation");
    s->add_option("--config", o.config, "key=value file");
    s->add_option("--spins", o.spins, "ensemble sizes N, comma separated")->delimiter(',')->capture_default_str();
    s->add_option("--couplings", o.couplings, "uniform, random, or an explicit comma-separated list")
        ->capture_default_str();
    s->add_option("--excitations", o.excitations, "total excitations (qubit + ensemble)")->capture_default_str();
    s->add_option("--t-final", o.t_final, "horizon in units of 1/g_collective")->capture_default_str();
    s->add_option("--samples", o.samples, "sampled times")->capture_default_str();
    s->add_option("--omega-q", o.omega_q, "qubit frequency (units of g_collective)")->capture_default_str();
    s->add_option("--omega-c", o.omega_c, "spin frequency (units of g_collective)")->capture_default_str();
    s->add_option("--seed", o.seed, "seed for --couplings random")->capture_default_str();
    s->add_option("--tolerance", o.exact_tol, "bound for the single-excitation error")->capture_default_str();
}

// Couplings normalized to g_collective = 1 so every N is compared on the
// same JC model.
std::vector<double> make_couplings(const CollectiveOptions& o, int n) {
    std::vector<double> g;
    if (o.couplings == "uniform") {
        g.assign(std::size_t(n), 1.0);
    } else if (o.couplings == "random") {
        std::mt19937_64 rng(o.seed + std::uint64_t(n));
        std::uniform_real_distribution<double> dist(0.5, 1.5);
        for (int k = 0; k < n; ++k) g.push_back(dist(rng));
    } else {
        std::stringstream ss(o.couplings);
        std::string item;
        while (std::getline(ss, item, ',')) g.push_back(parse_double(trim(item), "coupling"));
        if (int(g.size()) != n)
            throw std::invalid_argument("explicit coupling list has " + std::to_string(g.size()) + " entries, N=" +
                                        std::to_string(n));
    }
    double norm = 0.0;
    for (double x : g) norm += x * x;
    if (!(norm > 0.0)) throw std::invalid_argument("couplings must not all vanish");
    for (double& x : g) x /= std::sqrt(norm);
    return g;
}

int validate_collective(const CollectiveOptions& o, std::ostream& out, std::ostream& err) {
    if (o.spins.empty()) throw std::invalid_argument("--spins needs at least one value");
    if (o.excitations < 1) throw std::invalid_argument("--excitations must be >= 1");
    for (int n : o.spins) {
        if (n < 1) throw std::invalid_argument("--spins values must be >= 1");
        if (n + 1 > SpinEnsembleParams::kMaxQubits)
            throw CapacityError("N+1 = " + std::to_string(n + 1) + " qubits exceeds the exact-treatment limit of " +
                                std::to_string(SpinEnsembleParams::kMaxQubits));
        if (o.excitations > n)
            throw std::invalid_argument("--excitations exceeds N=" + std::to_string(n));
    }
    Metadata meta = header("validate-collective");
    meta.emplace_back("couplings", o.couplings);
    meta.emplace_back("excitations", std::to_string(o.excitations));
    meta.emplace_back("t_final", format_number(o.t_final));
    meta.emplace_back("samples", std::to_string(o.samples));
    meta.emplace_back("omega_q", format_number(o.omega_q));
    meta.emplace_back("omega_c", format_number(o.omega_c));
    if (o.couplings == "random") meta.emplace_back("seed", std::to_string(o.seed));
    for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
    out << "N,commutator_defect_1,reduction_error,dicke_prenorm\n";

    std::vector<double> errors;
    for (int n : o.spins) {
        SpinEnsembleParams p;
        p.omega_q = o.omega_q;
        p.omega_c = o.omega_c;
        p.couplings = make_couplings(o, n);
        const double defect = commutator_defect(dicke_state(1, p).vector, p);
        const auto rep = reduction_error(p, o.excitations, o.t_final, o.samples);
        errors.push_back(rep.max_error);
        out << n << ',' << format_number(defect) << ',' << format_number(rep.max_error) << ','
            << format_number(rep.dicke_prenorm) << '\n';
    }

    bool pass = true;
    std::string why;
    if (o.excitations == 1) {
        const double worst = *std::max_element(errors.begin(), errors.end());
        pass = worst <= o.exact_tol;
        why = "single-excitation error " + format_number(worst) + (pass ? " <= " : " > ") + format_number(o.exact_tol);
    } else {
        for (std::size_t k = 1; k < errors.size(); ++k) {
            if (!(o.spins[k] > o.spins[k - 1])) throw std::invalid_argument("--spins must be increasing");
            if (!(errors[k] < errors[k - 1])) pass = false;
        }
        why = errors.size() > 1 ? std::string("errors ") + (pass ? "strictly decrease" : "do not strictly decrease") +
                                      " with N"
                                : "single N, error reported only";
    }
    out << (pass ? "PASS" : "FAIL") << ": " << why << '\n';
    (void)err;
    return pass ? kExitOk : kExitFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Jaynes-Cummings lattice phase diagrams and dynamics", kArtifactName};
    app.set_version_flag("--version", kArtifactVersion);
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    PhaseDiagramOptions pd;
    DynamicsOptions dy;
    EffectiveOptions ef;
    CollectiveOptions co;
    add_phase_diagram(app, pd);
    add_dynamics(app, dy);
    add_effective(app, ef);
    add_collective(app, co);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kArtifactVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        auto* sub = app.get_subcommands().front();
        const std::string name = sub->get_name();
        if (name == "phase-diagram") {
            apply_config(*sub, pd.config);
            return phase_diagram(pd, out, err);
        }
        if (name == "dynamics") {
            apply_config(*sub, dy.config);
            return dynamics(dy, out, err);
        }
        if (name == "effective-params") {
            apply_config(*sub, ef.config);
            return effective_params(ef, out, err);
        }
        apply_config(*sub, co.config);
        return validate_collective(co, out, err);
    } catch (const CapacityError& e) {
        err << "error: " << e.what() << '\n';
        return kExitCapacity;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << " (last residual " << format_number(e.last_residual) << ")\n";
        return kExitNumerical;
    } catch (const StiffnessError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const IntegrationQualityError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace jcl::cli
