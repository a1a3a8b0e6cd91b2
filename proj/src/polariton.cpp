#include "jcl/polariton.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace jcl {

void JCParams::validate() const {
    if (!(g > 0.0)) throw std::invalid_argument("JCParams: g must be > 0");
    if (!std::isfinite(omega_q) || !std::isfinite(omega_c)) throw std::invalid_argument("JCParams: non-finite frequency");
}

std::string to_string(Coupling c) { return c == Coupling::qubit_qubit ? "qq" : "cc"; }

Coupling parse_coupling(const std::string& s) {
    std::string lower = s;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (lower == "qq") return Coupling::qubit_qubit;
    if (lower == "cc") return Coupling::cavity_cavity;
    throw std::invalid_argument("unknown coupling kind '" + s + "' (expected qq or cc)");
}

double polariton_energy(int n, Species s, const JCParams& p) {
    if (n < 0) throw std::invalid_argument("polariton_energy: n must be >= 0");
    if (n == 0) return 0.0;
    const double d = p.detuning();
    const double root = std::sqrt(n * p.g * p.g + d * d / 4.0);
    return n * p.omega_c + d / 2.0 + (s == Species::plus ? root : -root);
}

double mixing_angle(int n, const JCParams& p) {
    if (n <= 0) return 0.0;
    return 0.5 * std::atan2(p.g * std::sqrt(double(n)), p.detuning() / 2.0);
}

CoeffMatrix hop_coeffs_qubit(int n, const JCParams& p) {
    const double a = mixing_angle(n, p);
    const double b = mixing_angle(n + 1, p);
    CoeffMatrix s{};
    s[0][0] = -std::cos(a) * std::sin(b);
    s[0][1] = std::cos(a) * std::cos(b);
    s[1][0] = -std::sin(a) * std::sin(b);
    s[1][1] = std::sin(a) * std::cos(b);
    return s;
}

CoeffMatrix hop_coeffs_cavity(int n, const JCParams& p) {
    const double a = mixing_angle(n, p);
    const double b = mixing_angle(n + 1, p);
    const double up = std::sqrt(double(n + 1));
    const double same = std::sqrt(double(std::max(n, 0)));
    CoeffMatrix t{};
    t[0][0] = std::cos(a) * std::cos(b) * up + std::sin(a) * std::sin(b) * same;
    t[0][1] = std::cos(a) * std::sin(b) * up - std::sin(a) * std::cos(b) * same;
    t[1][0] = std::sin(a) * std::cos(b) * up - std::cos(a) * std::sin(b) * same;
    t[1][1] = std::sin(a) * std::sin(b) * up + std::cos(a) * std::cos(b) * same;
    return t;
}

double effective_repulsion(const JCParams& p) {
    const double g2 = p.g * p.g;
    const double h = p.detuning() / 2.0;
    if (h > 0.0) {
        // −√(2g²+h²) + 2√(g²+h²) − h rewritten without the large-h cancellation.
        return 2.0 * g2 / (std::sqrt(g2 + h * h) + h) - 2.0 * g2 / (std::sqrt(2.0 * g2 + h * h) + h);
    }
    return -std::sqrt(2.0 * g2 + h * h) + 2.0 * std::sqrt(g2 + h * h) - h;
}

double effective_coupling(double J, const JCParams& p, Coupling kind) {
    if (kind == Coupling::qubit_qubit) {
        return std::abs(J * hop_coeffs_qubit(0, p)[0][0] * hop_coeffs_qubit(1, p)[0][0]);
    }
    return J * hop_coeffs_cavity(0, p)[0][0] * hop_coeffs_cavity(1, p)[0][0];
}

namespace {

std::string describe(double lo, double hi, double f_lo, double f_hi) {
    std::ostringstream os;
    os << "no crossing of delta and J_eff on [" << lo << ", " << hi << "]: delta - J_eff = " << f_lo << " .. "
       << f_hi;
    return os.str();
}

}  // namespace

NoCrossingError::NoCrossingError(double lo_, double hi_, double f_lo_, double f_hi_)
    : std::runtime_error(describe(lo_, hi_, f_lo_, f_hi_)), lo(lo_), hi(hi_), f_lo(f_lo_), f_hi(f_hi_) {}

double crossing_detuning(double J, const JCParams& p, Coupling kind, double delta_max_in_g) {
    if (!(J > 0.0)) throw std::invalid_argument("crossing_detuning: J must be > 0");
    p.validate();
    auto gap = [&](double detuning) {
        const auto q = JCParams::from_detuning(detuning, p.g, p.omega_c);
        return effective_repulsion(q) - effective_coupling(J, q, kind);
    };
    double lo = 0.0;
    double hi = delta_max_in_g * p.g;
    double f_lo = gap(lo);
    const double f_hi = gap(hi);
    if (f_lo <= 0.0) return 0.0;
    if (f_hi > 0.0) throw NoCrossingError(lo, hi, f_lo, f_hi);
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = gap(mid);
        if (f_mid > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double rwa_phase_frequency(int n, int n_prime, Species alpha, Species alpha_prime, Species beta,
                           Species beta_prime, const JCParams& p) {
    if (n < 0 || n_prime < 0) throw std::invalid_argument("rwa_phase_frequency: n must be >= 0");
    const double here = polariton_energy(n + 1, beta, p) - polariton_energy(n, alpha, p);
    const double there = polariton_energy(n_prime + 1, beta_prime, p) - polariton_energy(n_prime, alpha_prime, p);
    return here - there;
}

PolaritonTable make_polariton_table(const JCParams& p, int n_max, double J) {
    p.validate();
    if (n_max < 1) throw std::invalid_argument("make_polariton_table: n_max must be >= 1");
    PolaritonTable t;
    t.params = p;
    t.J = J;
    for (int n = 0; n <= n_max; ++n) {
        t.theta.push_back(mixing_angle(n, p));
        t.e_minus.push_back(polariton_energy(n, Species::minus, p));
        t.e_plus.push_back(polariton_energy(n, Species::plus, p));
        t.s.push_back(hop_coeffs_qubit(n, p));
        t.t.push_back(hop_coeffs_cavity(n, p));
    }
    t.delta_rep = effective_repulsion(p);
    t.j_eff_qq = effective_coupling(J, p, Coupling::qubit_qubit);
    t.j_eff_cc = effective_coupling(J, p, Coupling::cavity_cavity);
    return t;
}

}  // namespace jcl
