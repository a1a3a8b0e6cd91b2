#pragma once

#include <iosfwd>
#include <map>
#include <string>

namespace jcl::cli {

inline constexpr const char* kArtifactName = "jclattice";
inline constexpr const char* kArtifactVersion = "1.0.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,      // a validation report came out FAIL, or an unexpected error
    kExitUsage = 2,
    kExitNumerical = 3,    // convergence or integration failure
    kExitCapacity = 4,
};

enum class Units { g, mhz };

/// Frequencies given in MHz are ordinary frequencies f; ω = 2π f. With g
/// also given in MHz the 2π cancels in ω/g.
double to_g_units(double value, Units u, double g_mhz);
/// Times given in μs become units of 1/g: t·2π·g_MHz.
double time_to_g_units(double value, Units u, double g_mhz);
Units parse_units(const std::string& s);

/// "<x>/gq", "<x>/gc", "<x>/g" or a plain time; rates already in units of g.
double parse_time_spec(const std::string& s, Units u, double g_mhz, double gamma_q, double gamma_c);

/// Reads `key=value` lines; `#`-prefixed lines of that shape are accepted
/// too, so a CSV written by this tool works as a config file.
std::map<std::string, std::string> read_config(std::istream& is);

/// Entry point shared by the executable and the tests.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace jcl::cli
