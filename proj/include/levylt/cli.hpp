#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "levylt/clt.hpp"
#include "levylt/exponent.hpp"
#include "levylt/quadrature.hpp"

namespace levylt {

enum class Subcommand { Constants, Density, Simulate, Rw, Clt, Audit };

std::string to_string(Subcommand s);
std::optional<Subcommand> parse_subcommand(const std::string& name);

/// Exponent as written in a config: family "brownian", "stable" (beta,
/// scale) or "mixture" (components, scale).
struct ExponentSpec {
    std::string family = "brownian";
    double beta = 2.0;
    double scale = 1.0;
    std::vector<StableComponent> components;
};

struct RunConfig {
    Subcommand subcommand = Subcommand::Audit;
    ExponentSpec exponent;
    QuadratureConfig quadrature;

    // density
    std::string op = "p";  ///< p, d1, d2, u, v, w
    std::vector<double> s_values{1.0};
    std::vector<double> x_values{0.0};
    std::vector<double> gamma_values{1.0};

    // constants
    std::vector<double> t_list{100.0, 1000.0, 10000.0};

    // simulate / clt
    double t = 50.0;
    double dt = 0.005;
    double h_grid = 0.1;
    std::int64_t paths = 1000;
    std::int64_t limit_paths = 0;
    double tau = 0.0;  ///< ≤ 0: default near-lag window
    bool raw = false;  ///< simulate: emit the uncorrected box-kernel functionals
    LimitLawParams limit;

    // rw
    std::int64_t n = 1000;
    std::int64_t walks = 100;

    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
    std::string out;     ///< empty: standard output
    std::string report;  ///< clt JSON report
};

/// Every invalid field, one message each, naming the field.
std::vector<std::string> validate(const RunConfig& cfg);

/// Throws ConfigError for an invalid exponent description.
LevyExponent build_exponent(const ExponentSpec& spec);

nlohmann::json to_json(const RunConfig& cfg);

/// Overlays the fields present in `j` onto `base`. Unknown keys are errors.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base);

/// Artifact version string.
std::string version();

/// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitGateFailure = 1;
inline constexpr int kExitUsage = 2;

/// Executes one subcommand, writes its output files (or `out` on standard
/// output when cfg.out is empty) and returns an exit code. Diagnostics go to
/// `log`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& log);

/// Formats with 17 significant digits.
std::string format_double(double v);

}  // namespace levylt
