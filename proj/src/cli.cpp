#include "levylt/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "levylt/constants.hpp"
#include "levylt/density.hpp"
#include "levylt/errors.hpp"
#include "levylt/parallel.hpp"
#include "levylt/simulate.hpp"

namespace levylt {

using nlohmann::json;

namespace {

const std::pair<Subcommand, const char*> kSubcommands[] = {
    {Subcommand::Constants, "constants"}, {Subcommand::Density, "density"}, {Subcommand::Simulate, "simulate"},
    {Subcommand::Rw, "rw"},               {Subcommand::Clt, "clt"},         {Subcommand::Audit, "audit"},
};

bool is_stochastic(Subcommand s) {
    return s == Subcommand::Simulate || s == Subcommand::Rw || s == Subcommand::Clt;
}

}  // namespace

std::string to_string(Subcommand s) {
    for (const auto& [k, name] : kSubcommands) {
        if (k == s) return name;
    }
    return "unknown";
}

std::optional<Subcommand> parse_subcommand(const std::string& name) {
    for (const auto& [k, n] : kSubcommands) {
        if (name == n) return k;
    }
    return std::nullopt;
}

std::string version() { return LEVYLT_VERSION; }

std::string format_double(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

LevyExponent build_exponent(const ExponentSpec& spec) {
    if (spec.family == "brownian") return LevyExponent::brownian_half();
    if (spec.family == "stable") return LevyExponent::stable(spec.beta, spec.scale);
    if (spec.family == "mixture") return LevyExponent::mixture(spec.components, spec.scale);
    throw ConfigError("family: expected brownian, stable or mixture, got \"" + spec.family + "\"");
}

std::vector<std::string> validate(const RunConfig& c) {
    std::vector<std::string> errs;
    auto positive = [&](double v, const std::string& field) {
        if (!(v > 0.0) || !std::isfinite(v)) errs.push_back(field + ": must be positive, got " + format_double(v));
    };
    auto beta_ok = [&](double b, const std::string& field) {
        if (!(b > 1.0 && b <= 2.0)) errs.push_back(field + ": must lie in (1, 2], got " + format_double(b));
    };

    const auto& e = c.exponent;
    if (e.family == "stable") {
        beta_ok(e.beta, "beta");
        positive(e.scale, "scale");
    } else if (e.family == "mixture") {
        positive(e.scale, "scale");
        if (e.components.empty()) errs.push_back("components: a mixture needs at least one component");
        for (std::size_t i = 0; i < e.components.size(); ++i) {
            beta_ok(e.components[i].beta, "components[" + std::to_string(i) + "].beta");
            positive(e.components[i].weight, "components[" + std::to_string(i) + "].weight");
        }
    } else if (e.family != "brownian") {
        errs.push_back("family: expected brownian, stable or mixture, got \"" + e.family + "\"");
    }

    const auto& q = c.quadrature;
    positive(q.abs_tol, "abs_tol");
    positive(q.rel_tol, "rel_tol");
    if (q.max_subdivisions < 1) errs.push_back("max_subdivisions: must be at least 1");
    if (!(q.p_truncation >= 0.0)) errs.push_back("p_truncation: must be non-negative (0 selects automatically)");
    if (q.time_nodes < 5) errs.push_back("time_nodes: must be at least 5");
    if (q.max_tail_panels < 10) errs.push_back("max_tail_panels: must be at least 10");

    if (is_stochastic(c.subcommand) && !c.seed) errs.push_back("seed: required for " + to_string(c.subcommand));

    switch (c.subcommand) {
    case Subcommand::Density: {
        static const std::set<std::string> ops{"p", "d1", "d2", "u", "v", "w"};
        if (!ops.count(c.op)) errs.push_back("op: expected one of p, d1, d2, u, v, w, got \"" + c.op + "\"");
        if (c.s_values.empty()) errs.push_back("s: at least one value required");
        for (double s : c.s_values) positive(s, "s");
        for (double x : c.x_values) {
            if (!std::isfinite(x)) errs.push_back("x: must be finite");
        }
        for (double g : c.gamma_values) {
            if (!std::isfinite(g)) errs.push_back("gamma: must be finite");
        }
        break;
    }
    case Subcommand::Constants:
    case Subcommand::Audit:
        for (double t : c.t_list) positive(t, "t_list");
        break;
    case Subcommand::Simulate:
    case Subcommand::Clt: {
        positive(c.t, "t");
        positive(c.dt, "dt");
        if (c.t > 0.0 && c.dt > 0.0) {
            const double r = c.t / c.dt;
            if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r)) errs.push_back("dt: t/dt must be an integer");
        }
        if (!(c.h_grid > 0.0 && c.h_grid <= 1.0) ||
            std::abs(1.0 / c.h_grid - std::round(1.0 / c.h_grid)) > 1e-9 / c.h_grid) {
            errs.push_back("h_grid: must lie in (0, 1] with 1/h_grid an integer, got " + format_double(c.h_grid));
        }
        if (c.paths < 1) errs.push_back("paths: must be at least 1");
        if (c.tau < 0.0 || !std::isfinite(c.tau)) errs.push_back("tau: must be non-negative (0 selects automatically)");
        if (c.tau > 0.0 && c.dt > 0.0) {
            const double m = c.tau / c.dt;
            if (std::abs(m - std::round(m)) > 1e-9 * std::max(1.0, m) || c.tau > c.t) {
                errs.push_back("tau: must be a multiple of dt not above t");
            }
        }
        if (c.subcommand == Subcommand::Clt) {
            if (c.limit_paths < 0) errs.push_back("limit_paths: must be non-negative");
            const std::int64_t m1 = c.paths;
            const std::int64_t m2 = c.limit_paths > 0 ? c.limit_paths : c.paths;
            if (std::min(m1, m2) < static_cast<std::int64_t>(kMinComparisonSamples)) {
                errs.push_back("paths: the distribution comparison needs at least 200 samples on each side");
            }
            positive(c.limit.dt, "limit.dt");
            positive(c.limit.bin_width, "limit.h_grid");
            positive(c.limit.tau, "limit.tau");
        }
        break;
    }
    case Subcommand::Rw:
        if (c.n < 1) errs.push_back("n: must be at least 1");
        if (c.walks < 1) errs.push_back("walks: must be at least 1");
        break;
    }
    return errs;
}

// Worker count and output paths are left out: they do not affect results,
// and echoing them would break byte-identical output across thread counts.
json to_json(const RunConfig& c) {
    json e{{"family", c.exponent.family}};
    if (c.exponent.family == "stable") {
        e["beta"] = c.exponent.beta;
        e["scale"] = c.exponent.scale;
    } else if (c.exponent.family == "mixture") {
        e["scale"] = c.exponent.scale;
        json comps = json::array();
        for (const auto& s : c.exponent.components) comps.push_back({{"weight", s.weight}, {"beta", s.beta}});
        e["components"] = comps;
    }
    json j{
        {"subcommand", to_string(c.subcommand)},
        {"exponent", e},
        {"quadrature",
         {{"abs_tol", c.quadrature.abs_tol},
          {"rel_tol", c.quadrature.rel_tol},
          {"max_subdivisions", c.quadrature.max_subdivisions},
          {"p_truncation", c.quadrature.p_truncation},
          {"time_nodes", c.quadrature.time_nodes},
          {"max_tail_panels", c.quadrature.max_tail_panels}}},
    };
    if (c.seed) j["seed"] = *c.seed;
    switch (c.subcommand) {
    case Subcommand::Density:
        j["op"] = c.op;
        j["s"] = c.s_values;
        j["x"] = c.x_values;
        j["gamma"] = c.gamma_values;
        break;
    case Subcommand::Constants:
    case Subcommand::Audit:
        j["t_list"] = c.t_list;
        break;
    case Subcommand::Simulate:
    case Subcommand::Clt:
        j["t"] = c.t;
        j["dt"] = c.dt;
        j["h_grid"] = c.h_grid;
        j["paths"] = c.paths;
        j["tau"] = c.tau;
        if (c.subcommand == Subcommand::Simulate) j["raw"] = c.raw;
        if (c.subcommand == Subcommand::Clt) {
            j["limit_paths"] = c.limit_paths;
            j["limit"] = {{"dt", c.limit.dt}, {"h_grid", c.limit.bin_width}, {"tau", c.limit.tau}};
        }
        break;
    case Subcommand::Rw:
        j["n"] = c.n;
        j["walks"] = c.walks;
        break;
    }
    return j;
}

namespace {

template <class T>
void take(const json& j, const char* key, T& dst) {
    if (j.contains(key)) dst = j.at(key).get<T>();
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    for (const auto& [k, v] : j.items()) {
        bool known = false;
        for (const char* key : keys) known = known || k == key;
        if (!known) throw ConfigError(where + k + ": unknown configuration key");
    }
}

}  // namespace

RunConfig config_from_json(const json& j, RunConfig c) {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    reject_unknown(j,
                   {"subcommand", "exponent", "quadrature", "op", "s", "x", "gamma", "t_list", "t", "dt", "h_grid",
                    "paths", "limit_paths", "tau", "raw", "limit", "n", "walks", "seed", "threads", "out", "report",
                    "version"},
                   "");
    try {
        if (j.contains("subcommand")) {
            const auto s = parse_subcommand(j.at("subcommand").get<std::string>());
            if (!s) throw ConfigError("subcommand: unknown value");
            c.subcommand = *s;
        }
        if (j.contains("exponent")) {
            const json& e = j.at("exponent");
            reject_unknown(e, {"family", "beta", "scale", "components"}, "exponent.");
            take(e, "family", c.exponent.family);
            take(e, "beta", c.exponent.beta);
            take(e, "scale", c.exponent.scale);
            if (e.contains("components")) {
                c.exponent.components.clear();
                for (const auto& comp : e.at("components")) {
                    c.exponent.components.push_back({comp.at("weight").get<double>(), comp.at("beta").get<double>()});
                }
            }
        }
        if (j.contains("quadrature")) {
            const json& q = j.at("quadrature");
            reject_unknown(q, {"abs_tol", "rel_tol", "max_subdivisions", "p_truncation", "time_nodes", "max_tail_panels"},
                           "quadrature.");
            take(q, "abs_tol", c.quadrature.abs_tol);
            take(q, "rel_tol", c.quadrature.rel_tol);
            take(q, "max_subdivisions", c.quadrature.max_subdivisions);
            take(q, "p_truncation", c.quadrature.p_truncation);
            take(q, "time_nodes", c.quadrature.time_nodes);
            take(q, "max_tail_panels", c.quadrature.max_tail_panels);
        }
        take(j, "op", c.op);
        take(j, "s", c.s_values);
        take(j, "x", c.x_values);
        take(j, "gamma", c.gamma_values);
        take(j, "t_list", c.t_list);
        take(j, "t", c.t);
        take(j, "dt", c.dt);
        take(j, "h_grid", c.h_grid);
        take(j, "paths", c.paths);
        take(j, "limit_paths", c.limit_paths);
        take(j, "tau", c.tau);
        take(j, "raw", c.raw);
        if (j.contains("limit")) {
            const json& l = j.at("limit");
            reject_unknown(l, {"dt", "h_grid", "tau"}, "limit.");
            take(l, "dt", c.limit.dt);
            take(l, "h_grid", c.limit.bin_width);
            take(l, "tau", c.limit.tau);
        }
        take(j, "n", c.n);
        take(j, "walks", c.walks);
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        take(j, "threads", c.threads);
        take(j, "out", c.out);
        take(j, "report", c.report);
    } catch (const json::exception& ex) {
        throw ConfigError(std::string("config: ") + ex.what());
    }
    return c;
}

namespace {

// Output sink: the named file, or the given stream when no path is set.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw ConfigError("out: cannot open \"" + path + "\" for writing");
            stream_ = &file_;
        }
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

void csv_header(std::ostream& os, const RunConfig& c) {
    os << "# levylt " << version() << "\n";
    os << "# config " << to_json(c).dump() << "\n";
}

json with_header(const RunConfig& c) { return json{{"version", version()}, {"config", to_json(c)}}; }

std::string row(std::initializer_list<double> values) {
    std::string s;
    bool first = true;
    for (double v : values) {
        if (!first) s += ',';
        s += format_double(v);
        first = false;
    }
    return s;
}

int run_density(const RunConfig& c, const LevyExponent& e, std::ostream& out) {
    Sink sink(c.out, out);
    std::ostream& os = *sink;
    csv_header(os, c);
    const bool time_integral = c.op == "u" || c.op == "v" || c.op == "w";
    os << (time_integral ? "t" : "s") << ",x,gamma,value,err_estimate\n";
    for (double s : c.s_values) {
        for (double x : c.x_values) {
            for (double g : c.gamma_values) {
                QuadResult r;
                const DensityRequest req{e, s, x, g};
                if (c.op == "p") {
                    r = transition_density(req, c.quadrature);
                    // Quadrature noise below abs_tol is reported as 0.
                    if (r.value < 0.0 && r.value >= -std::max(c.quadrature.abs_tol, r.error)) r.value = 0.0;
                } else if (c.op == "d1") {
                    r = delta1_density(req, c.quadrature);
                } else if (c.op == "d2") {
                    r = delta2_density(req, c.quadrature);
                } else if (c.op == "u") {
                    r = u_integral(e, x, s, c.quadrature);
                } else if (c.op == "v") {
                    r = v_integral(e, x, s, g, c.quadrature);
                } else {
                    r = w_integral(e, x, s, g, c.quadrature);
                }
                os << row({s, x, g, r.value, r.error}) << "\n";
            }
        }
    }
    return kExitOk;
}

json report_json(const ConstantsReport& r) {
    json h32 = json::array();
    for (const auto& [t, v] : r.h32_residuals) h32.push_back({{"t", t}, {"residual", v}});
    json means = json::array();
    for (const auto& [t, v] : r.exact_means) means.push_back({{"t", t}, {"exact_mean", v}});
    return {{"c_psi_0", r.c_psi_0},
            {"c_psi_1", r.c_psi_1},
            {"identity_213_value", r.identity_213_value},
            {"identity_213_residual", r.identity_213_residual},
            {"parseval_residuals", r.parseval_residuals},
            {"h32_residuals", h32},
            {"exact_means", means},
            {"mean_slope", r.mean_slope}};
}

bool identity_gates(const ConstantsReport& r, json& gates) {
    bool ok = r.identity_213_residual <= 1e-8;
    gates["identity_213_residual_le_1e-8"] = ok;
    bool parseval_ok = true;
    for (double v : r.parseval_residuals) parseval_ok = parseval_ok && v <= 1e-5;
    gates["parseval_residuals_le_1e-5"] = parseval_ok;
    bool finite = std::isfinite(r.c_psi_0) && std::isfinite(r.c_psi_1);
    gates["constants_finite"] = finite;
    return ok && parseval_ok && finite;
}

int run_constants(const RunConfig& c, const LevyExponent& e, std::ostream& out, bool audit) {
    const ConstantsReport rep = constants_report(e, c.t_list, c.quadrature);
    json j = with_header(c);
    j["exponent"] = e.name();
    j["constants"] = report_json(rep);
    json gates;
    bool ok = identity_gates(rep, gates);
    if (audit) {
        const ConditionReport cond = verify_conditions(e, c.quadrature);
        j["conditions"] = {{"integrability_value", cond.integrability_value},
                           {"derivative_ratio_sup", cond.derivative_ratio_sup},
                           {"ratio_d1_sup", cond.ratio_d1_sup},
                           {"ratio_d2_sup", cond.ratio_d2_sup},
                           {"tail_integrals", cond.tail_integrals},
                           {"passed", cond.passed},
                           {"reasons", cond.reasons}};
        gates["conditions_passed"] = cond.passed;
        ok = ok && cond.passed;
    }
    j["gates"] = gates;
    j["passed"] = ok;
    Sink sink(c.out, out);
    *sink << j.dump(2) << "\n";
    return ok ? kExitOk : kExitGateFailure;
}

EnsembleConfig ensemble_of(const RunConfig& c, const LevyExponent& e) {
    EnsembleConfig ens;
    ens.exp = e;
    ens.t = c.t;
    ens.dt = c.dt;
    ens.bin_width = c.h_grid;
    ens.paths = c.paths;
    ens.seed = *c.seed;
    ens.threads = c.threads;
    ens.tau = c.tau;
    ens.debias = !c.raw;
    return ens;
}

int run_simulate(const RunConfig& c, const LevyExponent& e, std::ostream& out) {
    const auto results = simulate_functionals(ensemble_of(c, e), c.quadrature);
    Sink sink(c.out, out);
    std::ostream& os = *sink;
    csv_header(os, c);
    os << "path_id,I_value,alpha_value\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        os << i << ',' << (c.raw ? row({r.increment_raw, r.alpha_raw}) : row({r.increment, r.alpha})) << "\n";
    }
    return kExitOk;
}

int run_rw(const RunConfig& c, std::ostream& out) {
    struct Row {
        std::int64_t pairs;
        std::int64_t increments;
        std::int64_t dobrushin;
    };
    std::vector<Row> rows(static_cast<std::size_t>(c.walks));
    parallel_for(rows.size(), c.threads, [&](std::size_t i) {
        const LatticePath walk = random_walk(c.n, *c.seed, i);
        const auto ell = rw_local_times(walk);
        auto at = [&](std::int64_t x) {
            const auto it = ell.find(x);
            return it == ell.end() ? std::int64_t{0} : it->second;
        };
        rows[i] = {rw_hamiltonian_pairs(walk), rw_hamiltonian_increments(walk), at(1) - at(0)};
    });
    Sink sink(c.out, out);
    std::ostream& os = *sink;
    csv_header(os, c);
    os << "walk_id,H_n,l2_form,dobrushin_numerator\n";
    bool ok = true;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        os << i << ',' << rows[i].pairs << ',' << rows[i].increments << ',' << rows[i].dobrushin << "\n";
        ok = ok && rows[i].pairs == rows[i].increments;
    }
    return ok ? kExitOk : kExitGateFailure;
}

int run_clt_command(const RunConfig& c, const LevyExponent& e, std::ostream& out) {
    CltConfig cc;
    cc.ensemble = ensemble_of(c, e);
    cc.ensemble.debias = true;
    cc.limit_paths = c.limit_paths;
    cc.limit = c.limit;
    const CltSampleSet set = run_clt(cc, c.quadrature);
    const ComparisonReport rep = compare_distributions(set);

    if (!c.out.empty() || c.report.empty()) {
        Sink sink(c.out, out);
        std::ostream& os = *sink;
        csv_header(os, c);
        os << "sample_id,statistic,limit_sample\n";
        const std::size_t n = std::max(set.samples.size(), set.limit_samples.size());
        for (std::size_t i = 0; i < n; ++i) {
            os << i << ',' << (i < set.samples.size() ? format_double(set.samples[i]) : "") << ','
               << (i < set.limit_samples.size() ? format_double(set.limit_samples[i]) : "") << "\n";
        }
    }
    if (!c.report.empty()) {
        json j = with_header(c);
        j["exponent"] = e.name();
        j["comparison"] = {{"moments_empirical", rep.moments_empirical},
                           {"moments_limit", rep.moments_limit},
                           {"se_empirical", rep.se_empirical},
                           {"se_limit", rep.se_limit},
                           {"moment_z_scores", rep.moment_z_scores},
                           {"ks_statistic", rep.ks_statistic},
                           {"ks_p_value", rep.ks_p_value},
                           {"pass", rep.pass}};
        j["samples"] = set.samples;
        j["limit_samples"] = set.limit_samples;
        std::ofstream f(c.report, std::ios::binary);
        if (!f) throw ConfigError("report: cannot open \"" + c.report + "\" for writing");
        f << j.dump(2) << "\n";
    }
    return rep.pass ? kExitOk : kExitGateFailure;
}

}  // namespace

int run(const RunConfig& c, std::ostream& out, std::ostream& log) {
    const auto errs = validate(c);
    if (!errs.empty()) {
        for (const auto& m : errs) log << "error: " << m << "\n";
        return kExitUsage;
    }
    try {
        const LevyExponent e = build_exponent(c.exponent);
        switch (c.subcommand) {
        case Subcommand::Density:
            return run_density(c, e, out);
        case Subcommand::Constants:
            return run_constants(c, e, out, false);
        case Subcommand::Audit:
            return run_constants(c, e, out, true);
        case Subcommand::Simulate:
            return run_simulate(c, e, out);
        case Subcommand::Rw:
            return run_rw(c, out);
        case Subcommand::Clt:
            return run_clt_command(c, e, out);
        }
    } catch (const ConfigError& ex) {
        log << "error: " << to_string(c.subcommand) << ": " << ex.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& ex) {
        log << "error: " << to_string(c.subcommand) << ": " << ex.what() << "\n";
        return kExitGateFailure;
    }
    return kExitUsage;
}

}  // namespace levylt
