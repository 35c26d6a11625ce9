// levylt command-line front end.
//
// Precedence, lowest first: built-in defaults, --config JSON file,
// LEVYLT_* environment variables, command-line flags.

#include <fstream>
#include <functional>
#include <iostream>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "levylt/cli.hpp"
#include "levylt/errors.hpp"

namespace {

using levylt::RunConfig;
using levylt::Subcommand;

struct Binding {
    CLI::Option* option;
    std::function<void(RunConfig&)> apply;
};

class Front {
public:
    Front() : app_("Local times of Levy processes: densities, constants, simulation and CLT checks", "levylt") {
        app_.set_version_flag("--version", levylt::version());
        app_.require_subcommand(1);
        add(Subcommand::Constants, "Constants c_psi0, c_psi1 and identity residuals as JSON");
        add(Subcommand::Density, "Transition densities, differences and time integrals as CSV");
        add(Subcommand::Simulate, "Simulated increment and self-intersection functionals as CSV");
        add(Subcommand::Rw, "Lattice random walk Hamiltonians as CSV");
        add(Subcommand::Clt, "CLT comparison against the limit law");
        add(Subcommand::Audit, "Exponent conditions and identity audit as JSON");
    }

    int main(int argc, char** argv) {
        try {
            app_.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            const int rc = app_.exit(e);
            return rc == 0 ? levylt::kExitOk : levylt::kExitUsage;
        }
        for (auto& sub : subs_) {
            if (!sub.app->parsed()) continue;
            RunConfig cfg;
            cfg.subcommand = sub.kind;
            try {
                if (!config_path_.empty()) cfg = load(config_path_, cfg);
                cfg.subcommand = sub.kind;
                for (auto& b : sub.bindings) {
                    if (b.option->count() > 0) b.apply(cfg);
                }
            } catch (const levylt::ConfigError& e) {
                std::cerr << "error: " << e.what() << "\n";
                return levylt::kExitUsage;
            }
            return levylt::run(cfg, std::cout, std::cerr);
        }
        return levylt::kExitUsage;
    }

private:
    struct Sub {
        Subcommand kind;
        CLI::App* app;
        std::vector<Binding> bindings;
    };

    static RunConfig load(const std::string& path, const RunConfig& base) {
        std::ifstream in(path);
        if (!in) throw levylt::ConfigError("config: cannot read \"" + path + "\"");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw levylt::ConfigError("config: " + std::string(e.what()));
        }
        if (j.contains("subcommand") && j["subcommand"] != levylt::to_string(base.subcommand)) {
            throw levylt::ConfigError("subcommand: config file is for \"" + j["subcommand"].get<std::string>() + "\"");
        }
        return levylt::config_from_json(j, base);
    }

    template <class T, class F>
    void bind(Sub& s, const std::string& flag, const std::string& env, const std::string& help, F assign) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = s.app->add_option(flag, *value, help);
        if (!env.empty()) opt->envname("LEVYLT_" + env);
        s.bindings.push_back({opt, [value, assign](RunConfig& c) { assign(c, *value); }});
    }

    void add(Subcommand kind, const std::string& help) {
        Sub s{kind, app_.add_subcommand(levylt::to_string(kind), help), {}};
        s.app->add_option("--config", config_path_, "JSON config file")->envname("LEVYLT_CONFIG");
        bind<unsigned>(s, "--threads", "THREADS", "Worker threads (0: hardware concurrency)",
                       [](RunConfig& c, unsigned v) { c.threads = v; });
        bind<std::string>(s, "--family", "FAMILY", "brownian, stable or mixture",
                          [](RunConfig& c, const std::string& v) { c.exponent.family = v; });
        bind<double>(s, "--beta", "BETA", "Stable index in (1, 2]", [](RunConfig& c, double v) {
            c.exponent.beta = v;
            if (c.exponent.family == "brownian") c.exponent.family = "stable";
        });
        bind<double>(s, "--scale", "SCALE", "Exponent scale", [](RunConfig& c, double v) { c.exponent.scale = v; });
        bind<double>(s, "--abs-tol", "ABS_TOL", "Quadrature absolute tolerance",
                     [](RunConfig& c, double v) { c.quadrature.abs_tol = v; });
        bind<double>(s, "--rel-tol", "REL_TOL", "Quadrature relative tolerance",
                     [](RunConfig& c, double v) { c.quadrature.rel_tol = v; });
        bind<int>(s, "--time-nodes", "TIME_NODES", "Nodes of time integrals",
                  [](RunConfig& c, int v) { c.quadrature.time_nodes = v; });
        bind<std::string>(s, "--out", "OUT", "Output file (default: standard output)",
                          [](RunConfig& c, const std::string& v) { c.out = v; });

        switch (kind) {
        case Subcommand::Density:
            bind<std::string>(s, "--op", "OP", "p, d1, d2, u, v or w",
                              [](RunConfig& c, const std::string& v) { c.op = v; });
            bind<std::vector<double>>(s, "--s", "", "Times (for u, v, w: upper time limits)",
                                      [](RunConfig& c, const std::vector<double>& v) { c.s_values = v; });
            bind<std::vector<double>>(s, "--x", "", "Points",
                                      [](RunConfig& c, const std::vector<double>& v) { c.x_values = v; });
            bind<std::vector<double>>(s, "--gamma", "", "Difference steps",
                                      [](RunConfig& c, const std::vector<double>& v) { c.gamma_values = v; });
            break;
        case Subcommand::Constants:
        case Subcommand::Audit:
            bind<std::vector<double>>(s, "--t-list", "", "Times for h32 residuals and exact means",
                                      [](RunConfig& c, const std::vector<double>& v) { c.t_list = v; });
            break;
        case Subcommand::Simulate:
        case Subcommand::Clt:
            bind<std::uint64_t>(s, "--seed", "SEED", "Master seed",
                                [](RunConfig& c, std::uint64_t v) { c.seed = v; });
            bind<double>(s, "--t", "T", "Time horizon", [](RunConfig& c, double v) { c.t = v; });
            bind<double>(s, "--dt", "DT", "Time step", [](RunConfig& c, double v) { c.dt = v; });
            bind<double>(s, "--h-grid", "H_GRID", "Spatial bin width",
                         [](RunConfig& c, double v) { c.h_grid = v; });
            bind<std::int64_t>(s, "--paths", "PATHS", "Number of paths M",
                               [](RunConfig& c, std::int64_t v) { c.paths = v; });
            bind<double>(s, "--tau", "TAU", "Near-lag window (0: default)",
                         [](RunConfig& c, double v) { c.tau = v; });
            if (kind == Subcommand::Simulate) {
                auto flag = s.app->add_flag("--raw", "Emit the uncorrected box-kernel functionals");
                s.bindings.push_back({flag, [](RunConfig& c) { c.raw = true; }});
            } else {
                bind<std::int64_t>(s, "--limit-paths", "LIMIT_PATHS", "Limit-law draws (0: same as --paths)",
                                   [](RunConfig& c, std::int64_t v) { c.limit_paths = v; });
                bind<std::string>(s, "--report", "REPORT", "JSON report path",
                                  [](RunConfig& c, const std::string& v) { c.report = v; });
            }
            break;
        case Subcommand::Rw:
            bind<std::uint64_t>(s, "--seed", "SEED", "Master seed",
                                [](RunConfig& c, std::uint64_t v) { c.seed = v; });
            bind<std::int64_t>(s, "--n", "N", "Steps per walk", [](RunConfig& c, std::int64_t v) { c.n = v; });
            bind<std::int64_t>(s, "--walks", "WALKS", "Number of walks",
                               [](RunConfig& c, std::int64_t v) { c.walks = v; });
            break;
        }
        subs_.push_back(std::move(s));
    }

    CLI::App app_;
    std::string config_path_;
    std::vector<Sub> subs_;
};

}  // namespace

int main(int argc, char** argv) {
    Front front;
    return front.main(argc, argv);
}
