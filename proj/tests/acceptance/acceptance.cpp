// Acceptance runs. One PASS/FAIL line per criterion; exit status 1 if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "levylt/cli.hpp"
#include "levylt/clt.hpp"
#include "levylt/constants.hpp"
#include "levylt/simulate.hpp"

using namespace levylt;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const QuadratureConfig qcfg;
int failures = 0;

void report(int id, bool pass, const std::string& what, double seconds) {
    std::printf("%s [%d] %s (%.1f s)\n", pass ? "PASS" : "FAIL", id, what.c_str(), seconds);
    std::fflush(stdout);
    failures += !pass;
}

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Column `col` of a levylt CSV, skipping header lines.
std::vector<double> csv_column(const std::string& text, int col) {
    std::istringstream in(text);
    std::string line;
    std::vector<double> out;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) continue;
        if (header) {
            header = false;
            continue;
        }
        std::istringstream f(line);
        std::string cell;
        for (int i = 0; i <= col; ++i) std::getline(f, cell, ',');
        out.push_back(std::stod(cell));
    }
    return out;
}

struct MeanSe {
    double mean, se, var;
};

MeanSe mean_se(const std::vector<double>& x) {
    double s = 0;
    for (double v : x) s += v;
    const double n = x.size();
    const double m = s / n;
    double ss = 0;
    for (double v : x) ss += (v - m) * (v - m);
    const double var = ss / (n - 1);
    return {m, std::sqrt(var / n), var};
}

const fs::path& workdir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "levylt_acceptance";
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunConfig simulate_config(double t, unsigned threads) {
    RunConfig c;
    c.subcommand = Subcommand::Simulate;
    c.exponent.family = "brownian";
    c.t = t;
    c.dt = 0.005;
    c.h_grid = 0.1;
    c.paths = 1000;
    c.seed = 1;
    c.threads = threads;
    c.out = (workdir() / ("simulate_t" + std::to_string(static_cast<int>(t)) + "_threads" + std::to_string(threads) +
                          ".csv"))
                .string();
    return c;
}

std::string run_cli(const RunConfig& c, int& rc) {
    std::ostringstream out, log;
    rc = run(c, out, log);
    if (!log.str().empty()) std::cerr << log.str();
    return slurp(c.out);
}

// The pinned times and seed of the CLT runs, fixed from pilot runs.
json clt_fixture() {
    std::ifstream in(LEVYLT_FIXTURES "/clt_pilot.json");
    return json::parse(in);
}

RunConfig clt_config(const json& run, unsigned threads) {
    RunConfig c;
    c.subcommand = Subcommand::Clt;
    c.exponent.family = run.at("family").get<std::string>();
    if (c.exponent.family == "stable") c.exponent.beta = run.at("beta").get<double>();
    c.t = run.at("t").get<double>();
    c.dt = run.at("dt").get<double>();
    c.h_grid = run.at("h_grid").get<double>();
    c.paths = run.at("paths").get<std::int64_t>();
    c.limit_paths = run.at("limit_paths").get<std::int64_t>();
    c.seed = run.at("seed").get<std::uint64_t>();
    c.threads = threads;
    const std::string stem = run.at("name").get<std::string>() + "_threads" + std::to_string(threads);
    c.out = (workdir() / (stem + ".csv")).string();
    c.report = (workdir() / (stem + ".json")).string();
    return c;
}

void criterion1() {
    Timer tm;
    const auto b = LevyExponent::brownian_half();
    const double c0 = c_psi0(b, qcfg).value;
    const double c1 = c_psi1(b, qcfg).value;
    const double s = tm.seconds();
    const bool ok = std::abs(c0 - 1.0) <= 1e-8 && std::abs(c1 - 8.0 / 3.0) <= 1e-8 && s < 1.0;
    report(1, ok,
           "Brownian constants c0=" + format_double(c0) + " c1=" + format_double(c1) + " (abs tol 1e-8, limit 1 s)", s);
}

void criterion2() {
    Timer tm;
    double worst_identity = 0, worst_parseval = 0;
    for (const auto& e : {LevyExponent::brownian_half(), LevyExponent::stable(1.3), LevyExponent::stable(1.5),
                          LevyExponent::stable(2.0)}) {
        worst_identity = std::max(worst_identity, identity_213(e, qcfg).residual);
        for (double r : {0.5, 1.0, 2.0}) {
            for (double rp : {0.5, 1.0, 2.0}) {
                const auto p = parseval_pair(e, r, rp, qcfg);
                worst_parseval = std::max(worst_parseval, std::abs(p.lhs - p.rhs));
            }
        }
    }
    const double s = tm.seconds();
    const bool ok = worst_identity <= 1e-8 && worst_parseval <= 1e-5 && s < 60.0;
    report(2, ok,
           "identity suite: max identity residual " + fmt("%.3g", worst_identity) + " (tol 1e-8), max Parseval |lhs-rhs| " +
               fmt("%.3g", worst_parseval) + " (tol 1e-5), limit 60 s",
           s);
}

void criterion3() {
    Timer tm;
    const auto e = LevyExponent::stable(1.5);
    std::vector<double> lt, lr;
    for (double t : {1e2, 1e3, 1e4}) {
        lt.push_back(std::log(t));
        lr.push_back(std::log(h32_residual(e, t, qcfg).value));
    }
    // Least-squares slope over the three points.
    const double mx = (lt[0] + lt[1] + lt[2]) / 3, my = (lr[0] + lr[1] + lr[2]) / 3;
    double sxy = 0, sxx = 0;
    for (int i = 0; i < 3; ++i) {
        sxy += (lt[i] - mx) * (lr[i] - my);
        sxx += (lt[i] - mx) * (lt[i] - mx);
    }
    const double slope = sxy / sxx;
    const double s = tm.seconds();
    const bool ok = slope <= -1.0 / 3.0 + 0.1 && s < 60.0;
    report(3, ok, "h32 residual decay, Stable(1.5): log-log slope " + fmt("%.4f", slope) + " (bound -0.2333)", s);
}

void criterion4() {
    Timer tm;
    int mismatches = 0;
    const int walks = 10000;
    for (int i = 0; i < walks; ++i) {
        const std::int64_t n = 1 + (static_cast<std::int64_t>(i) * 7919) % 1000;
        const auto w = random_walk(n, 2024, i);
        mismatches += rw_hamiltonian_pairs(w) != rw_hamiltonian_increments(w);
    }
    const double s = tm.seconds();
    report(4, mismatches == 0 && s < 10.0,
           "lattice identity on " + std::to_string(walks) + " walks, n <= 1000: " + std::to_string(mismatches) +
               " mismatches (limit 10 s)",
           s);
}

// Criteria 5 and 6 share the Brownian runs at t = 25, 50, 100.
std::string criteria5and6() {
    Timer tm;
    std::map<int, MeanSe> runs;
    std::string csv50;
    bool rc_ok = true;
    for (double t : {25.0, 50.0, 100.0}) {
        int rc = 0;
        const std::string csv = run_cli(simulate_config(t, 1), rc);
        rc_ok = rc_ok && rc == kExitOk;
        runs[static_cast<int>(t)] = mean_se(csv_column(csv, 1));
        if (t == 50.0) csv50 = csv;
    }
    const double s = tm.seconds();
    const auto b = LevyExponent::brownian_half();
    const double exact = exact_mean(b, 50.0, qcfg).value;
    const auto& r50 = runs[50];
    const double z = (r50.mean - exact) / r50.se;
    const double rel = std::abs(r50.mean - 200.0) / 200.0;
    const bool ok5 = rc_ok && std::abs(z) <= 3.0 && rel <= 0.05 && s < 600.0;
    report(5, ok5,
           "mean reproduction, Brownian t=50: MC mean " + fmt("%.3f", r50.mean) + " +- " + fmt("%.3f", r50.se) +
               " vs exact_mean " + fmt("%.3f", exact) + " (z=" + fmt("%.2f", z) + ", need |z|<=3) and vs 4c0t=200 (" +
               fmt("%.2f", 100 * rel) + "% off, need <=5%)",
           s);

    auto shape = [&](double t) { return t * t * b.psi_inverse(1.0 / t) * std::log(t); };
    const double c = runs[25].var / shape(25.0);
    const double ratio = runs[100].var / (c * shape(100.0));
    const bool ok6 = rc_ok && ratio <= 2.0;
    report(6, ok6,
           "variance envelope: C fitted at t=25 = " + fmt("%.4g", c) + ", var(t=100)/(C t^2 psi^-1(1/t) log t) = " +
               fmt("%.3f", ratio) + " (need <=2)",
           0.0);
    return csv50;
}

void criterion7() {
    Timer tm;
    const auto x = dobrushin_samples(1'000'000, 2000, 1, 0);
    const auto m2 = raw_moment(x, 2);
    const auto m4 = raw_moment(x, 4);
    const double target2 = 2 * std::sqrt(2 / M_PI);
    const double z2 = (m2.value - target2) / m2.standard_error;
    const double z4 = (m4.value - 12.0) / m4.standard_error;
    const double s = tm.seconds();
    const bool ok = std::abs(z2) <= 3 && std::abs(z4) <= 3 && s < 300.0;
    report(7, ok,
           "Dobrushin moments, n=1e6, M=2000: E X^2 = " + fmt("%.4f", m2.value) + " +- " + fmt("%.4f", m2.standard_error) +
               " vs 1.5958 (z=" + fmt("%.2f", z2) + "), E X^4 = " + fmt("%.3f", m4.value) + " +- " +
               fmt("%.3f", m4.standard_error) + " vs 12 (z=" + fmt("%.2f", z4) + ")",
           s);
}

std::vector<std::string> criterion8(const json& fixture) {
    Timer tm;
    std::vector<std::string> csvs;
    std::string detail;
    bool ok = true;
    for (const auto& run_spec : fixture.at("runs")) {
        const RunConfig c = clt_config(run_spec, 1);
        int rc = 0;
        csvs.push_back(run_cli(c, rc));
        const json r = json::parse(slurp(c.report)).at("comparison");
        const bool pass = r.at("pass").get<bool>() && rc == kExitOk;
        ok = ok && pass;
        detail += " " + run_spec.at("name").get<std::string>() + " t=" + fmt("%g", c.t) + ": z=(";
        for (int k = 0; k < 4; ++k) detail += (k ? ", " : "") + fmt("%.2f", r.at("moment_z_scores")[k].get<double>());
        detail += ") KS p=" + fmt("%.3f", r.at("ks_p_value").get<double>()) + (pass ? " pass;" : " fail;");
    }
    const double s = tm.seconds();
    report(8, ok && s < 3600.0, "headline CLT, M=2000 vs 2000 limit draws (need all |z|<=3, p>=0.01):" + detail, s);
    return csvs;
}

void criterion9() {
    Timer tm;
    const auto e = LevyExponent::stable(1.5);
    std::vector<double> ratios, ses;
    for (double t : {1e2, 1e3}) {
        EnsembleConfig ec;
        ec.exp = e;
        ec.t = t;
        ec.dt = 0.05;
        ec.bin_width = 0.1;
        ec.paths = 500;
        ec.seed = 1;
        const auto r = simulate_functionals(ec, qcfg);
        std::vector<double> a;
        for (const auto& v : r) a.push_back(v.alpha);
        const auto ms = mean_se(a);
        const double scale = t * t * e.psi_inverse(1.0 / t);
        ratios.push_back(ms.mean / scale);
        ses.push_back(ms.se / scale);
    }
    const double diff = std::abs(ratios[1] / ratios[0] - 1.0);
    const double s = tm.seconds();
    report(9, diff <= 0.10 && s < 600.0,
           "alpha moment convergence, Stable(1.5): E alpha/(t^2 psi^-1(1/t)) = " + fmt("%.4f", ratios[0]) + " (t=1e2), " +
               fmt("%.4f", ratios[1]) + " (t=1e3), relative difference " + fmt("%.2f", 100 * diff) + "% (need <=10%)",
           s);
}

void criterion10(const std::string& csv5, const std::vector<std::string>& csv8, const json& fixture) {
    Timer tm;
    int rc = 0;
    bool same = run_cli(simulate_config(50.0, 8), rc) == csv5;
    std::size_t i = 0;
    for (const auto& run_spec : fixture.at("runs")) {
        same = same && run_cli(clt_config(run_spec, 8), rc) == csv8.at(i++);
    }
    report(10, same, "determinism: runs 5 and 8 repeated with 8 worker threads give byte-identical CSVs", tm.seconds());
}

}  // namespace

int main() {
    std::printf("levylt %s acceptance\n", version().c_str());
    const json fixture = clt_fixture();
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    const std::string csv5 = criteria5and6();
    criterion7();
    const auto csv8 = criterion8(fixture);
    criterion9();
    criterion10(csv5, csv8, fixture);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
