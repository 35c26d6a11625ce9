#include "doctest.h"

#include <cmath>
#include <complex>
#include <numeric>

#include "levylt/constants.hpp"
#include "levylt/errors.hpp"
#include "levylt/simulate.hpp"

using namespace levylt;

namespace {

const QuadratureConfig cfg;

struct Stats {
    double mean;
    double se;
};

template <class F>
Stats stats_of(std::size_t n, F f) {
    double s = 0, s2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = f(i);
        s += v;
        s2 += v * v;
    }
    const double m = s / n;
    return {m, std::sqrt((s2 / n - m * m) / (n - 1))};
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace

TEST_CASE("increment variance") {
    auto rng = make_stream(5, StreamKind::Misc, 0);
    const auto b = LevyExponent::brownian_half();
    const auto var_b = stats_of(100000, [&](std::size_t) { return std::pow(sample_increment(b, 1.0, rng), 2); });
    CHECK(std::abs(var_b.mean - 1.0) <= 0.02);
    const auto s2 = LevyExponent::stable(2.0);
    const auto var_s = stats_of(100000, [&](std::size_t) { return std::pow(sample_increment(s2, 1.0, rng), 2); });
    CHECK(std::abs(var_s.mean - 2.0) <= 0.05);
}

TEST_CASE("stable increment characteristic function") {
    for (double beta : {1.5, 1.2}) {
        auto rng = make_stream(6, StreamKind::Misc, 1);
        const auto e = LevyExponent::stable(beta);
        const auto ecf = stats_of(100000, [&](std::size_t) { return std::cos(sample_increment(e, 1.0, rng)); });
        CHECK(std::abs(ecf.mean - std::exp(-1.0)) <= 3 * ecf.se);
    }
    // Mixture: independent components multiply the characteristic functions.
    auto rng = make_stream(6, StreamKind::Misc, 2);
    const auto m = LevyExponent::mixture({{0.5, 1.3}, {0.5, 2.0}});
    const auto ecf = stats_of(100000, [&](std::size_t) { return std::cos(sample_increment(m, 1.0, rng)); });
    CHECK(std::abs(ecf.mean - std::exp(-1.0)) <= 3 * ecf.se);
}

TEST_CASE("path basics") {
    const auto e = LevyExponent::stable(1.5);
    const auto empty = simulate_path(e, 0.0, 0.01, 1);
    CHECK(empty.positions == std::vector<double>{0.0});
    const auto a = simulate_path(e, 5.0, 0.01, 9, 3);
    const auto b = simulate_path(e, 5.0, 0.01, 9, 3);
    CHECK(a.positions == b.positions);
    CHECK(a.positions.size() == 501);
    CHECK(a.positions != simulate_path(e, 5.0, 0.01, 9, 4).positions);
    CHECK_THROWS_AS(simulate_path(e, 1.0, 0.3, 1), ConfigError);
    CHECK_THROWS_AS(simulate_path(e, 1.0, 1e-3, 1, 0, 100), ConfigError);
}

TEST_CASE("Brownian path stays within ten standard deviations") {
    int inside = 0;
    for (int seed = 0; seed < 100; ++seed) {
        const auto p = simulate_path(LevyExponent::brownian_half(), 100.0, 0.01, seed);
        double m = 0;
        for (double x : p.positions) m = std::max(m, std::abs(x));
        inside += m < 100.0;
    }
    CHECK(inside >= 99);
}

TEST_CASE("local time of a constant path") {
    const ContinuousPath p{LevyExponent::brownian_half(), 1.0, 10, std::vector<double>(11, 0.0)};
    const auto f = estimate_local_time(p, 0.1);
    REQUIRE(f.counts.size() == 1);
    CHECK(f.first_bin == 0);
    CHECK(f.counts[0] == doctest::Approx(10.0 / 0.1).epsilon(1e-14));
}

TEST_CASE("occupation formula and mass") {
    const auto p = simulate_path(LevyExponent::stable(1.4), 20.0, 0.01, 2);
    const double h = 0.1;
    const auto f = estimate_local_time(p, h);
    auto g = [](std::int64_t bin) { return std::sin(0.3 * bin) + 2.0; };
    double lhs = 0;
    for (std::size_t i = 0; i < f.counts.size(); ++i) {
        lhs += g(f.first_bin + static_cast<std::int64_t>(i)) * f.counts[i] * h;
        CHECK(f.counts[i] >= 0.0);
    }
    double rhs = 0;
    for (std::int64_t k = 0; k < p.n_steps; ++k) rhs += g(bin_of(p.positions[k], h)) * p.dt;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK(std::abs(f.mass() - 20.0) <= 1e-12 * p.n_steps);
}

TEST_CASE("functional examples") {
    LocalTimeField zero;
    zero.bin_width = 0.5;
    zero.counts.assign(5, 0.0);
    CHECK(functional_increment_l2(zero) == 0.0);

    LocalTimeField one;
    one.bin_width = 1.0;
    one.first_bin = 3;
    one.counts = {2.5};
    CHECK(functional_increment_l2(one) == doctest::Approx(2 * 2.5 * 2.5));
    CHECK(functional_alpha(one) == doctest::Approx(2.5 * 2.5));
}

TEST_CASE("alpha Cauchy-Schwarz bound") {
    for (int seed = 0; seed < 10; ++seed) {
        const auto p = simulate_path(LevyExponent::stable(1.5), 10.0, 0.01, seed);
        const auto f = estimate_local_time(p, 0.1);
        std::int64_t lo = f.counts.size(), hi = -1;
        for (std::size_t i = 0; i < f.counts.size(); ++i) {
            if (f.counts[i] > 0) {
                lo = std::min<std::int64_t>(lo, i);
                hi = std::max<std::int64_t>(hi, i);
            }
        }
        const double width = (hi - lo + 1) * f.bin_width;
        CHECK(functional_alpha(f) >= 10.0 * 10.0 / width * (1 - 1e-12));
    }
}

TEST_CASE("alpha grows like t^{3/2} for Brownian motion") {
    std::vector<double> lt, la;
    for (double t : {25.0, 100.0, 400.0}) {
        EnsembleConfig ec;
        ec.exp = LevyExponent::brownian_half();
        ec.t = t;
        ec.dt = 0.01;
        ec.paths = 200;
        ec.seed = 17;
        const auto r = simulate_functionals(ec, cfg);
        double mean = 0;
        for (const auto& v : r) mean += v.alpha / r.size();
        lt.push_back(std::log(t));
        la.push_back(std::log(mean));
    }
    CHECK(std::abs(slope(lt, la) - 1.5) <= 0.1);
}

TEST_CASE("lattice local times and Hamiltonian") {
    const auto w = lattice_from_steps({1, 1, -1});
    const auto ell = rw_local_times(w);
    CHECK(ell == std::map<std::int64_t, std::int64_t>{{1, 2}, {2, 1}});
    CHECK(rw_hamiltonian(w) == 6);
    CHECK(rw_local_times(lattice_from_steps({})).empty());
    CHECK(rw_hamiltonian(lattice_from_steps({})) == 0);
    CHECK(rw_hamiltonian(lattice_from_steps({1})) == 2);
    CHECK(rw_hamiltonian(lattice_from_steps({-1})) == 2);
    CHECK_THROWS_AS(lattice_from_steps({2}), ConfigError);
}

TEST_CASE("lattice identity on random walks") {
    for (std::uint64_t i = 0; i < 2000; ++i) {
        const std::int64_t n = 1 + static_cast<std::int64_t>((i * 7919) % 1000);
        const auto w = random_walk(n, 23, i);
        std::int64_t total = 0;
        for (const auto& [x, l] : rw_local_times(w)) total += l;
        REQUIRE(total == n);
        REQUIRE(rw_hamiltonian_pairs(w) == rw_hamiltonian_increments(w));
        REQUIRE(functional_increment_l2(lattice_field(w)) == static_cast<double>(rw_hamiltonian(w)));
    }
    // The counting route for long walks against brute force.
    const auto w = random_walk(5000, 3, 0);
    std::int64_t brute = 0;
    for (std::int64_t i = 1; i <= w.n; ++i) {
        for (std::int64_t j = 1; j <= w.n; ++j) {
            const auto d = w.positions[i] - w.positions[j];
            brute += 2 * (d == 0) - (d == 1 || d == -1);
        }
    }
    CHECK(rw_hamiltonian_pairs(w) == brute);
}

TEST_CASE("additivity") {
    const auto e = LevyExponent::stable(1.5);
    const auto one = additivity_check(e, 10.0, 1, 0.01, 4);
    CHECK(one.max_bin_discrepancy == 0.0);
    CHECK(one.decomposition_residual == 0.0);
    const auto four = additivity_check(e, 10.0, 4, 0.01, 4);
    CHECK(four.max_bin_discrepancy == 0.0);
    CHECK(four.decomposition_residual <= 1e-12 * 1e3);
    const auto b = additivity_check(LevyExponent::brownian_half(), 50.0, 5, 0.005, 8);
    CHECK(b.max_bin_discrepancy == 0.0);
}

TEST_CASE("stable scaling of the alpha mean") {
    const double beta = 1.5, t = 10.0, c = 4.0;
    auto mean_alpha = [&](double tt) {
        EnsembleConfig ec;
        ec.exp = LevyExponent::stable(beta);
        ec.t = tt;
        ec.dt = 0.01;
        ec.paths = 500;
        ec.seed = 29;
        const auto r = simulate_functionals(ec, cfg);
        return stats_of(r.size(), [&](std::size_t i) { return r[i].alpha; });
    };
    const auto a = mean_alpha(t);
    const auto b = mean_alpha(c * t);
    const double ratio = b.mean / a.mean;
    const double se = ratio * std::hypot(a.se / a.mean, b.se / b.mean);
    CHECK(std::abs(ratio - std::pow(c, 2.0 - 1.0 / beta)) <= 3 * se);
}

TEST_CASE("near-lag correction removes the box-kernel bias") {
    EnsembleConfig ec;
    ec.exp = LevyExponent::brownian_half();
    ec.t = 10.0;
    ec.dt = 0.005;
    ec.paths = 400;
    ec.seed = 31;
    const auto r = simulate_functionals(ec, cfg);
    const auto inc = stats_of(r.size(), [&](std::size_t i) { return r[i].increment; });
    const double exact = exact_mean(ec.exp, ec.t, cfg).value;
    CHECK(std::abs(inc.mean - exact) <= 3 * inc.se);
    const auto alpha = stats_of(r.size(), [&](std::size_t i) { return r[i].alpha; });
    CHECK(std::abs(alpha.mean - exact_alpha_mean(ec.exp, ec.t, cfg).value) <= 3 * alpha.se);

    CHECK(default_tau(10.0, 0.005) == doctest::Approx(0.1));
    CHECK(default_tau(1000.0, 0.05) == doctest::Approx(1.0));
    CHECK(default_tau(1.0, 0.3) == doctest::Approx(0.3));
}

TEST_CASE("ensembles are identical across thread counts") {
    EnsembleConfig ec;
    ec.exp = LevyExponent::stable(1.5);
    ec.t = 5.0;
    ec.dt = 0.01;
    ec.paths = 37;
    ec.seed = 99;
    ec.threads = 1;
    const auto a = simulate_functionals(ec, cfg);
    ec.threads = 8;
    const auto b = simulate_functionals(ec, cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].increment == b[i].increment);
        CHECK(a[i].alpha == b[i].alpha);
        CHECK(a[i].increment_raw == b[i].increment_raw);
    }
}
