#include "levylt/clt.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "levylt/constants.hpp"
#include "levylt/density.hpp"
#include "levylt/errors.hpp"
#include "levylt/parallel.hpp"

namespace levylt {

double normalization_scale(const LevyExponent& exp, double t) {
    if (!(t > 0.0)) throw DomainError("normalization_scale: t must be positive");
    return t * std::sqrt(exp.psi_inverse(1.0 / t));
}

double normalized_statistic(double increment, double mean, const LevyExponent& exp, double t) {
    return (increment - mean) / normalization_scale(exp, t);
}

double normalized_statistic(double increment, const LevyExponent& exp, double t, const QuadratureConfig& cfg) {
    return normalized_statistic(increment, exact_mean(exp, t, cfg).value, exp, t);
}

LimitLawSampler::LimitLawSampler(double beta, double c1, LimitLawParams params, const QuadratureConfig& cfg)
    : beta_(beta),
      c1_(c1),
      params_(params),
      path_exp_(beta == 2.0 ? LevyExponent::brownian_half() : LevyExponent::stable(beta)),
      alpha_factor_(beta == 2.0 ? 1.0 / std::sqrt(2.0) : 1.0) {
    if (!(beta > 1.0 && beta <= 2.0)) throw ConfigError("beta must lie in (1, 2]");
    if (!(c1 > 0.0)) throw ConfigError("c1 must be positive");
    bins_per_unit(params.bin_width);
    near_ = make_near_lag_correction(path_exp_, 1.0, params.dt, params.tau, cfg);
}

double LimitLawSampler::alpha(Philox& path_rng) const {
    const ContinuousPath path = simulate_path_with(path_exp_, 1.0, params_.dt, path_rng);
    return alpha_factor_ * path_functionals(path, params_.bin_width, near_).alpha;
}

double LimitLawSampler::sample(Philox& path_rng, Philox& normal_rng) const {
    // The near-lag correction can leave a tiny negative α on degenerate
    // discretizations; α itself is non-negative.
    const double a = std::max(0.0, alpha(path_rng));
    std::normal_distribution<double> normal(0.0, 1.0);
    return std::sqrt(8.0 * c1_ * a) * normal(normal_rng);
}

double limit_law_sample(double beta, double c1, Philox& rng, const LimitLawParams& params) {
    const LimitLawSampler sampler(beta, c1, params);
    return sampler.sample(rng, rng);
}

std::vector<double> limit_law_samples(const LimitLawSampler& sampler, std::int64_t count, std::uint64_t seed,
                                      unsigned threads) {
    if (count < 0) throw ConfigError("limit_paths must be non-negative");
    std::vector<double> out(static_cast<std::size_t>(count));
    parallel_for(out.size(), threads, [&](std::size_t i) {
        Philox path_rng = make_stream(seed, StreamKind::LimitPath, i);
        Philox normal_rng = make_stream(seed, StreamKind::LimitNormal, i);
        out[i] = sampler.sample(path_rng, normal_rng);
    });
    return out;
}

double dobrushin_statistic(const LatticePath& walk) {
    if (walk.n < 1) throw DomainError("dobrushin_statistic: n must be at least 1");
    std::int64_t l0 = 0;
    std::int64_t l1 = 0;
    for (std::size_t j = 1; j < walk.positions.size(); ++j) {
        l0 += walk.positions[j] == 0;
        l1 += walk.positions[j] == 1;
    }
    return static_cast<double>(l1 - l0) / std::pow(static_cast<double>(walk.n), 0.25);
}

std::int64_t dobrushin_numerator(std::int64_t n, std::uint64_t seed, std::uint64_t index) {
    // Same bit-to-step map as random_walk.
    Philox rng = make_stream(seed, StreamKind::Walk, index);
    std::int64_t x = 0;
    std::int64_t diff = 0;
    std::int64_t j = 0;
    while (j < n) {
        std::uint32_t word = rng();
        const std::int64_t take = std::min<std::int64_t>(32, n - j);
        for (std::int64_t b = 0; b < take; ++b) {
            x += (word & 1u) ? 1 : -1;
            word >>= 1;
            diff += (x == 1) - (x == 0);
        }
        j += take;
    }
    return diff;
}

std::vector<double> dobrushin_samples(std::int64_t n, std::int64_t count, std::uint64_t seed, unsigned threads) {
    if (n < 1) throw DomainError("dobrushin_samples: n must be at least 1");
    std::vector<double> out(static_cast<std::size_t>(count));
    const double scale = std::pow(static_cast<double>(n), 0.25);
    parallel_for(out.size(), threads, [&](std::size_t i) {
        out[i] = static_cast<double>(dobrushin_numerator(n, seed, i)) / scale;
    });
    return out;
}

namespace {

// r = t·g(a) with g(a) = a^q/(a^q + (1−a)^q): flattens both ends of [0, t],
// where the integrands behave like powers of r and of t − r.
struct TimeMap {
    double q;
    double t;

    double r(double a) const {
        const double u = std::pow(a, q);
        const double v = std::pow(1.0 - a, q);
        return t * u / (u + v);
    }
    double jacobian(double a) const {
        const double u = std::pow(a, q);
        const double v = std::pow(1.0 - a, q);
        const double d = u + v;
        return t * q * std::pow(a, q - 1.0) * std::pow(1.0 - a, q - 1.0) / (d * d);
    }
};

double map_power(const LevyExponent& e) {
    const double b = e.index_at_infinity();
    return std::ceil(2.0 * b / (b - 1.0));
}

double density_value(const LevyExponent& e, double r, double x, const QuadratureConfig& cfg) {
    if (r <= 0.0) return 0.0;
    return transition_density({e, r, x, 1.0}, cfg).value;
}

// Composite 30-point Gauss–Legendre nodes and weights on [0, 1].
std::vector<std::pair<double, double>> unit_rule(int panels) {
    using rule = boost::math::quadrature::gauss<double, 30>;
    const auto& xs = rule::abscissa();
    const auto& ws = rule::weights();
    std::vector<std::pair<double, double>> out;
    for (int p = 0; p < panels; ++p) {
        const double lo = static_cast<double>(p) / panels;
        const double half = 0.5 / panels;
        const double mid = lo + half;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            out.emplace_back(mid + half * xs[i], ws[i] * half);
            if (xs[i] != 0.0) out.emplace_back(mid - half * xs[i], ws[i] * half);
        }
    }
    return out;
}

}  // namespace

double kac_moment(const LevyExponent& e, std::span<const double> xs, double t, const QuadratureConfig& cfg) {
    if (!(t > 0.0)) throw DomainError("kac_moment: t must be positive");
    const double q = map_power(e);
    if (xs.size() == 1) {
        const TimeMap map{q, t};
        const double x = xs[0];
        const Integrand f = [&](double a) { return map.jacobian(a) * density_value(e, map.r(a), x, cfg); };
        const double pts[5] = {0.0, 0.25, 0.5, 0.75, 1.0};
        return integrate_adaptive(f, pts, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions, "kac_moment m=1").value;
    }
    if (xs.size() != 2) throw DomainError("kac_moment: only m = 1 and m = 2 are supported");

    const auto rule = unit_rule(4);
    double total = 0.0;
    for (int perm = 0; perm < 2; ++perm) {
        const double first = perm == 0 ? xs[0] : xs[1];
        const double second = perm == 0 ? xs[1] : xs[0];
        const TimeMap outer{q, t};
        for (const auto& [a, wa] : rule) {
            const double r1 = outer.r(a);
            const double p1 = density_value(e, r1, first, cfg);
            const TimeMap inner{q, t - r1};
            if (inner.t <= 0.0) continue;
            double inner_sum = 0.0;
            for (const auto& [b, wb] : rule) {
                inner_sum += wb * inner.jacobian(b) * density_value(e, inner.r(b), second - first, cfg);
            }
            total += wa * outer.jacobian(a) * p1 * inner_sum;
        }
    }
    return total;
}

MomentEstimate raw_moment(std::span<const double> xs, int k) {
    const std::size_t n = xs.size();
    if (n < 2) throw ConfigError("raw_moment: need at least two samples");
    std::vector<double> y(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = std::pow(xs[i], k);
        mean += y[i];
    }
    mean /= static_cast<double>(n);
    // Leave-one-out means θ_(i) = (nȳ − y_i)/(n − 1); the jackknife variance
    // (n−1)/n Σ(θ_(i) − θ̄)² reduces to Σ(y_i − ȳ)²/(n(n−1)).
    double ss = 0.0;
    for (double v : y) ss += (v - mean) * (v - mean);
    const double se = std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)));
    return {mean, se};
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw ConfigError("ks_statistic: empty sample");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double na = static_cast<double>(x.size());
    const double nb = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) ++i;
        while (j < y.size() && y[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double kolmogorov_survival(double lambda) {
    if (!(lambda > 0.0)) return 1.0;
    double q;
    if (lambda < 1.18) {
        // Theta-transformed series, fast for small λ.
        const double c = -M_PI * M_PI / (8.0 * lambda * lambda);
        double s = 0.0;
        for (int j = 1; j <= 50; ++j) {
            const double term = std::exp(c * (2.0 * j - 1.0) * (2.0 * j - 1.0));
            s += term;
            if (term < 1e-17 * s) break;
        }
        q = 1.0 - std::sqrt(2.0 * M_PI) / lambda * s;
    } else {
        double s = 0.0;
        for (int j = 1; j <= 100; ++j) {
            const double term = std::exp(-2.0 * j * j * lambda * lambda);
            s += (j % 2 ? term : -term);
            if (term < 1e-17) break;
        }
        q = 2.0 * s;
    }
    return std::clamp(q, 0.0, 1.0);
}

double ks_p_value(double d, std::size_t n1, std::size_t n2) {
    const double ne = static_cast<double>(n1) * static_cast<double>(n2) / static_cast<double>(n1 + n2);
    const double root = std::sqrt(ne);
    return kolmogorov_survival((root + 0.12 + 0.11 / root) * d);
}

ComparisonReport compare_distributions(const CltSampleSet& set) {
    const auto& a = set.samples;
    const auto& b = set.limit_samples;
    if (a.size() < kMinComparisonSamples || b.size() < kMinComparisonSamples) {
        std::ostringstream msg;
        msg << "compare_distributions: need at least " << kMinComparisonSamples << " samples per side, got "
            << a.size() << " and " << b.size();
        throw ConfigError(msg.str());
    }
    for (const auto* v : {&a, &b}) {
        for (double x : *v) {
            if (!std::isfinite(x)) throw DomainError("compare_distributions: non-finite sample");
        }
        const auto [lo, hi] = std::minmax_element(v->begin(), v->end());
        if (*lo == *hi) throw DomainError("compare_distributions: degenerate sample with zero variance");
    }
    ComparisonReport rep;
    bool moments_ok = true;
    for (int k = 1; k <= 4; ++k) {
        const auto e = raw_moment(a, k);
        const auto l = raw_moment(b, k);
        const std::size_t i = static_cast<std::size_t>(k - 1);
        rep.moments_empirical[i] = e.value;
        rep.moments_limit[i] = l.value;
        rep.se_empirical[i] = e.standard_error;
        rep.se_limit[i] = l.standard_error;
        const double diff = e.value - l.value;
        const double se = std::hypot(e.standard_error, l.standard_error);
        rep.moment_z_scores[i] = diff == 0.0 ? 0.0 : diff / se;
        moments_ok = moments_ok && std::abs(rep.moment_z_scores[i]) <= 3.0;
    }
    rep.ks_statistic = ks_statistic(a, b);
    rep.ks_p_value = ks_p_value(rep.ks_statistic, a.size(), b.size());
    rep.pass = moments_ok && rep.ks_p_value >= 0.01;
    return rep;
}

CltSampleSet run_clt(const CltConfig& cfg, const QuadratureConfig& qcfg) {
    const auto& ens = cfg.ensemble;
    CltSampleSet set;
    set.exp = ens.exp;
    set.t = ens.t;
    set.paths = ens.paths;
    set.dt = ens.dt;
    set.bin_width = ens.bin_width;
    set.seed = ens.seed;

    const auto functionals = simulate_functionals(ens, qcfg);
    const double mean = exact_mean(ens.exp, ens.t, qcfg).value;
    set.samples.reserve(functionals.size());
    for (const auto& f : functionals) set.samples.push_back(normalized_statistic(f.increment, mean, ens.exp, ens.t));

    const double c1 = c_psi1(ens.exp, qcfg).value;
    const LimitLawSampler sampler(ens.exp.index_at_zero(), c1, cfg.limit, qcfg);
    const std::int64_t count = cfg.limit_paths > 0 ? cfg.limit_paths : ens.paths;
    set.limit_samples = limit_law_samples(sampler, count, ens.seed, ens.threads);
    return set;
}

}  // namespace levylt
