#include "levylt/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "levylt/constants.hpp"
#include "levylt/errors.hpp"
#include "levylt/parallel.hpp"

namespace levylt {

namespace {

// Draws increments of one exponent at a fixed step, keeping the
// distribution objects (and the normal generator's spare value) alive.
class IncrementSampler {
public:
    IncrementSampler(const LevyExponent& exp, double dt) {
        for (const auto& c : exp.terms()) {
            if (c.beta == 2.0) {
                parts_.push_back({true, std::sqrt(2.0 * c.weight * dt), 2.0});
            } else {
                parts_.push_back({false, std::pow(c.weight * dt, 1.0 / c.beta), c.beta});
            }
        }
    }

    double operator()(Philox& rng) {
        double sum = 0.0;
        for (const auto& p : parts_) sum += p.scale * (p.gaussian ? normal_(rng) : stable(p.beta, rng));
        return sum;
    }

private:
    struct Part {
        bool gaussian;
        double scale;
        double beta;
    };

    // Chambers–Mallows–Stuck, symmetric case: characteristic function e^{-|λ|^β}.
    double stable(double beta, Philox& rng) {
        const double v = M_PI * (rng.uniform_open() - 0.5);
        const double w = exponential_(rng);
        const double cv = std::cos(v);
        return std::sin(beta * v) / std::pow(cv, 1.0 / beta) *
               std::pow(std::cos(v - beta * v) / w, (1.0 - beta) / beta);
    }

    std::vector<Part> parts_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::exponential_distribution<double> exponential_{1.0};
};

std::int64_t step_count(double t, double dt, std::int64_t max_steps) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("t must be a non-negative finite number");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be a positive finite number");
    const double ratio = t / dt;
    const double n = std::round(ratio);
    if (std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream msg;
        msg << "t/dt must be an integer, got " << ratio;
        throw ConfigError(msg.str());
    }
    if (n > static_cast<double>(max_steps)) {
        std::ostringstream msg;
        msg << "t/dt = " << n << " exceeds the step budget " << max_steps;
        throw ConfigError(msg.str());
    }
    return static_cast<std::int64_t>(n);
}

}  // namespace

double LocalTimeField::mass() const noexcept {
    double s = 0.0;
    for (double c : counts) s += c;
    return s * bin_width;
}

double sample_increment(const LevyExponent& exp, double dt, Philox& rng) {
    if (!(dt > 0.0)) throw ConfigError("dt must be positive");
    IncrementSampler sampler(exp, dt);
    return sampler(rng);
}

ContinuousPath simulate_path_with(const LevyExponent& exp, double t, double dt, Philox& rng,
                                  std::int64_t max_steps) {
    ContinuousPath path{exp, dt, step_count(t, dt, max_steps), {}, 0, 0};
    path.positions.resize(static_cast<std::size_t>(path.n_steps) + 1);
    path.positions[0] = 0.0;
    IncrementSampler sampler(exp, dt);
    double x = 0.0;
    for (std::int64_t k = 1; k <= path.n_steps; ++k) {
        x += sampler(rng);
        path.positions[static_cast<std::size_t>(k)] = x;
    }
    return path;
}

ContinuousPath simulate_path(const LevyExponent& exp, double t, double dt, std::uint64_t seed,
                             std::uint64_t path_index, std::int64_t max_steps) {
    Philox rng = make_stream(seed, StreamKind::Path, path_index);
    ContinuousPath path = simulate_path_with(exp, t, dt, rng, max_steps);
    path.seed = seed;
    path.path_index = path_index;
    return path;
}

std::int64_t bins_per_unit(double h) {
    if (!(h > 0.0) || h > 1.0) throw ConfigError("h_grid must lie in (0, 1]");
    const double inv = 1.0 / h;
    const double k = std::round(inv);
    if (std::abs(inv - k) > 1e-9 * k) {
        std::ostringstream msg;
        msg << "h_grid: 1/h_grid must be an integer, got " << inv;
        throw ConfigError(msg.str());
    }
    return static_cast<std::int64_t>(k);
}

std::int64_t bin_of(double x, double h) noexcept { return static_cast<std::int64_t>(std::floor(x / h)); }

LocalTimeField field_from_bins(const std::vector<std::int64_t>& bins, double dt, double h) {
    LocalTimeField field;
    field.bin_width = h;
    field.t = dt * static_cast<double>(bins.size());
    if (bins.empty()) return field;
    const auto [lo, hi] = std::minmax_element(bins.begin(), bins.end());
    field.first_bin = *lo;
    std::vector<std::int64_t> tally(static_cast<std::size_t>(*hi - *lo + 1), 0);
    for (auto b : bins) ++tally[static_cast<std::size_t>(b - *lo)];
    field.counts.resize(tally.size());
    const double w = dt / h;
    for (std::size_t i = 0; i < tally.size(); ++i) field.counts[i] = static_cast<double>(tally[i]) * w;
    return field;
}

namespace {

std::vector<std::int64_t> path_bins(const ContinuousPath& path, double h, std::int64_t begin, std::int64_t end) {
    std::vector<std::int64_t> bins;
    bins.reserve(static_cast<std::size_t>(end - begin));
    for (std::int64_t k = begin; k < end; ++k) bins.push_back(bin_of(path.positions[static_cast<std::size_t>(k)], h));
    return bins;
}

}  // namespace

LocalTimeField estimate_local_time(const ContinuousPath& path, double h) {
    bins_per_unit(h);
    if (path.positions.empty()) throw ConfigError("estimate_local_time: empty path");
    return field_from_bins(path_bins(path, h, 0, path.n_steps), path.dt, h);
}

double functional_increment_l2(const LocalTimeField& f) {
    if (f.counts.empty()) return 0.0;
    const auto shift = static_cast<std::size_t>(bins_per_unit(f.bin_width));
    const std::size_t n = f.counts.size();
    double sum = 0.0;
    // Bins b with either b or b + shift in the support.
    for (std::size_t i = 0; i < n + shift; ++i) {
        const double up = i < n ? f.counts[i] : 0.0;
        const double down = i >= shift ? f.counts[i - shift] : 0.0;
        const double d = up - down;
        sum += d * d;
    }
    return sum * f.bin_width;
}

double functional_alpha(const LocalTimeField& f) {
    double sum = 0.0;
    for (double c : f.counts) sum += c * c;
    return sum * f.bin_width;
}

double increment_cross(const LocalTimeField& a, const LocalTimeField& b) {
    if (a.bin_width != b.bin_width) throw ConfigError("increment_cross: fields use different bins");
    if (a.counts.empty() || b.counts.empty()) return 0.0;
    const std::int64_t shift = bins_per_unit(a.bin_width);
    auto at = [](const LocalTimeField& f, std::int64_t bin) {
        const std::int64_t i = bin - f.first_bin;
        return i >= 0 && i < static_cast<std::int64_t>(f.counts.size()) ? f.counts[static_cast<std::size_t>(i)] : 0.0;
    };
    const std::int64_t lo = std::min(a.first_bin, b.first_bin) - shift;
    const std::int64_t hi = std::max(a.first_bin + static_cast<std::int64_t>(a.counts.size()),
                                     b.first_bin + static_cast<std::int64_t>(b.counts.size()));
    double sum = 0.0;
    for (std::int64_t x = lo; x < hi; ++x) {
        sum += (at(a, x + shift) - at(a, x)) * (at(b, x + shift) - at(b, x));
    }
    return sum * a.bin_width;
}

double default_tau(double t, double dt) {
    const double tau = std::min(1.0, t / 100.0);
    const double m = std::max(1.0, std::round(tau / dt));
    return std::min(m * dt, t);
}

NearLagCorrection make_near_lag_correction(const LevyExponent& exp, double t, double dt, double tau,
                                           const QuadratureConfig& cfg) {
    if (!(tau > 0.0)) throw ConfigError("tau must be positive");
    const double m = std::round(tau / dt);
    if (m < 1.0 || std::abs(m * dt - tau) > 1e-9 * tau) throw ConfigError("tau must be a positive multiple of dt");
    if (tau > t) throw ConfigError("tau must not exceed t");
    NearLagCorrection near;
    near.m0 = static_cast<std::int64_t>(m);
    near.mean_increment = near_lag_mean_increment(exp, t, tau, cfg).value;
    near.mean_alpha = near_lag_mean_alpha(exp, t, tau, cfg).value;
    return near;
}

PathFunctionals path_functionals(const ContinuousPath& path, double h, const NearLagCorrection& near) {
    const std::int64_t shift = bins_per_unit(h);
    const auto bins = path_bins(path, h, 0, path.n_steps);
    const LocalTimeField field = field_from_bins(bins, path.dt, h);
    PathFunctionals out;
    out.increment_raw = functional_increment_l2(field);
    out.alpha_raw = functional_alpha(field);
    out.increment = out.increment_raw;
    out.alpha = out.alpha_raw;
    if (near.m0 <= 0) return out;

    // Ordered pairs (k, l) with |k − l| < m0 at full weight and |k − l| = m0
    // at half weight. Kernel of the increment functional: 2 at equal bins,
    // −1 at bins one spatial unit apart.
    const auto n = static_cast<std::int64_t>(bins.size());
    double same = static_cast<double>(n);
    double unit = 0.0;
    for (std::int64_t m = 1; m <= near.m0 && m < n; ++m) {
        const double w = m == near.m0 ? 1.0 : 2.0;
        std::int64_t s = 0;
        std::int64_t u = 0;
        for (std::int64_t k = 0; k + m < n; ++k) {
            const std::int64_t d = bins[static_cast<std::size_t>(k + m)] - bins[static_cast<std::size_t>(k)];
            s += d == 0;
            u += d == shift || d == -shift;
        }
        same += w * static_cast<double>(s);
        unit += w * static_cast<double>(u);
    }
    const double scale = path.dt * path.dt / h;
    out.increment = out.increment_raw - scale * (2.0 * same - unit) + near.mean_increment;
    out.alpha = out.alpha_raw - scale * same + near.mean_alpha;
    return out;
}

std::vector<PathFunctionals> simulate_functionals(const EnsembleConfig& cfg, const QuadratureConfig& qcfg) {
    if (cfg.paths < 1) throw ConfigError("paths must be positive");
    bins_per_unit(cfg.bin_width);
    const std::int64_t n = step_count(cfg.t, cfg.dt, cfg.max_steps);
    if (n < 1) throw ConfigError("t must be positive");
    NearLagCorrection near;
    if (cfg.debias) {
        const double tau = cfg.tau > 0.0 ? cfg.tau : default_tau(cfg.t, cfg.dt);
        near = make_near_lag_correction(cfg.exp, cfg.t, cfg.dt, tau, qcfg);
    }
    std::vector<PathFunctionals> out(static_cast<std::size_t>(cfg.paths));
    parallel_for(out.size(), cfg.threads, [&](std::size_t i) {
        Philox rng = make_stream(cfg.seed, cfg.stream, i);
        const ContinuousPath path = simulate_path_with(cfg.exp, cfg.t, cfg.dt, rng, cfg.max_steps);
        out[i] = path_functionals(path, cfg.bin_width, near);
    });
    return out;
}

AdditivityResult additivity_check(const LevyExponent& exp, double t, int l, double dt, std::uint64_t seed,
                                  double h) {
    if (l < 1) throw ConfigError("l must be positive");
    const ContinuousPath path = simulate_path(exp, t, dt, seed);
    if (path.n_steps % l != 0) throw ConfigError("l must divide the number of steps");
    const std::int64_t block = path.n_steps / l;
    const LocalTimeField full = estimate_local_time(path, h);

    // Bin discrepancy on integer step tallies, so exact additivity reads as 0.
    std::vector<LocalTimeField> parts;
    std::map<std::int64_t, std::int64_t> tally_full, tally_parts;
    for (std::int64_t k = 0; k < path.n_steps; ++k) ++tally_full[bin_of(path.positions[k], h)];
    for (int j = 0; j < l; ++j) {
        const auto bins = path_bins(path, h, j * block, (j + 1) * block);
        for (auto b : bins) ++tally_parts[b];
        parts.push_back(field_from_bins(bins, dt, h));
    }

    AdditivityResult res;
    std::int64_t worst = 0;
    for (const auto& [b, n] : tally_full) {
        const auto it = tally_parts.find(b);
        worst = std::max(worst, std::abs(n - (it == tally_parts.end() ? 0 : it->second)));
    }
    for (const auto& [b, n] : tally_parts) {
        if (!tally_full.count(b)) worst = std::max(worst, n);
    }
    res.max_bin_discrepancy = static_cast<double>(worst) * dt / h;
    double cross = 0.0;
    for (const auto& a : parts)
        for (const auto& b : parts) cross += increment_cross(a, b);
    res.decomposition_residual = std::abs(functional_increment_l2(full) - cross);
    return res;
}

LatticePath lattice_from_steps(const std::vector<std::int8_t>& steps) {
    LatticePath path;
    path.n = static_cast<std::int64_t>(steps.size());
    path.steps = steps;
    path.positions.resize(steps.size() + 1);
    path.positions[0] = 0;
    for (std::size_t j = 0; j < steps.size(); ++j) {
        if (steps[j] != 1 && steps[j] != -1) throw ConfigError("lattice steps must be +1 or -1");
        path.positions[j + 1] = path.positions[j] + steps[j];
    }
    return path;
}

LatticePath random_walk(std::int64_t n, std::uint64_t seed, std::uint64_t walk_index) {
    if (n < 0) throw ConfigError("n must be non-negative");
    Philox rng = make_stream(seed, StreamKind::Walk, walk_index);
    std::vector<std::int8_t> steps(static_cast<std::size_t>(n));
    std::uint32_t word = 0;
    for (std::int64_t j = 0; j < n; ++j) {
        if (j % 32 == 0) word = rng();
        steps[static_cast<std::size_t>(j)] = (word >> (j % 32)) & 1u ? 1 : -1;
    }
    LatticePath path = lattice_from_steps(steps);
    path.seed = seed;
    return path;
}

std::map<std::int64_t, std::int64_t> rw_local_times(const LatticePath& path) {
    std::map<std::int64_t, std::int64_t> ell;
    for (std::size_t j = 1; j < path.positions.size(); ++j) ++ell[path.positions[j]];
    return ell;
}

std::int64_t rw_hamiltonian_pairs(const LatticePath& path) {
    const std::size_t n = path.positions.size();
    if (n <= 4097) {
        std::int64_t same = 0;
        std::int64_t adjacent = 0;
        for (std::size_t i = 1; i < n; ++i) {
            for (std::size_t j = 1; j < n; ++j) {
                const std::int64_t d = path.positions[i] - path.positions[j];
                same += d == 0;
                adjacent += d == 1 || d == -1;
            }
        }
        return 2 * same - adjacent;
    }
    // Long walks: count the same pairs from the sorted positions.
    std::vector<std::int64_t> s(path.positions.begin() + 1, path.positions.end());
    std::sort(s.begin(), s.end());
    std::int64_t same = 0;
    std::int64_t adjacent = 0;
    for (std::size_t i = 0; i < s.size();) {
        std::size_t j = i;
        while (j < s.size() && s[j] == s[i]) ++j;
        const auto run = static_cast<std::int64_t>(j - i);
        same += run * run;
        const auto next = std::equal_range(s.begin() + static_cast<std::ptrdiff_t>(j), s.end(), s[i] + 1);
        adjacent += 2 * run * static_cast<std::int64_t>(next.second - next.first);
        i = j;
    }
    return 2 * same - adjacent;
}

std::int64_t rw_hamiltonian_increments(const LatticePath& path) {
    const auto ell = rw_local_times(path);
    std::int64_t sum = 0;
    auto at = [&](std::int64_t x) {
        const auto it = ell.find(x);
        return it == ell.end() ? std::int64_t{0} : it->second;
    };
    if (ell.empty()) return 0;
    for (std::int64_t x = ell.begin()->first - 1; x <= ell.rbegin()->first; ++x) {
        const std::int64_t d = at(x + 1) - at(x);
        sum += d * d;
    }
    return sum;
}

std::int64_t rw_hamiltonian(const LatticePath& path) {
    const std::int64_t a = rw_hamiltonian_pairs(path);
    const std::int64_t b = rw_hamiltonian_increments(path);
    if (a != b) {
        std::ostringstream msg;
        msg << "rw_hamiltonian: pair form " << a << " differs from increment form " << b;
        throw InvariantViolation(msg.str());
    }
    return a;
}

LocalTimeField lattice_field(const LatticePath& path) {
    std::vector<std::int64_t> bins(path.positions.begin() + (path.positions.empty() ? 0 : 1), path.positions.end());
    return field_from_bins(bins, 1.0, 1.0);
}

}  // namespace levylt
