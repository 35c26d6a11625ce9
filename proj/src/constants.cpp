#include "levylt/constants.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levylt/density.hpp"
#include "levylt/errors.hpp"

namespace levylt {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << what << " must be positive, got " << v;
        throw DomainError(msg.str());
    }
}

void require_convergent(const LevyExponent& e, const char* what) {
    if (!(e.index_at_zero() > 1.0)) throw DomainError(std::string(what) + ": integral diverges for index <= 1");
}

// φ(y) = y − 1 + e^{-y} without cancellation at small y.
double phi(double y) {
    if (y < 1e-4) return y * y * (0.5 - y * (1.0 / 6.0 - y / 24.0));
    return y - 1.0 + std::exp(-y);
}

// coef·∫_0^∞ sin^{2k}(p/2)·amp(p) dp for k = 1, 2 using
// sin²(p/2) = (1 − cos p)/2 and sin⁴(p/2) = (3 − 4cos p + cos 2p)/8 beyond head_end.
QuadResult sin_power_transform(const Integrand& amp, int k, double coef, double head_end,
                               const QuadratureConfig& cfg, const char* label) {
    const Integrand head = [&](double p) {
        const double s = std::sin(0.5 * p);
        const double s2 = s * s;
        return coef * (k == 1 ? s2 : s2 * s2) * amp(p);
    };
    std::vector<OscillatoryTerm> terms;
    auto add = [&](double c, double omega) {
        const double w = coef * c;
        terms.push_back({[&amp, w](double p) { return w * amp(p); }, omega, 0.0});
    };
    if (k == 1) {
        add(0.5, 0.0);
        add(-0.5, 1.0);
    } else {
        add(3.0 / 8.0, 0.0);
        add(-0.5, 1.0);
        add(1.0 / 8.0, 2.0);
    }
    return half_line_integral(head, terms, head_end, cfg, label);
}

// Integrals damped by e^{-sψ}: the range beyond ψ⁻¹(40/s) is below e^{-40}
// of the integrand's scale and is dropped.
QuadResult damped_integral(const LevyExponent& e, const Integrand& f, double s, const QuadratureConfig& cfg,
                           const char* label) {
    const double end = e.psi_inverse(40.0 / s);
    std::vector<double> pts{0.0};
    for (double p = end * 1e-6; p < std::min(end, M_PI); p *= 10.0) pts.push_back(p);
    const int periods = static_cast<int>(std::min(2000.0, std::floor(end / M_PI)));
    for (int i = 1; i <= periods; ++i) {
        if (i * M_PI > pts.back()) pts.push_back(i * M_PI);
    }
    if (end > pts.back()) pts.push_back(end);
    return integrate_adaptive(f, pts, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions, label);
}

double time_head_end(const LevyExponent& e, double t) {
    return std::max(16.0 * e.psi_inverse(1.0 / t), 8.0 * M_PI);
}

}  // namespace

QuadResult c_psi0(const LevyExponent& e, const QuadratureConfig& cfg) {
    require_convergent(e, "c_psi0");
    const Integrand amp = [&](double p) { return 1.0 / e.psi(p); };
    return sin_power_transform(amp, 1, 2.0 / M_PI, 8.0 * M_PI, cfg, "c_psi0");
}

QuadResult c_psi1(const LevyExponent& e, const QuadratureConfig& cfg) {
    require_convergent(e, "c_psi1");
    const Integrand amp = [&](double p) {
        const double q = e.psi(p);
        return 1.0 / (q * q);
    };
    return sin_power_transform(amp, 2, 16.0 / M_PI, 8.0 * M_PI, cfg, "c_psi1");
}

IdentityResult identity_213(const LevyExponent& e, const QuadratureConfig& cfg) {
    require_convergent(e, "identity_213");
    const auto ratio = [&](double p) {
        const double q = e.psi(p);
        return e.psi_derivatives(p).first / (q * q);
    };
    const Integrand head = [&](double p) {
        const double p2 = p * p;
        const double sin_minus = p < 1e-2 ? -p * p2 * (1.0 / 6.0 - p2 * (1.0 / 120.0 - p2 / 5040.0)) : std::sin(p) - p;
        return sin_minus * ratio(p) / M_PI;
    };
    const OscillatoryTerm terms[2] = {
        {[&](double p) { return ratio(p) / M_PI; }, 1.0, 0.5 * M_PI},
        {[&](double p) { return -p * ratio(p) / M_PI; }, 0.0, 0.0},
    };
    const QuadResult lhs = half_line_integral(head, terms, 8.0 * M_PI, cfg, "identity_213");
    const QuadResult c0 = c_psi0(e, cfg);
    return {lhs.value, std::abs(lhs.value + c0.value)};
}

ParsevalPair parseval_pair(const LevyExponent& e, double r, double rp, const QuadratureConfig& cfg,
                           double spatial_tol) {
    require_positive(r, "parseval_pair: r");
    require_positive(rp, "parseval_pair: r_prime");

    const Integrand rhs_f = [&](double p) {
        const double s = std::sin(0.5 * p);
        const double s2 = s * s;
        return 16.0 / M_PI * s2 * s2 * std::exp(-(r + rp) * e.psi(p));
    };
    const double rhs = damped_integral(e, rhs_f, r + rp, cfg, "parseval rhs").value;

    const auto product = [&](double x) {
        return delta2_density({e, r, x, 1.0}, cfg).value * delta2_density({e, rp, x, 1.0}, cfg).value;
    };
    // Spatial scale of the narrower density.
    const double sigma = 1.0 / e.psi_inverse(1.0 / std::min(r, rp));
    const double sigma_wide = 1.0 / e.psi_inverse(1.0 / std::max(r, rp));

    double x_max = 8.0 * (sigma_wide + 1.0);
    double tail = std::abs(product(x_max)) * x_max / 3.0;
    while (tail > 0.1 * spatial_tol) {
        x_max *= 2.0;
        if (x_max > 1e5) throw NumericalError("parseval_pair: spatial truncation did not converge", rhs, tail);
        tail = std::abs(product(x_max)) * x_max / 3.0;
    }

    // Trapezoid on the even integrand: T(h) = h(f(0) + 2Σ_{k≥1} f(kh)).
    double hx = std::min(0.5 * sigma, 0.5);
    int n = static_cast<int>(std::ceil(x_max / hx));
    hx = x_max / n;
    std::vector<double> f(n + 1);
    for (int k = 0; k <= n; ++k) f[k] = product(k * hx);
    auto trapezoid = [&](const std::vector<double>& v, double step) {
        double s = v[0];
        for (std::size_t k = 1; k < v.size(); ++k) s += 2.0 * v[k];
        return s * step;
    };
    double coarse = trapezoid(f, hx);
    for (int level = 0; level < 6; ++level) {
        std::vector<double> g(2 * n + 1);
        for (int k = 0; k <= n; ++k) g[2 * k] = f[k];
        for (int k = 0; k < n; ++k) g[2 * k + 1] = product((2 * k + 1) * 0.5 * hx);
        const double fine = trapezoid(g, 0.5 * hx);
        const double err = std::abs(fine - coarse) + tail;
        f = std::move(g);
        n *= 2;
        hx *= 0.5;
        if (err <= spatial_tol) return {fine, rhs, err, x_max};
        coarse = fine;
    }
    throw NumericalError("parseval_pair: spatial step refinement did not converge", coarse, tail);
}

QuadResult h32_residual(const LevyExponent& e, double t, const QuadratureConfig& cfg) {
    require_positive(t, "h32_residual: t");
    const Integrand f = [&](double p) {
        const double q = e.psi(p);
        const double s = std::sin(0.5 * p);
        const double s2 = s * s;
        const double d = std::exp(-t * q);
        return 16.0 / M_PI * s2 * s2 / (q * q) * d * (2.0 - d);
    };
    return damped_integral(e, f, t, cfg, "h32_residual");
}

QuadResult exact_mean(const LevyExponent& e, double t, const QuadratureConfig& cfg) {
    require_positive(t, "exact_mean: t");
    const Integrand amp = [&](double p) {
        const double q = e.psi(p);
        return phi(t * q) / (q * q);
    };
    return sin_power_transform(amp, 1, 8.0 / M_PI, time_head_end(e, t), cfg, "exact_mean");
}

QuadResult mean_gap(const LevyExponent& e, double t, const QuadratureConfig& cfg) {
    require_positive(t, "mean_gap: t");
    const Integrand amp = [&](double p) {
        const double q = e.psi(p);
        return -std::expm1(-t * q) / (q * q);
    };
    return sin_power_transform(amp, 1, 8.0 / M_PI, time_head_end(e, t), cfg, "mean_gap");
}

QuadResult exact_alpha_mean(const LevyExponent& e, double t, const QuadratureConfig& cfg) {
    return near_lag_mean_alpha(e, t, t, cfg);
}

namespace {

// ∫_0^τ (t−r) e^{-rψ} dr = (t−τ)(1 − e^{-τψ})/ψ + φ(τψ)/ψ².
double near_kernel(double q, double t, double tau) {
    if (q == 0.0) return t * tau - 0.5 * tau * tau;
    return (t - tau) * (-std::expm1(-tau * q)) / q + phi(tau * q) / (q * q);
}

void require_lag(double t, double tau) {
    require_positive(t, "t");
    require_positive(tau, "tau");
    if (tau > t) throw DomainError("tau must not exceed t");
}

}  // namespace

QuadResult near_lag_mean_increment(const LevyExponent& e, double t, double tau, const QuadratureConfig& cfg) {
    require_lag(t, tau);
    const Integrand amp = [&](double p) { return near_kernel(e.psi(p), t, tau); };
    return sin_power_transform(amp, 1, 8.0 / M_PI, time_head_end(e, tau), cfg, "near_lag_mean_increment");
}

QuadResult near_lag_mean_alpha(const LevyExponent& e, double t, double tau, const QuadratureConfig& cfg) {
    require_lag(t, tau);
    const Integrand f = [&](double p) { return 2.0 / M_PI * near_kernel(e.psi(p), t, tau); };
    const double split = e.psi_inverse(1.0 / tau);
    const double pts[3] = {0.0, 0.5 * split, split};
    QuadResult head = integrate_adaptive(f, pts, cfg.abs_tol, cfg.rel_tol, cfg.max_subdivisions, "near_lag_mean_alpha");
    const QuadResult tail = integrate_decaying_tail(f, split, cfg, "near_lag_mean_alpha");
    head.value += tail.value;
    head.error += tail.error;
    head.evaluations += tail.evaluations;
    return head;
}

ConstantsReport constants_report(const LevyExponent& e, const std::vector<double>& t_list,
                                 const QuadratureConfig& cfg) {
    ConstantsReport rep;
    rep.c_psi_0 = c_psi0(e, cfg).value;
    rep.c_psi_1 = c_psi1(e, cfg).value;
    const auto id = identity_213(e, cfg);
    rep.identity_213_value = id.value;
    rep.identity_213_residual = id.residual;
    const double rs[3] = {0.5, 1.0, 2.0};
    for (double r : rs) {
        for (double rp : rs) {
            const auto pp = parseval_pair(e, r, rp, cfg);
            rep.parseval_residuals.push_back(std::abs(pp.lhs - pp.rhs));
        }
    }
    std::vector<double> ts = t_list;
    std::sort(ts.begin(), ts.end());
    for (double t : ts) {
        rep.h32_residuals.emplace_back(t, h32_residual(e, t, cfg).value);
        rep.exact_means.emplace_back(t, exact_mean(e, t, cfg).value);
    }
    if (ts.size() >= 2) {
        const auto& a = rep.exact_means[ts.size() - 2];
        const auto& b = rep.exact_means[ts.size() - 1];
        rep.mean_slope = (b.second - a.second) / (b.first - a.first);
    }
    return rep;
}

}  // namespace levylt
