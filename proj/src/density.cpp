#include "levylt/density.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "levylt/errors.hpp"

namespace levylt {

namespace {

struct CosTerm {
    double coef;
    double omega;
};

// Merge terms with equal |omega| and drop zero coefficients.
std::vector<CosTerm> normalize(std::vector<CosTerm> terms) {
    for (auto& t : terms) t.omega = std::abs(t.omega);
    std::sort(terms.begin(), terms.end(), [](const CosTerm& a, const CosTerm& b) { return a.omega < b.omega; });
    std::vector<CosTerm> out;
    for (const auto& t : terms) {
        if (!out.empty() && out.back().omega == t.omega) out.back().coef += t.coef;
        else out.push_back(t);
    }
    std::erase_if(out, [](const CosTerm& t) { return t.coef == 0.0; });
    return out;
}

// ∫_0^∞ amplitude(p)·Σ coef_j cos(omega_j p) dp, with `head` the same
// integrand written without cancellation near p = 0.
QuadResult cosine_transform(const Integrand& amplitude, const Integrand& head, std::vector<CosTerm> raw_terms,
                            double head_end, const QuadratureConfig& cfg, std::string_view label) {
    const auto terms = normalize(std::move(raw_terms));
    std::vector<OscillatoryTerm> osc;
    osc.reserve(terms.size());
    for (const auto& t : terms) {
        const double c = t.coef;
        osc.push_back({[&amplitude, c](double p) { return c * amplitude(p); }, t.omega, 0.0});
    }
    return half_line_integral(head, osc, head_end, cfg, label);
}

void require_time(double s, const char* what) {
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError(std::string(what) + ": time must be positive");
}

// Frequency beyond which exp(-sψ) < abs_tol·e^{-2}, and the start of the
// oscillatory tail given the fastest frequency present.
double density_head_end(const LevyExponent& e, double s, double omega_max, const QuadratureConfig& cfg) {
    const double cutoff = cfg.p_truncation > 0.0
                              ? cfg.p_truncation
                              : e.psi_inverse((-std::log(cfg.abs_tol) + 2.0) / s);
    if (omega_max == 0.0 || cutoff * omega_max / M_PI <= 2048.0) return cutoff;
    // Many periods before the cutoff: when e^{-sψ} is still flat after 2048
    // half periods, the extrapolated half-period sums converge right away.
    const double body = std::min(cutoff, 4.0 * e.psi_inverse(1.0 / s));
    if (body * omega_max / M_PI <= 2048.0) return std::max(body, std::min(cutoff, 40.0 * M_PI / omega_max));
    return 40.0 * M_PI / omega_max;
}

// Head for slowly decaying amplitudes such as (1 − e^{-tψ})/ψ.
double potential_head_end(const LevyExponent& e, double t, double omega_max) {
    double end = std::max(16.0 * e.psi_inverse(1.0 / t), 2.0 * M_PI);
    if (omega_max > 0.0) end = std::max(end, 16.0 * M_PI / omega_max);
    return end;
}

// (1 − e^{-tψ})/ψ with its limit t at ψ = 0.
double potential_amplitude(const LevyExponent& e, double t, double p) {
    const double q = e.psi(p);
    if (q == 0.0) return t;
    return -std::expm1(-t * q) / q;
}

}  // namespace

QuadResult transition_density(const DensityRequest& req, const QuadratureConfig& cfg) {
    require_time(req.s, "transition_density");
    const auto& e = req.exp;
    const double s = req.s;
    const double x = req.x;
    const Integrand amp = [&](double p) { return std::exp(-s * e.psi(p)); };
    const Integrand head = [&](double p) { return std::cos(p * x) * std::exp(-s * e.psi(p)) / M_PI; };
    return cosine_transform(amp, head, {{1.0 / M_PI, x}}, density_head_end(e, s, std::abs(x), cfg), cfg,
                            "transition_density");
}

QuadResult delta1_density(const DensityRequest& req, const QuadratureConfig& cfg) {
    require_time(req.s, "delta1_density");
    if (req.gamma == 0.0) return {};
    const auto& e = req.exp;
    const double s = req.s;
    const double x = req.x;
    const double g = req.gamma;
    const Integrand amp = [&](double p) { return std::exp(-s * e.psi(p)); };
    // cos p(x+γ) − cos px = −2 sin(p(x+γ/2)) sin(pγ/2)
    const Integrand head = [&](double p) {
        return -2.0 * std::sin(p * (x + 0.5 * g)) * std::sin(0.5 * p * g) * std::exp(-s * e.psi(p)) / M_PI;
    };
    const double wmax = std::max(std::abs(x + g), std::abs(x));
    return cosine_transform(amp, head, {{1.0 / M_PI, x + g}, {-1.0 / M_PI, x}},
                            density_head_end(e, s, wmax, cfg), cfg, "delta1_density");
}

QuadResult delta2_density(const DensityRequest& req, const QuadratureConfig& cfg) {
    require_time(req.s, "delta2_density");
    if (req.gamma == 0.0) return {};
    const auto& e = req.exp;
    const double s = req.s;
    const double x = req.x;
    const double g = req.gamma;
    const Integrand amp = [&](double p) { return std::exp(-s * e.psi(p)); };
    const Integrand head = [&](double p) {
        const double h = std::sin(0.5 * p * g);
        return 4.0 * std::cos(p * x) * h * h * std::exp(-s * e.psi(p)) / M_PI;
    };
    const double wmax = std::max(std::abs(x + g), std::abs(x - g));
    return cosine_transform(amp, head, {{2.0 / M_PI, x}, {-1.0 / M_PI, x + g}, {-1.0 / M_PI, x - g}},
                            density_head_end(e, s, wmax, cfg), cfg, "delta2_density");
}

QuadResult u_integral(const LevyExponent& e, double x, double t, const QuadratureConfig& cfg) {
    require_time(t, "u_integral");
    const Integrand amp = [&](double p) { return potential_amplitude(e, t, p); };
    const Integrand head = [&](double p) { return std::cos(p * x) * potential_amplitude(e, t, p) / M_PI; };
    return cosine_transform(amp, head, {{1.0 / M_PI, x}}, potential_head_end(e, t, std::abs(x)), cfg, "u_integral");
}

QuadResult signed_delta1_time_integral(const LevyExponent& e, double x, double t, double g,
                                       const QuadratureConfig& cfg) {
    require_time(t, "signed_delta1_time_integral");
    if (g == 0.0) return {};
    const Integrand amp = [&](double p) { return potential_amplitude(e, t, p); };
    const Integrand head = [&](double p) {
        return -2.0 * std::sin(p * (x + 0.5 * g)) * std::sin(0.5 * p * g) * potential_amplitude(e, t, p) / M_PI;
    };
    const double wmax = std::max(std::abs(x + g), std::abs(x));
    return cosine_transform(amp, head, {{1.0 / M_PI, x + g}, {-1.0 / M_PI, x}}, potential_head_end(e, t, wmax), cfg,
                            "signed_delta1_time_integral");
}

QuadResult signed_delta2_time_integral(const LevyExponent& e, double x, double t, double g,
                                       const QuadratureConfig& cfg) {
    require_time(t, "signed_delta2_time_integral");
    if (g == 0.0) return {};
    const Integrand amp = [&](double p) { return potential_amplitude(e, t, p); };
    const Integrand head = [&](double p) {
        const double h = std::sin(0.5 * p * g);
        return 4.0 * std::cos(p * x) * h * h * potential_amplitude(e, t, p) / M_PI;
    };
    const double wmax = std::max(std::abs(x + g), std::abs(x - g));
    return cosine_transform(amp, head, {{2.0 / M_PI, x}, {-1.0 / M_PI, x + g}, {-1.0 / M_PI, x - g}},
                            potential_head_end(e, t, wmax), cfg, "signed_delta2_time_integral");
}

namespace {

using DensityOp = QuadResult (*)(const DensityRequest&, const QuadratureConfig&);
using SignedOp = QuadResult (*)(const LevyExponent&, double, double, double, const QuadratureConfig&);

// ∫_0^t |f(s)| ds: the segment [0, s0] through the signed frequency form
// (the sign of f is fixed for small s), the rest by composite Simpson in
// log s on cfg.time_nodes geometric nodes.
QuadResult abs_time_integral(const LevyExponent& e, double x, double t, double g, const QuadratureConfig& cfg,
                             DensityOp density, SignedOp signed_integral) {
    require_time(t, "time integral");
    if (g == 0.0) return {};
    const double s0 = std::min(t * 1e-4, 1e-2);
    QuadResult head = signed_integral(e, x, s0, g, cfg);

    int n = std::max(cfg.time_nodes, 5);
    if (n % 2 == 0) ++n;
    const double log_lo = std::log(s0);
    const double step = (std::log(t) - log_lo) / (n - 1);
    std::vector<double> values(n);
    long evals = head.evaluations;
    double density_err = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s = std::exp(log_lo + step * i);
        const QuadResult d = density({e, s, x, g}, cfg);
        values[i] = s * std::abs(d.value);
        density_err += s * d.error;
        evals += d.evaluations;
    }
    auto simpson = [&](int stride) {
        double sum = values.front() + values.back();
        const int m = (n - 1) / stride;
        for (int k = 1; k < m; ++k) sum += values[k * stride] * (k % 2 ? 4.0 : 2.0);
        return sum * step * stride / 3.0;
    };
    const double fine = simpson(1);
    double err = 0.0;
    if ((n - 1) % 4 == 0) err = std::abs(fine - simpson(2)) / 15.0;
    return {std::abs(head.value) + fine, head.error + err + density_err * step, evals};
}

}  // namespace

QuadResult v_integral(const LevyExponent& e, double x, double t, double g, const QuadratureConfig& cfg) {
    return abs_time_integral(e, x, t, g, cfg, &delta1_density, &signed_delta1_time_integral);
}

QuadResult w_integral(const LevyExponent& e, double x, double t, double g, const QuadratureConfig& cfg) {
    return abs_time_integral(e, x, t, g, cfg, &delta2_density, &signed_delta2_time_integral);
}

}  // namespace levylt
