#include "levylt/exponent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "levylt/errors.hpp"
#include "levylt/quadrature.hpp"

namespace levylt {

namespace {

void check_index(double beta) {
    if (!(beta > 1.0 && beta <= 2.0)) {
        std::ostringstream msg;
        msg << "beta must lie in (1, 2], got " << beta;
        throw ConfigError(msg.str());
    }
}

void check_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << field << " must be a positive finite number, got " << v;
        throw ConfigError(msg.str());
    }
}

}  // namespace

LevyExponent::LevyExponent(Family family, double scale, std::vector<StableComponent> terms)
    : family_(family), scale_(scale), terms_(std::move(terms)) {}

LevyExponent LevyExponent::stable(double beta, double scale) {
    check_index(beta);
    check_positive(scale, "scale");
    return LevyExponent(Family::Stable, scale, {{scale, beta}});
}

LevyExponent LevyExponent::brownian_half() {
    return LevyExponent(Family::BrownianHalf, 1.0, {{0.5, 2.0}});
}

LevyExponent LevyExponent::mixture(std::vector<StableComponent> components, double scale) {
    if (components.empty()) throw ConfigError("components: a stable mixture needs at least one component");
    check_positive(scale, "scale");
    for (auto& c : components) {
        check_index(c.beta);
        check_positive(c.weight, "weight");
        c.weight *= scale;
    }
    return LevyExponent(Family::StableMixture, scale, std::move(components));
}

double LevyExponent::index_at_zero() const noexcept {
    double b = 2.0;
    for (const auto& c : terms_) b = std::min(b, c.beta);
    return b;
}

double LevyExponent::index_at_infinity() const noexcept {
    double b = 1.0;
    for (const auto& c : terms_) b = std::max(b, c.beta);
    return b;
}

double LevyExponent::psi(double lambda) const noexcept {
    const double a = std::abs(lambda);
    if (a == 0.0) return 0.0;
    double sum = 0.0;
    for (const auto& c : terms_) sum += c.weight * (c.beta == 2.0 ? a * a : std::pow(a, c.beta));
    return sum;
}

double LevyExponent::psi_inverse(double y) const {
    if (!(y >= 0.0)) throw DomainError("psi_inverse: argument must be non-negative");
    if (y == 0.0) return 0.0;
    if (terms_.size() == 1) {
        const auto& c = terms_.front();
        return c.beta == 2.0 ? std::sqrt(y / c.weight) : std::pow(y / c.weight, 1.0 / c.beta);
    }
    // Monotone bisection on [0, hi] with hi doubled until it brackets y.
    double lo = 0.0;
    double hi = 1.0;
    int guard = 0;
    while (psi(hi) < y) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 2100) throw NumericalError("psi_inverse: could not bracket the root", hi, hi);
    }
    if (lo == 0.0) {
        while (psi(hi * 0.5) >= y && hi > std::numeric_limits<double>::min()) hi *= 0.5;
        lo = hi * 0.5;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (psi(mid) < y) lo = mid; else hi = mid;
        if (hi - lo <= 1e-15 * hi) return 0.5 * (lo + hi);
    }
    throw NumericalError("psi_inverse: bisection did not converge", 0.5 * (lo + hi), hi - lo);
}

std::pair<double, double> LevyExponent::psi_derivatives(double lambda) const {
    const double a = std::abs(lambda);
    if (a == 0.0) {
        if (index_at_zero() < 2.0) throw DomainError("psi_derivatives: derivatives are singular at 0 for beta < 2");
        double d2 = 0.0;
        for (const auto& c : terms_) d2 += 2.0 * c.weight;
        return {0.0, d2};
    }
    double d1 = 0.0;
    double d2 = 0.0;
    for (const auto& c : terms_) {
        d1 += c.weight * c.beta * std::pow(a, c.beta - 1.0);
        d2 += c.weight * c.beta * (c.beta - 1.0) * std::pow(a, c.beta - 2.0);
    }
    // ψ is even, so ψ' is odd and ψ'' even.
    return {lambda < 0.0 ? -d1 : d1, d2};
}

std::string LevyExponent::name() const {
    std::ostringstream out;
    out.precision(17);
    switch (family_) {
    case Family::BrownianHalf:
        return "brownian";
    case Family::Stable:
        out << "stable(beta=" << terms_.front().beta << ", scale=" << scale_ << ")";
        return out.str();
    case Family::StableMixture:
        out << "mixture(";
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (i) out << ", ";
            out << terms_[i].weight << "|p|^" << terms_[i].beta;
        }
        out << ")";
        return out.str();
    }
    return "unknown";
}

namespace {

// ∫_lo^{lambda_max} f plus a Richardson-type remainder estimate from the
// increments over the last two doublings of the upper limit.
double truncated_with_tail(const Integrand& f, double lo, double lambda_max, const QuadratureConfig& cfg,
                           const char* label) {
    std::vector<double> pts{lo};
    for (double b = std::max(2.0 * lo, 2.0); b < lambda_max; b *= 4.0) pts.push_back(b);
    pts.push_back(lambda_max);
    const double full = integrate_adaptive(f, pts, cfg.abs_tol, 1e-10, cfg.max_subdivisions, label).value;
    const double d1 = integrate_adaptive(f, lambda_max / 2, lambda_max, cfg.abs_tol, 1e-10, 200, label).value;
    const double d2 = integrate_adaptive(f, lambda_max / 4, lambda_max / 2, cfg.abs_tol, 1e-10, 200, label).value;
    if (d1 > 0.0 && d2 > 0.0 && d1 < d2) {
        const double ratio = d1 / d2;
        return full + d1 * ratio / (1.0 - ratio);
    }
    return full;
}

}  // namespace

ConditionReport verify_conditions(const LevyExponent& exponent, const QuadratureConfig& cfg,
                                  const ConditionCaps& caps) {
    ConditionReport report;
    const auto& e = exponent;

    if (e.index_at_zero() <= 1.0 + caps.beta_guard) {
        std::ostringstream msg;
        msg << "index " << e.index_at_zero() << " is within beta_guard=" << caps.beta_guard
            << " of 1; constants and psi^{-1}(1/t) are ill-conditioned";
        report.reasons.push_back(msg.str());
    }

    // Condition 2: ∫_R dλ/(1+ψ) = 2∫_0^∞.
    const auto integrand2 = [&](double l) { return 1.0 / (1.0 + e.psi(l)); };
    report.integrability_value =
        2.0 * (integrate_adaptive(integrand2, 0.0, 1.0, cfg.abs_tol, 1e-10, cfg.max_subdivisions, "integrability").value +
               truncated_with_tail(integrand2, 1.0, caps.lambda_max, cfg, "integrability"));

    // Condition 3, ratio bounds on a log grid of (0, 1].
    for (int i = 0; i < caps.ratio_grid_points; ++i) {
        const double l = std::pow(10.0, -12.0 + 12.0 * i / (caps.ratio_grid_points - 1));
        const auto [d1, d2] = e.psi_derivatives(l);
        const double p = e.psi(l);
        report.ratio_d1_sup = std::max(report.ratio_d1_sup, l * std::abs(d1) / p);
        report.ratio_d2_sup = std::max(report.ratio_d2_sup, l * l * std::abs(d2) / p);
    }
    report.derivative_ratio_sup = std::max(report.ratio_d1_sup, report.ratio_d2_sup);

    // Condition 3, tail integrals over [1, ∞).
    const Integrand tails[3] = {
        [&](double l) { return std::abs(e.psi_derivatives(l).first) / std::pow(e.psi(l), 2); },
        [&](double l) { return std::pow(e.psi_derivatives(l).first / e.psi(l), 2); },
        [&](double l) { return std::abs(e.psi_derivatives(l).second) / e.psi(l); },
    };
    const char* labels[3] = {"|psi'|/psi^2", "|psi'|^2/psi^2", "|psi''|/psi"};
    for (int i = 0; i < 3; ++i) {
        report.tail_integrals[i] = truncated_with_tail(tails[i], 1.0, caps.lambda_max, cfg, labels[i]);
    }

    auto check = [&](double v, double cap, const std::string& what) {
        if (!std::isfinite(v) || v > cap) {
            std::ostringstream msg;
            msg << what << " = " << v << " exceeds cap " << cap;
            report.reasons.push_back(msg.str());
        }
    };
    check(report.integrability_value, caps.integral_cap, "integral of 1/(1+psi)");
    check(report.ratio_d1_sup, caps.ratio_cap, "sup lambda|psi'|/psi");
    check(report.ratio_d2_sup, caps.ratio_cap, "sup lambda^2|psi''|/psi");
    for (int i = 0; i < 3; ++i) check(report.tail_integrals[i], caps.integral_cap, std::string("tail integral ") + labels[i]);

    report.passed = report.reasons.empty();
    return report;
}

}  // namespace levylt
