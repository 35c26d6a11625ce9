#pragma once

#include "levylt/exponent.hpp"
#include "levylt/quadrature.hpp"

namespace levylt {

struct DensityRequest {
    LevyExponent exp;
    double s;            ///< time, > 0
    double x;            ///< space
    double gamma = 1.0;  ///< difference step
};

/// p_s(x) = (1/π)∫_0^∞ cos(px) exp(-sψ(p)) dp.
QuadResult transition_density(const DensityRequest& req, const QuadratureConfig& cfg);

/// Δ^γ p_s(x) = p_s(x+γ) − p_s(x), evaluated as one Fourier integral so the
/// cancellation happens inside the integrand.
QuadResult delta1_density(const DensityRequest& req, const QuadratureConfig& cfg);

/// Δ^γΔ^{-γ} p_s(x) = 2p_s(x) − p_s(x+γ) − p_s(x−γ)
///                 = (4/π)∫_0^∞ cos(px) sin²(pγ/2) exp(-sψ(p)) dp.
QuadResult delta2_density(const DensityRequest& req, const QuadratureConfig& cfg);

/// u(x,t) = ∫_0^t p_s(x) ds = (1/π)∫_0^∞ cos(px)(1 − e^{-tψ})/ψ dp.
QuadResult u_integral(const LevyExponent& exp, double x, double t, const QuadratureConfig& cfg);

/// v_γ(x,t) = ∫_0^t |Δ^γ p_s(x)| ds on a geometric grid in s.
QuadResult v_integral(const LevyExponent& exp, double x, double t, double gamma, const QuadratureConfig& cfg);

/// w_γ(x,t) = ∫_0^t |Δ^γΔ^{-γ} p_s(x)| ds on a geometric grid in s.
QuadResult w_integral(const LevyExponent& exp, double x, double t, double gamma, const QuadratureConfig& cfg);

/// Frequency-side time integral ∫_0^t Δ^γ p_s(x) ds without absolute value.
/// Equals ±v_γ(x,t) whenever Δ^γ p_s(x) keeps one sign, e.g. x ≥ 0.
QuadResult signed_delta1_time_integral(const LevyExponent& exp, double x, double t, double gamma,
                                       const QuadratureConfig& cfg);

/// Frequency-side ∫_0^t Δ^γΔ^{-γ} p_s(x) ds without absolute value.
QuadResult signed_delta2_time_integral(const LevyExponent& exp, double x, double t, double gamma,
                                       const QuadratureConfig& cfg);

}  // namespace levylt
