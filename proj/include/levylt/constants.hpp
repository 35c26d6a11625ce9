#pragma once

#include <utility>
#include <vector>

#include "levylt/exponent.hpp"
#include "levylt/quadrature.hpp"

namespace levylt {

/// c_{ψ,0} = (2/π)∫_0^∞ sin²(p/2)/ψ(p) dp, the slope of the mean of
/// ∫(L^{x+1}_t − L^x_t)² dx.
QuadResult c_psi0(const LevyExponent& exp, const QuadratureConfig& cfg);

/// c_{ψ,1} = (16/π)∫_0^∞ sin⁴(p/2)/ψ²(p) dp, the variance scale of the limit.
QuadResult c_psi1(const LevyExponent& exp, const QuadratureConfig& cfg);

struct IdentityResult {
    double value;     ///< ∫_0^∞ Δ¹p_s(0) ds
    double residual;  ///< |value + c_{ψ,0}|
};

/// ∫_0^∞ Δ¹p_s(0) ds = −c_{ψ,0}. The left side is evaluated after an
/// integration by parts in p, (1/π)∫_0^∞ (sin p − p) ψ'(p)/ψ²(p) dp, so it
/// shares no integrand with c_psi0.
IdentityResult identity_213(const LevyExponent& exp, const QuadratureConfig& cfg);

struct ParsevalPair {
    double lhs;            ///< ∫ Δ²p_r(x) Δ²p_{r'}(x) dx by the trapezoid rule in x
    double rhs;            ///< (16/π)∫_0^∞ sin⁴(p/2) e^{-(r+r')ψ} dp
    double lhs_error;      ///< step-halving plus truncated-tail estimate
    double x_max;          ///< spatial truncation actually used
};

/// Both sides of the Parseval identity for the symmetric second difference
/// Δ²p = 2p(x) − p(x+1) − p(x−1). Throws NumericalError if the spatial
/// truncation or step cannot reach `spatial_tol`.
ParsevalPair parseval_pair(const LevyExponent& exp, double r, double r_prime, const QuadratureConfig& cfg,
                           double spatial_tol = 1e-7);

/// c_{ψ,1} − ∫(∫_0^t Δ²p_s(x) ds)² dx
///   = (16/π)∫_0^∞ sin⁴(p/2) e^{-tψ}(2 − e^{-tψ})/ψ² dp ≥ 0,
/// evaluated in this cancellation-free form.
QuadResult h32_residual(const LevyExponent& exp, double t, const QuadratureConfig& cfg);

/// E∫(L^{x+1}_t − L^x_t)² dx = 4∫_0^t (t−r)(p_r(0) − p_r(1)) dr
///   = (8/π)∫_0^∞ sin²(p/2) φ(tψ)/ψ² dp,  φ(y) = y − 1 + e^{-y}.
QuadResult exact_mean(const LevyExponent& exp, double t, const QuadratureConfig& cfg);

/// 4c_{ψ,0}t − exact_mean(t) = (8/π)∫_0^∞ sin²(p/2)(1 − e^{-tψ})/ψ² dp.
QuadResult mean_gap(const LevyExponent& exp, double t, const QuadratureConfig& cfg);

/// E α_t = E∫(L^x_t)² dx = 2∫_0^t (t−r) p_r(0) dr.
QuadResult exact_alpha_mean(const LevyExponent& exp, double t, const QuadratureConfig& cfg);

/// Contribution of time lags below τ to the mean of the increment functional,
/// 4∫_0^τ (t−r)(p_r(0) − p_r(1)) dr, for 0 < τ ≤ t.
QuadResult near_lag_mean_increment(const LevyExponent& exp, double t, double tau, const QuadratureConfig& cfg);

/// Contribution of time lags below τ to E α_t, 2∫_0^τ (t−r) p_r(0) dr.
QuadResult near_lag_mean_alpha(const LevyExponent& exp, double t, double tau, const QuadratureConfig& cfg);

struct ConstantsReport {
    double c_psi_0 = 0.0;
    double c_psi_1 = 0.0;
    double identity_213_value = 0.0;
    double identity_213_residual = 0.0;
    std::vector<double> parseval_residuals;            ///< (r, r') over {0.5,1,2}², row-major
    std::vector<std::pair<double, double>> h32_residuals;  ///< (t, residual)
    std::vector<std::pair<double, double>> exact_means;    ///< (t, exact_mean)
    /// Slope of exact_mean between the two largest t; tends to 4c_{ψ,0}.
    double mean_slope = 0.0;
};

ConstantsReport constants_report(const LevyExponent& exp, const std::vector<double>& t_list,
                                 const QuadratureConfig& cfg);

}  // namespace levylt
