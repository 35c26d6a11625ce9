#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <utility>

namespace levylt {

/// Tolerances and budgets shared by every one-dimensional frequency or
/// time integral in the library.
struct QuadratureConfig {
    double abs_tol = 1e-13;
    double rel_tol = 1e-11;
    int max_subdivisions = 4000;
    /// Upper frequency limit for densities. 0 selects ψ⁻¹(log(1/abs_tol)/s)
    /// per call, i.e. the point where exp(-sψ) drops below abs_tol.
    double p_truncation = 0.0;
    /// Nodes of the geometric time grid used by v and w.
    int time_nodes = 512;
    int max_tail_panels = 20000;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    long evaluations = 0;
};

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss–Kronrod (10/21 point) integration on [a, b].
QuadResult integrate_adaptive(const Integrand& f, double a, double b, double abs_tol,
                              double rel_tol, int max_subdivisions,
                              std::string_view label = "integral");

/// Same, starting from the given sorted breakpoints (first and last are the
/// integration limits).
QuadResult integrate_adaptive(const Integrand& f, std::span<const double> breakpoints,
                              double abs_tol, double rel_tol, int max_subdivisions,
                              std::string_view label = "integral");

/// ∫_a^∞ f for a > 0 and f non-oscillating with algebraic or faster decay.
/// Uses p = a·e^u, which turns algebraic decay into exponential decay.
QuadResult integrate_decaying_tail(const Integrand& f, double a, const QuadratureConfig& cfg,
                                   std::string_view label = "tail");

/// A component amplitude(p)·cos(omega·p − phase) of a half-line integrand.
struct OscillatoryTerm {
    Integrand amplitude;
    double omega = 0.0;
    double phase = 0.0;
};

/// ∫_0^∞ Σ_j amplitude_j(p) cos(omega_j p − phase_j) dp.
///
/// On [0, head_end] the caller-supplied `head` (the same integrand in a
/// cancellation-free form) is integrated adaptively, pre-split at the half
/// periods of the fastest term. Beyond head_end each term is integrated on
/// its own: non-oscillating terms through integrate_decaying_tail,
/// oscillating ones by half-period panels whose partial sums are
/// accelerated with Wynn's epsilon algorithm.
QuadResult half_line_integral(const Integrand& head, std::span<const OscillatoryTerm> terms,
                              double head_end, const QuadratureConfig& cfg,
                              std::string_view label = "fourier integral");

/// Limit estimate of a sequence of partial sums by Wynn's epsilon algorithm.
/// Returns {estimate, error estimate}.
std::pair<double, double> wynn_epsilon(std::span<const double> partial_sums);

}  // namespace levylt
