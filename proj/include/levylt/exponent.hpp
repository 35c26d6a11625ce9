#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace levylt {

/// One term w·|λ|^β of a Lévy exponent.
struct StableComponent {
    double weight;
    double beta;
};

enum class Family { Stable, BrownianHalf, StableMixture };

/// Symmetric Lévy exponent ψ with E[exp(iλX_t)] = exp(-ψ(λ)t).
///
/// Every supported family is a finite positive combination of stable
/// terms, ψ(λ) = Σ c_i |λ|^{β_i} with 1 < β_i ≤ 2, so ψ, ψ', ψ'' and ψ⁻¹
/// are available in closed form (bisection for ψ⁻¹ of a mixture).
class LevyExponent {
public:
    static LevyExponent stable(double beta, double scale = 1.0);
    /// ψ(λ) = λ²/2, standard Brownian motion.
    static LevyExponent brownian_half();
    static LevyExponent mixture(std::vector<StableComponent> components, double scale = 1.0);

    Family family() const noexcept { return family_; }
    double scale() const noexcept { return scale_; }

    /// Effective terms c_i|λ|^{β_i} with the scale already folded in.
    std::span<const StableComponent> terms() const noexcept { return terms_; }

    /// Smallest index. It governs the behaviour of ψ at 0 and therefore the
    /// large-time behaviour of the process.
    double index_at_zero() const noexcept;
    /// Largest index; governs ψ at infinity.
    double index_at_infinity() const noexcept;

    double psi(double lambda) const noexcept;
    double psi_inverse(double y) const;
    /// (ψ'(λ), ψ''(λ)). Throws DomainError at λ = 0 unless every index is 2.
    std::pair<double, double> psi_derivatives(double lambda) const;

    std::string name() const;

    friend bool operator==(const LevyExponent&, const LevyExponent&) = default;

private:
    LevyExponent(Family family, double scale, std::vector<StableComponent> terms);

    Family family_;
    double scale_;
    std::vector<StableComponent> terms_;
};

inline double psi(const LevyExponent& e, double lambda) { return e.psi(lambda); }
inline double psi_inverse(const LevyExponent& e, double y) { return e.psi_inverse(y); }
inline std::pair<double, double> psi_derivatives(const LevyExponent& e, double lambda) {
    return e.psi_derivatives(lambda);
}

struct QuadratureConfig;

/// Caps applied by verify_conditions. The audit is numerical evidence for
/// the standing hypotheses on ψ, not a proof.
struct ConditionCaps {
    double lambda_max = 1e6;
    double integral_cap = 1e6;
    double ratio_cap = 1e3;
    double beta_guard = 1e-3;  ///< require every index > 1 + beta_guard
    int ratio_grid_points = 241;
};

struct ConditionReport {
    double integrability_value = 0.0;  ///< ∫_R dλ/(1+ψ(λ))
    double derivative_ratio_sup = 0.0; ///< max of the two sups below
    double ratio_d1_sup = 0.0;         ///< sup_{λ≤1} λ|ψ'|/ψ
    double ratio_d2_sup = 0.0;         ///< sup_{λ≤1} λ²|ψ''|/ψ
    double tail_integrals[3] = {0.0, 0.0, 0.0};
    bool passed = false;
    std::vector<std::string> reasons;  ///< empty when passed
};

ConditionReport verify_conditions(const LevyExponent& exponent, const QuadratureConfig& cfg,
                                  const ConditionCaps& caps = {});

}  // namespace levylt
