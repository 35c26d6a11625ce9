#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "levylt/exponent.hpp"
#include "levylt/quadrature.hpp"
#include "levylt/rng.hpp"
#include "levylt/simulate.hpp"

namespace levylt {

/// t·√(ψ⁻¹(1/t)).
double normalization_scale(const LevyExponent& exp, double t);

/// (I − exact_mean(t)) / (t·√(ψ⁻¹(1/t))).
double normalized_statistic(double increment, const LevyExponent& exp, double t, const QuadratureConfig& cfg = {});

/// Same with the centering supplied by the caller.
double normalized_statistic(double increment, double mean, const LevyExponent& exp, double t);

/// Discretization of the time-1 path behind one limit-law draw.
struct LimitLawParams {
    double dt = 1e-4;
    double bin_width = 0.01;
    double tau = 0.01;  ///< near-lag window for α
};

/// Draws √(8·c1·α_{β,1})·η, with α_{β,1} = ∫(L^x_1)²dx for the stable
/// process with ψ(p) = |p|^β and η standard normal independent of it.
/// For β = 2 the path is standard Brownian motion and α is rescaled by
/// 2^{-1/2}, the local-time scaling between ψ = p²/2 and ψ = p².
class LimitLawSampler {
public:
    LimitLawSampler(double beta, double c1, LimitLawParams params = {}, const QuadratureConfig& cfg = {});

    /// α_{β,1} from one simulated path.
    double alpha(Philox& path_rng) const;
    double sample(Philox& path_rng, Philox& normal_rng) const;

    double beta() const noexcept { return beta_; }
    double c1() const noexcept { return c1_; }

private:
    double beta_;
    double c1_;
    LimitLawParams params_;
    LevyExponent path_exp_;
    double alpha_factor_;
    NearLagCorrection near_;
};

/// One draw with a fresh sampler; path and η both come from `rng`.
double limit_law_sample(double beta, double c1, Philox& rng, const LimitLawParams& params = {});

/// Draws 0..count−1 from streams (seed, LimitPath, i) and (seed, LimitNormal, i).
std::vector<double> limit_law_samples(const LimitLawSampler& sampler, std::int64_t count, std::uint64_t seed,
                                      unsigned threads);

/// (ℓ_n¹ − ℓ_n⁰)/n^{1/4}.
double dobrushin_statistic(const LatticePath& walk);

/// ℓ_n¹ − ℓ_n⁰ of random_walk(n, seed, index), generated without storing the walk.
std::int64_t dobrushin_numerator(std::int64_t n, std::uint64_t seed, std::uint64_t index);

std::vector<double> dobrushin_samples(std::int64_t n, std::int64_t count, std::uint64_t seed, unsigned threads);

/// E[Π_i L_t^{x_i}] for the process started at 0, m = xs.size() ∈ {1, 2}:
/// a sum over orderings of time integrals of transition densities, computed
/// in the time domain (no frequency-side time integration).
double kac_moment(const LevyExponent& exp, std::span<const double> xs, double t, const QuadratureConfig& cfg);

struct MomentEstimate {
    double value;
    double standard_error;  ///< jackknife
};

/// Raw moment mean(x^k) with its jackknife standard error.
MomentEstimate raw_moment(std::span<const double> xs, int k);

/// Two-sample Kolmogorov–Smirnov statistic sup|F₁ − F₂|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Kolmogorov survival function Q(λ) = 2Σ_{j≥1}(−1)^{j−1}e^{−2j²λ²}.
double kolmogorov_survival(double lambda);

/// Asymptotic p-value with the effective-size correction
/// λ = (√n_e + 0.12 + 0.11/√n_e)·D, n_e = n₁n₂/(n₁+n₂).
double ks_p_value(double d, std::size_t n1, std::size_t n2);

struct CltSampleSet {
    LevyExponent exp = LevyExponent::brownian_half();
    double t = 0.0;
    std::vector<double> samples;
    std::vector<double> limit_samples;
    std::int64_t paths = 0;
    double dt = 0.0;
    double bin_width = 0.0;
    std::uint64_t seed = 0;
};

struct ComparisonReport {
    std::array<double, 4> moments_empirical{};
    std::array<double, 4> moments_limit{};
    std::array<double, 4> se_empirical{};
    std::array<double, 4> se_limit{};
    std::array<double, 4> moment_z_scores{};
    double ks_statistic = 0.0;
    double ks_p_value = 0.0;
    bool pass = false;
};

inline constexpr std::size_t kMinComparisonSamples = 200;

/// Moments 1–4 with jackknife z-scores and the two-sample KS test. Passes
/// when every |z| ≤ 3 and p ≥ 0.01. Throws ConfigError below 200 samples
/// per side and DomainError on zero-variance input.
ComparisonReport compare_distributions(const CltSampleSet& set);

struct CltConfig {
    EnsembleConfig ensemble;
    std::int64_t limit_paths = 0;  ///< 0 means the same as ensemble.paths
    LimitLawParams limit;
};

/// Normalized statistics of ensemble.paths simulated paths and limit-law
/// draws for the index at zero of the exponent and c_{ψ,1} of the exponent.
CltSampleSet run_clt(const CltConfig& cfg, const QuadratureConfig& qcfg);

}  // namespace levylt
