#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "levylt/exponent.hpp"
#include "levylt/quadrature.hpp"
#include "levylt/rng.hpp"

namespace levylt {

/// Default cap on t/dt for a single path.
inline constexpr std::int64_t kDefaultMaxSteps = 200'000'000;

/// Skeleton X_{k·dt}, k = 0..n_steps, of a symmetric Lévy process.
struct ContinuousPath {
    LevyExponent exp;
    double dt = 0.0;
    std::int64_t n_steps = 0;
    std::vector<double> positions;  ///< positions[0] = 0
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
};

/// Box-kernel occupation density on bins [b·h, (b+1)·h).
struct LocalTimeField {
    double bin_width = 1.0;
    std::int64_t first_bin = 0;  ///< counts[i] belongs to bin first_bin + i
    std::vector<double> counts;  ///< occupation time per bin divided by bin_width
    double t = 0.0;

    double origin() const noexcept { return static_cast<double>(first_bin) * bin_width; }
    /// Σ counts·h.
    double mass() const noexcept;
};

/// One increment of the process over time dt: Normal(0, 2·c·dt) for a c|λ|²
/// term and (c·dt)^{1/β} times a Chambers–Mallows–Stuck variate otherwise;
/// mixtures add independent component increments.
double sample_increment(const LevyExponent& exp, double dt, Philox& rng);

/// Path on [0, t] with step dt from the stream (seed, Path, path_index).
/// t/dt must be an integer (to 1e-9 relative) not above max_steps.
ContinuousPath simulate_path(const LevyExponent& exp, double t, double dt, std::uint64_t seed,
                             std::uint64_t path_index = 0, std::int64_t max_steps = kDefaultMaxSteps);

/// Path on [0, t] drawing its increments from the caller's stream.
ContinuousPath simulate_path_with(const LevyExponent& exp, double t, double dt, Philox& rng,
                                  std::int64_t max_steps = kDefaultMaxSteps);

/// Number of bins in one unit of space; throws ConfigError unless 1/h is an
/// integer and h ≤ 1.
std::int64_t bins_per_unit(double bin_width);

/// Bin index floor(x/h).
std::int64_t bin_of(double x, double bin_width) noexcept;

/// Occupation counts of X_0, …, X_{n−1}, each point carrying time dt.
LocalTimeField estimate_local_time(const ContinuousPath& path, double bin_width);

/// Same from an explicit bin list (one entry per time step of length dt).
LocalTimeField field_from_bins(const std::vector<std::int64_t>& bins, double dt, double bin_width);

/// Σ_b (counts[b + 1/h] − counts[b])²·h with zero padding.
double functional_increment_l2(const LocalTimeField& field);

/// Σ_b counts[b]²·h.
double functional_alpha(const LocalTimeField& field);

/// ∫(L^{x+1}−L^x)(L'^{x+1}−L'^x) dx for two fields on the same bin grid.
double increment_cross(const LocalTimeField& a, const LocalTimeField& b);

/// Replacement of the pair contributions with time lag below τ = m0·dt by
/// their exact expectation (trapezoid weight ½ at lag m0). The box-kernel
/// estimator overweights short lags, e.g. its diagonal alone adds 2·dt·t/h
/// to the increment functional; the exact near-lag means remove that bias.
struct NearLagCorrection {
    std::int64_t m0 = 0;  ///< 0 disables the correction
    double mean_increment = 0.0;
    double mean_alpha = 0.0;
};

/// τ = min(1, t/100) rounded to a whole number of steps (at least one).
double default_tau(double t, double dt);

NearLagCorrection make_near_lag_correction(const LevyExponent& exp, double t, double dt, double tau,
                                           const QuadratureConfig& cfg);

struct PathFunctionals {
    double increment_raw = 0.0;  ///< functional_increment_l2 of the box-kernel field
    double alpha_raw = 0.0;
    double increment = 0.0;      ///< near-lag corrected
    double alpha = 0.0;
};

PathFunctionals path_functionals(const ContinuousPath& path, double bin_width, const NearLagCorrection& near);

struct EnsembleConfig {
    LevyExponent exp = LevyExponent::brownian_half();
    double t = 1.0;
    double dt = 0.01;
    double bin_width = 0.1;
    std::int64_t paths = 1;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    /// Near-lag window; ≤ 0 selects default_tau. Ignored when !debias.
    double tau = 0.0;
    bool debias = true;
    std::int64_t max_steps = kDefaultMaxSteps;
    StreamKind stream = StreamKind::Path;
};

/// Functionals of paths 0..paths−1, one independent stream per path.
std::vector<PathFunctionals> simulate_functionals(const EnsembleConfig& cfg, const QuadratureConfig& qcfg);

struct AdditivityResult {
    /// max_b |L(b) − Σ_j L_j(b)| over the full field and the l block fields.
    double max_bin_discrepancy = 0.0;
    /// |I(full) − Σ_{j,k} I_{j,k}| with I_{j,k} the increment cross terms.
    double decomposition_residual = 0.0;
};

/// Splits [0, t] into l blocks. Block j's field is L_{t/l}∘θ_{jt/l}, the
/// local time of the shifted path over time t/l placed at its absolute
/// position, i.e. built from X_{jt/l}, …, X_{(j+1)t/l − dt}.
AdditivityResult additivity_check(const LevyExponent& exp, double t, int l, double dt, std::uint64_t seed,
                                  double bin_width = 0.1);

/// Simple random walk S_0 = 0, S_k = Σ_{j≤k} steps[j].
struct LatticePath {
    std::int64_t n = 0;
    std::vector<std::int8_t> steps;       ///< steps[j−1] is the j-th step, ±1
    std::vector<std::int64_t> positions;  ///< positions[k] = S_k, size n + 1
    std::uint64_t seed = 0;
};

LatticePath lattice_from_steps(const std::vector<std::int8_t>& steps);
LatticePath random_walk(std::int64_t n, std::uint64_t seed, std::uint64_t walk_index);

/// ℓ_n^x = #{1 ≤ j ≤ n : S_j = x}.
std::map<std::int64_t, std::int64_t> rw_local_times(const LatticePath& path);

/// 2ΣΣ1{S_i = S_j} − ΣΣ1{|S_i − S_j| = 1} over 1 ≤ i, j ≤ n.
std::int64_t rw_hamiltonian_pairs(const LatticePath& path);

/// Σ_x (ℓ^{x+1} − ℓ^x)².
std::int64_t rw_hamiltonian_increments(const LatticePath& path);

/// Both forms; throws InvariantViolation if they differ.
std::int64_t rw_hamiltonian(const LatticePath& path);

/// Unit-bin field of the walk: bin x holds ℓ_n^x (time step 1, h = 1).
LocalTimeField lattice_field(const LatticePath& path);

}  // namespace levylt
