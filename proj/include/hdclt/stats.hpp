#pragma once

#include "hdclt/series.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hdclt {

// ---------------------------------------------------------------------------
// Sparse max-of-sums statistic
// ---------------------------------------------------------------------------

/**
 * max over j_1 < ⋯ < j_s of Σ_k a_k v_{j_k}².
 *
 * Exact dynamic program f(i,k) = max(f(i−1,k), f(i−1,k−1) + a_k v_i²), so
 * a_k binds to the k-th smallest chosen index. With equal weights this is the
 * sum of the s largest squares. Empty weights mean a_k = 1.
 */
[[nodiscard]] double tns_statistic(std::span<const double> v, std::size_t s,
                                   std::span<const double> weights = {});

// ---------------------------------------------------------------------------
// Test reports
// ---------------------------------------------------------------------------

struct TestConfig {
    std::string procedure;
    std::size_t s = 1;
    std::vector<double> weights;  ///< empty: equal weights
    double delta = 0.05;
    std::size_t B = 1000;
    std::uint64_t seed = 0;
    std::optional<double> bandwidth;  ///< override for the plug-in bandwidth
};

struct TestReport {
    double statistic = 0.0;
    double critical_value = 0.0;
    double p_value = 1.0;
    bool reject = false;
    double bandwidth = 0.0;  ///< bandwidth actually used
    std::size_t n = 0;
    std::size_t p = 0;
    TestConfig config;
};

[[nodiscard]] nlohmann::json to_json(const TestReport& report);

/**
 * One-sample test of H0: E X_t = 0 with T_n(s) on √n X̄_j / √(Ξ̂_n)_jj.
 * The bootstrap draws are studentized by the same diagonal.
 */
[[nodiscard]] TestReport mean_test(const SeriesMatrix& series, const TestConfig& config);

/// Row t = (vec(ε_{t+1}ε_tᵀ), …, vec(ε_{t+K}ε_tᵀ)), row-major vec; (n−K)×(d²K).
[[nodiscard]] SeriesMatrix whitenoise_embed(const SeriesMatrix& eps, std::size_t K);

/// H0: Σ(1) = ⋯ = Σ(K) = 0, via mean_test on the embedded sequence.
[[nodiscard]] TestReport whitenoise_test(const SeriesMatrix& eps, std::size_t K, TestConfig config);

/// W_n = 2 n^{−1/2} (n−1)^{−1} Σ_t (n − 2t + 1) X_t. Requires n ≥ 3.
[[nodiscard]] Vector cusum_vector(const SeriesMatrix& series);

/// Summands of W_n before the n^{−1/2} scaling: 2(n−1)^{−1}(n−2t+1)(X_t − X̄).
[[nodiscard]] SeriesMatrix cusum_weighted(const SeriesMatrix& series);

/// No-change test: T_n(s) on W_n with equal weights, calibrated by the
/// bootstrap on the weighted sequence.
[[nodiscard]] TestReport changepoint_test(const SeriesMatrix& series, TestConfig config);

// ---------------------------------------------------------------------------
// Node-wise lasso and precision matrix
// ---------------------------------------------------------------------------

struct NodewiseFit {
    Vector beta;  ///< β̂_j, with β̂_{j,j} = −1
    bool converged = false;
    std::size_t sweeps = 0;
};

inline constexpr double kLassoTolerance = 1e-8;
inline constexpr std::size_t kLassoMaxSweeps = 10000;

/// Objective n^{−1} Σ_t (γᵀY_t)² + 2λ Σ_{k≠j} |γ_k| with γ_j = −1.
[[nodiscard]] double nodewise_objective(const SeriesMatrix& y, std::size_t j, double lambda,
                                        const Vector& gamma);

/// Cyclic coordinate descent with soft thresholding.
[[nodiscard]] NodewiseFit lasso_nodewise(const SeriesMatrix& y, std::size_t j, double lambda);

/// λ_j = 2 √(log d / n) · sd(Y_j).
[[nodiscard]] std::vector<double> default_lambdas(const SeriesMatrix& y);

struct PrecisionEstimate {
    Matrix omega;  ///< Ω̂
    Matrix v;      ///< V̂
    Matrix beta;   ///< row j is β̂_jᵀ
    std::vector<bool> converged;
    /// Sample correlation matrix numerically singular (min eigenvalue < 1e−8).
    bool near_singular = false;
};

/// Throws DegenerateError when some v̂_jj is not positive (collinear columns).
[[nodiscard]] PrecisionEstimate precision_estimate(const SeriesMatrix& y, std::span<const double> lambdas);

// ---------------------------------------------------------------------------
// Confidence regions for entries of the instantaneous covariance
// ---------------------------------------------------------------------------

using IndexPair = std::pair<std::size_t, std::size_t>;

/// All (j, j) pairs for j < d.
[[nodiscard]] std::vector<IndexPair> diagonal_indices(std::size_t d);

/// Row t = (Y_{t,a} Y_{t,b})_{(a,b) ∈ S}.
[[nodiscard]] SeriesMatrix second_moment_sequence(const SeriesMatrix& y, std::span<const IndexPair> index_set);

/**
 * {ξ : f_s(√n (σ̂_S − ξ)) ≤ q_{S,δ}} where f_s is the weighted T_n(s) form
 * and q_{S,δ} the bootstrap upper δ-quantile of f_s(Ĝ).
 */
struct ConfRegion {
    std::vector<IndexPair> index_set;
    Vector center;   ///< σ̂_S
    double radius = 0.0;  ///< q_{S,δ}
    std::size_t s = 1;
    std::vector<double> weights;
    std::size_t n = 0;
    double delta = 0.0;
    double bandwidth = 0.0;
    std::size_t B = 0;
    std::uint64_t seed = 0;

    /// f_s(√n (center − ξ)).
    [[nodiscard]] double distance(std::span<const double> xi) const;
    [[nodiscard]] bool contains(std::span<const double> xi) const { return distance(xi) <= radius; }
};

[[nodiscard]] nlohmann::json to_json(const ConfRegion& region);

[[nodiscard]] ConfRegion cov_confidence_region(const SeriesMatrix& y, std::span<const IndexPair> index_set,
                                               const TestConfig& config);

}  // namespace hdclt
