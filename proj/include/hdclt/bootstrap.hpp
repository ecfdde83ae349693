#pragma once

#include "hdclt/series.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hdclt {

/**
 * Lower Cholesky factor of Θ = (𝒦_QS((i−j)/b_n)).
 *
 * If the plain factorization fails, 1e−10·I is added once and the
 * factorization retried; a second failure throws NumericalError carrying the
 * smallest eigenvalue.
 */
struct ThetaFactor {
    std::size_t n = 0;
    double bandwidth = 0.0;
    bool jittered = false;
    Matrix lower;
};

[[nodiscard]] ThetaFactor factor_theta(std::size_t n, double bandwidth);

/// Cached factor_theta; one factorization per (n, b_n) per process.
[[nodiscard]] std::shared_ptr<const ThetaFactor> cached_theta_factor(std::size_t n, double bandwidth);

struct BootstrapDraws {
    Matrix draws;  ///< B×p, row b is Ĝ_bᵀ
    std::string series_fingerprint;
    double bandwidth = 0.0;
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t count() const noexcept { return static_cast<std::size_t>(draws.rows()); }
};

/**
 * Parametric bootstrap: Ĝ_b = n^{−1/2} Σ_t Z_t (X_t − X̄) with Z ∼ N(0, Θ).
 *
 * Conditionally on the data, Cov(Ĝ) equals the untruncated QS estimator
 * Ξ̂_n of the centered series. Draw b uses stream derive(seed, b) only, so the
 * output does not depend on the thread count.
 */
[[nodiscard]] BootstrapDraws sample_ghat(const SeriesMatrix& series, double bandwidth, std::size_t B,
                                         std::uint64_t seed);

struct QuantileEstimate {
    double delta = 0.0;
    double value = 0.0;
    std::size_t B = 0;
    /// B < ⌈1/δ⌉, so the order statistic sits at the sample maximum.
    bool degenerate = false;
};

/// Upper δ-quantile: the ⌈(1−δ)B⌉-th smallest value.
[[nodiscard]] QuantileEstimate quantile(std::span<const double> values, double delta);

/// (1 + #{draws ≥ observed}) / (B + 1).
[[nodiscard]] double bootstrap_p_value(std::span<const double> sample, double observed);

using Reduction = std::function<double(std::span<const double>)>;

struct Calibration {
    std::vector<QuantileEstimate> quantiles;
    std::vector<double> sample;  ///< statistic per draw, in draw order
    double bandwidth = 0.0;
};

[[nodiscard]] Calibration calibrate(const BootstrapDraws& draws, const Reduction& statistic,
                                    std::span<const double> deltas);
[[nodiscard]] Calibration calibrate(const SeriesMatrix& series, double bandwidth, std::size_t B,
                                    std::uint64_t seed, const Reduction& statistic,
                                    std::span<const double> deltas);

/// B rows, p columns, plus a JSON sidecar `<path>.json` with the provenance.
void export_draws(const BootstrapDraws& draws, const std::filesystem::path& csv_path);

}  // namespace hdclt
