#pragma once

#include "hdclt/series.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hdclt {

/// Quadratic spectral kernel 25/(12π²x²)·{sin(6πx/5)/(6πx/5) − cos(6πx/5)}.
/// Near zero it is evaluated from its Taylor series.
[[nodiscard]] double qs_kernel(double x) noexcept;

/**
 * Symmetric kernel with bandwidth b_n.
 *
 * Custom kernels are checked on construction: 𝒦(0) = 1, evenness and
 * |𝒦| ≤ 1 at 64 sample points.
 */
class KernelSpec {
public:
    enum class Kind { quadratic_spectral, custom };

    static KernelSpec quadratic_spectral(double bandwidth);
    static KernelSpec custom(std::function<double(double)> kernel, double bandwidth,
                             std::string name = "custom");

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] double bandwidth() const noexcept { return bandwidth_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

    /// 𝒦(x), without bandwidth scaling.
    [[nodiscard]] double operator()(double x) const;
    /// 𝒦(lag / b_n).
    [[nodiscard]] double weight(double lag) const { return (*this)(lag / bandwidth_); }

private:
    KernelSpec(Kind kind, std::function<double(double)> kernel, double bandwidth, std::string name);

    Kind kind_;
    std::function<double(double)> kernel_;
    double bandwidth_;
    std::string name_;
};

struct LrcMatrix {
    enum class Provenance { analytic, estimated };

    Matrix values;
    Provenance provenance = Provenance::estimated;
    std::string kernel;     ///< empty for analytic
    double bandwidth = 0.0;
    std::size_t n = 0;
};

/// Ĥ_j for |j| ≤ n−1; Ĥ_{−j} = Ĥ_jᵀ.
[[nodiscard]] Matrix autocov_hat(const SeriesMatrix& series, long j);

struct Ar1Fit {
    double rho;
    double sigma2;
};

inline constexpr double kRhoClip = 0.97;
inline constexpr double kAndrewsConstant = 1.3221;
inline constexpr double kMinBandwidth = kAndrewsConstant;

/**
 * No-intercept least squares AR(1) on the centered column. ρ̂ is clipped to
 * [−0.97, 0.97]; σ̂² is the residual mean square over n−1 terms.
 * Throws DegenerateError on a zero-variance column.
 */
[[nodiscard]] Ar1Fit fit_ar1(std::span<const double> column);

/// Andrews AR(1) plug-in: b_n = max(1.3221·(â n)^{1/5}, 1.3221).
[[nodiscard]] double andrews_bandwidth(std::span<const Ar1Fit> fits, std::size_t n);
[[nodiscard]] double andrews_bandwidth(const SeriesMatrix& series);

enum class LagTruncation {
    negligible,  ///< skip lags with |𝒦(j/b_n)| < 1e−12
    none,
};

/// Ξ̂_n = Σ_{|j|<n} 𝒦(j/b_n) Ĥ_j, symmetrized.
[[nodiscard]] LrcMatrix lrcov_estimate(const SeriesMatrix& series, const KernelSpec& kernel,
                                       LagTruncation truncation = LagTruncation::negligible);

/// Diagonal of the untruncated Ξ̂_n, O(n²p).
[[nodiscard]] Vector lrcov_diagonal(const SeriesMatrix& series, const KernelSpec& kernel);

/// Θ with θ_{ij} = 𝒦_QS((i−j)/b_n).
[[nodiscard]] Matrix theta_matrix(std::size_t n, double bandwidth);

/// Smallest eigenvalue of a symmetric matrix.
[[nodiscard]] double min_eigenvalue(const Matrix& symmetric);

}  // namespace hdclt
