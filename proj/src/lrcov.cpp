#include "hdclt/lrcov.hpp"

#include "hdclt/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hdclt {

double qs_kernel(double x) noexcept {
    const double z = 6.0 * std::numbers::pi * std::abs(x) / 5.0;
    if (z < 1.0) {
        // 3/z²·(sin z/z − cos z) = Σ_{k≥1} (−1)^{k+1} 6k z^{2k−2}/(2k+1)!
        const double z2 = z * z;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 1; k < 20; ++k) {
            term *= -z2 / (2.0 * k * (2.0 * k + 3.0));
            sum += term;
            if (std::abs(term) < 1e-18) break;
        }
        return sum;
    }
    return 3.0 / (z * z) * (std::sin(z) / z - std::cos(z));
}

KernelSpec::KernelSpec(Kind kind, std::function<double(double)> kernel, double bandwidth, std::string name)
    : kind_(kind), kernel_(std::move(kernel)), bandwidth_(bandwidth), name_(std::move(name)) {
    if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_))
        throw std::invalid_argument("kernel: bandwidth must be positive and finite");
}

KernelSpec KernelSpec::quadratic_spectral(double bandwidth) {
    return KernelSpec(Kind::quadratic_spectral, qs_kernel, bandwidth, "quadratic_spectral");
}

KernelSpec KernelSpec::custom(std::function<double(double)> kernel, double bandwidth, std::string name) {
    if (!kernel) throw std::invalid_argument("kernel: empty evaluation rule");
    if (kernel(0.0) != 1.0) throw std::invalid_argument("kernel: K(0) must equal 1");
    for (int i = 1; i <= 64; ++i) {
        const double x = 0.173 * i;  // spans (0, 11]
        const double left = kernel(-x);
        const double right = kernel(x);
        if (std::abs(left - right) > 1e-12) throw std::invalid_argument("kernel: K must be even");
        if (!(std::abs(right) <= 1.0)) throw std::invalid_argument("kernel: |K| must not exceed 1");
    }
    return KernelSpec(Kind::custom, std::move(kernel), bandwidth, std::move(name));
}

double KernelSpec::operator()(double x) const { return kernel_(x); }

Matrix autocov_hat(const SeriesMatrix& series, long j) {
    const auto n = static_cast<long>(series.n());
    if (j <= -n || j >= n) throw std::out_of_range("autocov_hat: |j| must be below n");
    const SeriesMatrix centered = center(series);
    const Matrix& x = centered.values();
    const long lag = std::abs(j);
    Matrix h = x.bottomRows(n - lag).transpose() * x.topRows(n - lag) / static_cast<double>(n);
    if (j < 0) return h.transpose();
    return h;
}

Ar1Fit fit_ar1(std::span<const double> column) {
    const std::size_t n = column.size();
    if (n < 3) throw InsufficientDataError("fit_ar1: need at least 3 observations");
    double mean = 0.0;
    double scale = 0.0;
    for (double v : column) {
        mean += v;
        scale = std::max(scale, std::abs(v));
    }
    mean /= static_cast<double>(n);

    std::vector<double> x(n);
    double ss = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = column[t] - mean;
        ss += x[t] * x[t];
    }
    const double floor = 1e-12 * scale;
    if (ss <= floor * floor * static_cast<double>(n)) throw DegenerateError("fit_ar1: zero-variance column");

    double cross = 0.0;
    double lagged = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        cross += x[t] * x[t - 1];
        lagged += x[t - 1] * x[t - 1];
    }
    if (lagged <= 0.0) throw DegenerateError("fit_ar1: zero lagged variance");
    const double rho = std::clamp(cross / lagged, -kRhoClip, kRhoClip);

    double rss = 0.0;
    for (std::size_t t = 1; t < n; ++t) {
        const double r = x[t] - rho * x[t - 1];
        rss += r * r;
    }
    return Ar1Fit{rho, rss / static_cast<double>(n - 1)};
}

double andrews_bandwidth(std::span<const Ar1Fit> fits, std::size_t n) {
    if (fits.empty()) throw std::invalid_argument("andrews_bandwidth: no coordinates");
    double numerator = 0.0;
    double denominator = 0.0;
    for (const auto& f : fits) {
        const double s4 = f.sigma2 * f.sigma2;
        const double one_minus = 1.0 - f.rho;
        numerator += 4.0 * f.rho * f.rho * s4 / std::pow(one_minus, 8);
        denominator += s4 / std::pow(one_minus, 4);
    }
    if (!(denominator > 0.0)) throw DegenerateError("andrews_bandwidth: zero innovation variance");
    const double a = numerator / denominator;
    return std::max(kAndrewsConstant * std::pow(a * static_cast<double>(n), 0.2), kMinBandwidth);
}

double andrews_bandwidth(const SeriesMatrix& series) {
    std::vector<Ar1Fit> fits;
    fits.reserve(series.p());
    const Matrix& x = series.values();
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const Vector column = x.col(j);
        try {
            fits.push_back(fit_ar1(std::span<const double>(column.data(), static_cast<std::size_t>(column.size()))));
        } catch (const DegenerateError& e) {
            throw DegenerateError(std::string(e.what()) + " (column " + std::to_string(j + 1) + ")");
        }
    }
    return andrews_bandwidth(fits, series.n());
}

namespace {

/// Row t of the result is Σ_s 𝒦((t−s)/b_n) x_s, so that Xᵀ·result / n = Ξ̂_n.
Matrix kernel_smoothed(const Matrix& x, const KernelSpec& kernel, LagTruncation truncation) {
    const Eigen::Index n = x.rows();
    Matrix y = kernel(0.0) * x;
    for (Eigen::Index j = 1; j < n; ++j) {
        const double w = kernel.weight(static_cast<double>(j));
        if (w == 0.0) continue;
        if (truncation == LagTruncation::negligible && std::abs(w) < 1e-12) continue;
        y.bottomRows(n - j).noalias() += w * x.topRows(n - j);
        y.topRows(n - j).noalias() += w * x.bottomRows(n - j);
    }
    return y;
}

}  // namespace

LrcMatrix lrcov_estimate(const SeriesMatrix& series, const KernelSpec& kernel, LagTruncation truncation) {
    const SeriesMatrix centered = center(series);
    const Matrix& x = centered.values();
    const Matrix y = kernel_smoothed(x, kernel, truncation);
    Matrix xi = x.transpose() * y / static_cast<double>(series.n());
    LrcMatrix out;
    out.values = 0.5 * (xi + xi.transpose());
    out.provenance = LrcMatrix::Provenance::estimated;
    out.kernel = kernel.name();
    out.bandwidth = kernel.bandwidth();
    out.n = series.n();
    return out;
}

Vector lrcov_diagonal(const SeriesMatrix& series, const KernelSpec& kernel) {
    const SeriesMatrix centered = center(series);
    const Matrix& x = centered.values();
    const Matrix y = kernel_smoothed(x, kernel, LagTruncation::none);
    return x.cwiseProduct(y).colwise().sum().transpose() / static_cast<double>(series.n());
}

Matrix theta_matrix(std::size_t n, double bandwidth) {
    if (n < 2) throw std::invalid_argument("theta_matrix: n must be at least 2");
    if (!(bandwidth > 0.0)) throw std::invalid_argument("theta_matrix: bandwidth must be positive");
    std::vector<double> by_lag(n);
    for (std::size_t k = 0; k < n; ++k) by_lag[k] = qs_kernel(static_cast<double>(k) / bandwidth);
    const auto size = static_cast<Eigen::Index>(n);
    Matrix theta(size, size);
    for (Eigen::Index i = 0; i < size; ++i)
        for (Eigen::Index j = 0; j < size; ++j) theta(i, j) = by_lag[static_cast<std::size_t>(std::abs(i - j))];
    return theta;
}

double min_eigenvalue(const Matrix& symmetric) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("eigen solver failed");
    return solver.eigenvalues().minCoeff();
}

}  // namespace hdclt
