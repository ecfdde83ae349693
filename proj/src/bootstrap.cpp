#include "hdclt/bootstrap.hpp"

#include "hdclt/error.hpp"
#include "hdclt/lrcov.hpp"
#include "hdclt/parallel.hpp"
#include "hdclt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hdclt {

namespace {

constexpr double kJitter = 1e-10;
constexpr std::size_t kDrawChunk = 64;
constexpr std::size_t kCacheLimit = 32;

}  // namespace

ThetaFactor factor_theta(std::size_t n, double bandwidth) {
    Matrix theta = theta_matrix(n, bandwidth);
    ThetaFactor out;
    out.n = n;
    out.bandwidth = bandwidth;

    Eigen::LLT<Matrix> llt(theta);
    if (llt.info() != Eigen::Success) {
        theta.diagonal().array() += kJitter;
        llt.compute(theta);
        out.jittered = true;
        if (llt.info() != Eigen::Success) {
            std::ostringstream msg;
            msg << "Cholesky of Theta failed after jitter (n=" << n << ", b_n=" << bandwidth
                << ", min eigenvalue=" << min_eigenvalue(theta_matrix(n, bandwidth)) << ")";
            throw NumericalError(msg.str());
        }
    }
    out.lower = llt.matrixL();
    return out;
}

std::shared_ptr<const ThetaFactor> cached_theta_factor(std::size_t n, double bandwidth) {
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, double>, std::shared_ptr<const ThetaFactor>> cache;
    const auto key = std::make_pair(n, bandwidth);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto factor = std::make_shared<const ThetaFactor>(factor_theta(n, bandwidth));
    std::lock_guard lock(mutex);
    if (cache.size() >= kCacheLimit) cache.clear();
    cache.emplace(key, factor);
    return factor;
}

BootstrapDraws sample_ghat(const SeriesMatrix& series, double bandwidth, std::size_t B, std::uint64_t seed) {
    if (B < 1) throw std::invalid_argument("sample_ghat: B must be at least 1");
    const SeriesMatrix centered = center(series);
    const Matrix& x = centered.values();
    const auto factor = cached_theta_factor(series.n(), bandwidth);
    const auto n = static_cast<Eigen::Index>(series.n());
    const double scale = 1.0 / std::sqrt(static_cast<double>(series.n()));

    BootstrapDraws out;
    out.draws.resize(static_cast<Eigen::Index>(B), x.cols());
    out.series_fingerprint = series.fingerprint();
    out.bandwidth = bandwidth;
    out.seed = seed;

    const std::size_t chunks = (B + kDrawChunk - 1) / kDrawChunk;
    parallel_for(chunks, [&](std::size_t c) {
        const std::size_t first = c * kDrawChunk;
        const std::size_t count = std::min(kDrawChunk, B - first);
        Matrix normals(n, static_cast<Eigen::Index>(count));
        for (std::size_t b = 0; b < count; ++b) {
            Stream stream(derive(seed, first + b));
            std::normal_distribution<double> normal;
            for (Eigen::Index t = 0; t < n; ++t) normals(t, static_cast<Eigen::Index>(b)) = normal(stream);
        }
        const Matrix z = factor->lower.triangularView<Eigen::Lower>() * normals;
        out.draws.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count)) =
            scale * (z.transpose() * x);
    });
    return out;
}

QuantileEstimate quantile(std::span<const double> values, double delta) {
    if (values.empty()) throw std::invalid_argument("quantile: empty sample");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("quantile: delta must lie in (0,1)");
    const std::size_t B = values.size();
    const double target = (1.0 - delta) * static_cast<double>(B);
    auto k = static_cast<std::size_t>(std::ceil(target - 1e-9 * static_cast<double>(B)));
    k = std::clamp<std::size_t>(k, 1, B);

    std::vector<double> sorted(values.begin(), values.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());

    QuantileEstimate out;
    out.delta = delta;
    out.value = sorted[k - 1];
    out.B = B;
    out.degenerate = static_cast<double>(B) < std::ceil(1.0 / delta - 1e-9);
    return out;
}

double bootstrap_p_value(std::span<const double> sample, double observed) {
    const auto exceed = std::count_if(sample.begin(), sample.end(), [observed](double v) { return v >= observed; });
    return (1.0 + static_cast<double>(exceed)) / (static_cast<double>(sample.size()) + 1.0);
}

Calibration calibrate(const BootstrapDraws& draws, const Reduction& statistic, std::span<const double> deltas) {
    Calibration out;
    out.bandwidth = draws.bandwidth;
    out.sample.resize(draws.count());
    std::vector<double> row(static_cast<std::size_t>(draws.draws.cols()));
    for (std::size_t b = 0; b < draws.count(); ++b) {
        for (std::size_t j = 0; j < row.size(); ++j)
            row[j] = draws.draws(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j));
        out.sample[b] = statistic(row);
    }
    for (double delta : deltas) out.quantiles.push_back(quantile(out.sample, delta));
    return out;
}

Calibration calibrate(const SeriesMatrix& series, double bandwidth, std::size_t B, std::uint64_t seed,
                      const Reduction& statistic, std::span<const double> deltas) {
    return calibrate(sample_ghat(series, bandwidth, B, seed), statistic, deltas);
}

void export_draws(const BootstrapDraws& draws, const std::filesystem::path& csv_path) {
    write_csv(csv_path, draws.draws, default_header(static_cast<std::size_t>(draws.draws.cols()), "g"));
    nlohmann::json sidecar;
    sidecar["schema_version"] = 1;
    sidecar["B"] = draws.count();
    sidecar["p"] = draws.draws.cols();
    sidecar["series_fingerprint"] = draws.series_fingerprint;
    sidecar["bandwidth"] = draws.bandwidth;
    sidecar["seed"] = draws.seed;
    std::ofstream out(csv_path.string() + ".json");
    if (!out) throw FormatError("cannot write " + csv_path.string() + ".json");
    out << sidecar.dump(2) << '\n';
}

}  // namespace hdclt
