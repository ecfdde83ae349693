#include "hdclt/stats.hpp"

#include "hdclt/bootstrap.hpp"
#include "hdclt/error.hpp"
#include "hdclt/lrcov.hpp"
#include "hdclt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hdclt {

double tns_statistic(std::span<const double> v, std::size_t s, std::span<const double> weights) {
    const std::size_t p = v.size();
    if (s < 1) throw std::invalid_argument("tns_statistic: s must be at least 1");
    if (s > p) throw std::invalid_argument("tns_statistic: s exceeds the dimension");
    if (!weights.empty() && weights.size() != s) throw std::invalid_argument("tns_statistic: need exactly s weights");
    for (double a : weights)
        if (!(a > 0.0)) throw std::invalid_argument("tns_statistic: weights must be positive");

    // best[k]: largest weighted sum over k indices chosen from the prefix seen so far.
    std::vector<double> best(s + 1, -std::numeric_limits<double>::infinity());
    best[0] = 0.0;
    for (std::size_t i = 0; i < p; ++i) {
        const double sq = v[i] * v[i];
        for (std::size_t k = std::min(i + 1, s); k >= 1; --k) {
            const double a = weights.empty() ? 1.0 : weights[k - 1];
            best[k] = std::max(best[k], best[k - 1] + a * sq);
        }
    }
    return best[s];
}

nlohmann::json to_json(const TestReport& report) {
    nlohmann::json config;
    config["s"] = report.config.s;
    config["weights"] = report.config.weights;
    config["delta"] = report.config.delta;
    config["B"] = report.config.B;
    config["seed"] = report.config.seed;
    config["bandwidth_override"] = report.config.bandwidth ? nlohmann::json(*report.config.bandwidth) : nlohmann::json();

    nlohmann::json j;
    j["schema_version"] = 1;
    j["procedure"] = report.config.procedure;
    j["statistic"] = report.statistic;
    j["critical_value"] = report.critical_value;
    j["p_value"] = report.p_value;
    j["reject"] = report.reject;
    j["bandwidth"] = report.bandwidth;
    j["n"] = report.n;
    j["p"] = report.p;
    j["config"] = config;
    return j;
}

namespace {

void check_config(const TestConfig& config, std::size_t p) {
    if (config.s < 1 || config.s > p)
        throw std::invalid_argument("s must lie in [1, p] (p=" + std::to_string(p) + ")");
    if (!config.weights.empty() && config.weights.size() != config.s)
        throw std::invalid_argument("need exactly s weights");
    if (!(config.delta > 0.0 && config.delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    if (config.B < 1) throw std::invalid_argument("B must be positive");
}

Vector studentizing_scale(const SeriesMatrix& series, double bandwidth) {
    const Vector diag = lrcov_diagonal(series, KernelSpec::quadratic_spectral(bandwidth));
    const Matrix& x = series.values();
    for (Eigen::Index j = 0; j < diag.size(); ++j) {
        const double second_moment = x.col(j).squaredNorm() / static_cast<double>(x.rows());
        if (!(second_moment > 0.0) || !(diag(j) > 1e-12 * second_moment))
            throw DegenerateError("long-run variance of column " + std::to_string(j + 1) + " is zero");
    }
    return diag.cwiseSqrt();
}

}  // namespace

TestReport mean_test(const SeriesMatrix& series, const TestConfig& config) {
    check_config(config, series.p());
    const double bandwidth = config.bandwidth.value_or(andrews_bandwidth(series));
    const Vector scale = studentizing_scale(series, bandwidth);
    const double root_n = std::sqrt(static_cast<double>(series.n()));

    const Vector observed = (root_n * series.mean()).cwiseQuotient(scale);
    TestReport report;
    report.config = config;
    if (report.config.procedure.empty()) report.config.procedure = "mean";
    report.n = series.n();
    report.p = series.p();
    report.bandwidth = bandwidth;
    report.statistic = tns_statistic(std::span<const double>(observed.data(), static_cast<std::size_t>(observed.size())),
                                     config.s, config.weights);

    const Reduction reduction = [&](std::span<const double> g) {
        std::vector<double> studentized(g.size());
        for (std::size_t j = 0; j < g.size(); ++j) studentized[j] = g[j] / scale(static_cast<Eigen::Index>(j));
        return tns_statistic(studentized, config.s, config.weights);
    };
    const double deltas[] = {config.delta};
    const Calibration cal = calibrate(series, bandwidth, config.B, config.seed, reduction, deltas);
    report.critical_value = cal.quantiles.front().value;
    report.p_value = bootstrap_p_value(cal.sample, report.statistic);
    report.reject = report.statistic > report.critical_value;
    return report;
}

SeriesMatrix whitenoise_embed(const SeriesMatrix& eps, std::size_t K) {
    const std::size_t n = eps.n();
    const std::size_t d = eps.p();
    if (K < 1) throw std::invalid_argument("whitenoise_embed: K must be at least 1");
    if (K >= n) throw std::invalid_argument("whitenoise_embed: K must be below n");
    const std::size_t rows = n - K;
    Matrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d * d * K));
    for (std::size_t t = 0; t < rows; ++t) {
        for (std::size_t k = 1; k <= K; ++k) {
            for (std::size_t a = 0; a < d; ++a) {
                for (std::size_t b = 0; b < d; ++b) {
                    const std::size_t col = (k - 1) * d * d + a * d + b;
                    out(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(col)) = eps(t + k, a) * eps(t, b);
                }
            }
        }
    }
    return SeriesMatrix(std::move(out));
}

TestReport whitenoise_test(const SeriesMatrix& eps, std::size_t K, TestConfig config) {
    if (config.procedure.empty()) config.procedure = "whitenoise";
    return mean_test(whitenoise_embed(eps, K), config);
}

Vector cusum_vector(const SeriesMatrix& series) {
    const std::size_t n = series.n();
    if (n < 3) throw InsufficientDataError("cusum_vector: need at least 3 observations");
    const double nn = static_cast<double>(n);
    Vector w = Vector::Zero(static_cast<Eigen::Index>(series.p()));
    for (std::size_t t = 1; t <= n; ++t)
        w += (nn - 2.0 * static_cast<double>(t) + 1.0) * series.values().row(static_cast<Eigen::Index>(t - 1)).transpose();
    return 2.0 / (std::sqrt(nn) * (nn - 1.0)) * w;
}

SeriesMatrix cusum_weighted(const SeriesMatrix& series) {
    const std::size_t n = series.n();
    if (n < 3) throw InsufficientDataError("cusum_weighted: need at least 3 observations");
    const double nn = static_cast<double>(n);
    Matrix y = series.values().rowwise() - series.values().colwise().mean();
    for (std::size_t t = 1; t <= n; ++t)
        y.row(static_cast<Eigen::Index>(t - 1)) *= 2.0 * (nn - 2.0 * static_cast<double>(t) + 1.0) / (nn - 1.0);
    return SeriesMatrix(std::move(y));
}

TestReport changepoint_test(const SeriesMatrix& series, TestConfig config) {
    if (config.procedure.empty()) config.procedure = "changepoint";
    check_config(config, series.p());
    const Vector w = cusum_vector(series);
    const SeriesMatrix weighted = cusum_weighted(series);
    const double bandwidth = config.bandwidth.value_or(andrews_bandwidth(weighted));

    TestReport report;
    report.config = config;
    report.n = series.n();
    report.p = series.p();
    report.bandwidth = bandwidth;
    report.statistic =
        tns_statistic(std::span<const double>(w.data(), static_cast<std::size_t>(w.size())), config.s, config.weights);

    const Reduction reduction = [&](std::span<const double> g) { return tns_statistic(g, config.s, config.weights); };
    const double deltas[] = {config.delta};
    const Calibration cal = calibrate(weighted, bandwidth, config.B, config.seed, reduction, deltas);
    report.critical_value = cal.quantiles.front().value;
    report.p_value = bootstrap_p_value(cal.sample, report.statistic);
    report.reject = report.statistic > report.critical_value;
    return report;
}

double nodewise_objective(const SeriesMatrix& y, std::size_t j, double lambda, const Vector& gamma) {
    const Vector fitted = y.values() * gamma;
    double penalty = 0.0;
    for (Eigen::Index k = 0; k < gamma.size(); ++k)
        if (static_cast<std::size_t>(k) != j) penalty += std::abs(gamma(k));
    return fitted.squaredNorm() / static_cast<double>(y.n()) + 2.0 * lambda * penalty;
}

namespace {

double soft_threshold(double r, double lambda) {
    if (r > lambda) return r - lambda;
    if (r < -lambda) return r + lambda;
    return 0.0;
}

NodewiseFit lasso_from_gram(const Matrix& gram, std::size_t j, double lambda) {
    const auto d = gram.rows();
    const auto jj = static_cast<Eigen::Index>(j);
    NodewiseFit fit;
    fit.beta = Vector::Zero(d);
    fit.beta(jj) = -1.0;

    for (fit.sweeps = 1; fit.sweeps <= kLassoMaxSweeps; ++fit.sweeps) {
        double max_change = 0.0;
        for (Eigen::Index k = 0; k < d; ++k) {
            if (k == jj) continue;
            const double skk = gram(k, k);
            const double old = fit.beta(k);
            const double partial = gram.row(k).dot(fit.beta) - skk * old;
            const double updated = skk > 0.0 ? soft_threshold(-partial, lambda) / skk : 0.0;
            fit.beta(k) = updated;
            max_change = std::max(max_change, std::abs(updated - old));
        }
        if (max_change < kLassoTolerance) {
            fit.converged = true;
            return fit;
        }
    }
    fit.sweeps = kLassoMaxSweeps;
    return fit;
}

Matrix gram_matrix(const SeriesMatrix& y) {
    return y.values().transpose() * y.values() / static_cast<double>(y.n());
}

}  // namespace

NodewiseFit lasso_nodewise(const SeriesMatrix& y, std::size_t j, double lambda) {
    if (y.p() < 2) throw std::invalid_argument("lasso_nodewise: need d >= 2");
    if (j >= y.p()) throw std::out_of_range("lasso_nodewise: node index out of range");
    if (!(lambda >= 0.0)) throw std::invalid_argument("lasso_nodewise: lambda must be nonnegative");
    return lasso_from_gram(gram_matrix(y), j, lambda);
}

std::vector<double> default_lambdas(const SeriesMatrix& y) {
    const double d = static_cast<double>(y.p());
    const double n = static_cast<double>(y.n());
    const double rate = 2.0 * std::sqrt(std::log(d) / n);
    std::vector<double> out(y.p());
    const Matrix centered = y.values().rowwise() - y.values().colwise().mean();
    for (std::size_t j = 0; j < y.p(); ++j)
        out[j] = rate * std::sqrt(centered.col(static_cast<Eigen::Index>(j)).squaredNorm() / (n - 1.0));
    return out;
}

PrecisionEstimate precision_estimate(const SeriesMatrix& y, std::span<const double> lambdas) {
    const std::size_t d = y.p();
    if (d < 2) throw std::invalid_argument("precision_estimate: need d >= 2");
    if (lambdas.size() != d) throw std::invalid_argument("precision_estimate: need one penalty per column");
    const Matrix gram = gram_matrix(y);

    std::vector<NodewiseFit> fits(d);
    parallel_for(d, [&](std::size_t j) { fits[j] = lasso_from_gram(gram, j, lambdas[j]); });

    const auto dd = static_cast<Eigen::Index>(d);
    PrecisionEstimate out;
    out.beta.resize(dd, dd);
    out.converged.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        out.beta.row(static_cast<Eigen::Index>(j)) = fits[j].beta.transpose();
        out.converged[j] = fits[j].converged;
    }

    // Column j holds ε̂_{j,·} = −Y β̂_j.
    const Matrix resid = -(y.values() * out.beta.transpose());
    const double n = static_cast<double>(y.n());
    out.v.resize(dd, dd);
    for (Eigen::Index i = 0; i < dd; ++i) {
        out.v(i, i) = resid.col(i).squaredNorm() / n;
        if (!(out.v(i, i) > 1e-12 * gram(i, i)))
            throw DegenerateError("precision_estimate: residual variance of node " + std::to_string(i + 1) +
                                  " vanishes (collinear columns)");
    }
    for (Eigen::Index i = 0; i < dd; ++i) {
        for (Eigen::Index j = i + 1; j < dd; ++j) {
            const double cross = resid.col(i).dot(resid.col(j));
            const double own_j = out.beta(i, j) * resid.col(j).squaredNorm();
            const double own_i = out.beta(j, i) * resid.col(i).squaredNorm();
            out.v(i, j) = out.v(j, i) = -(cross + own_j + own_i) / n;
        }
    }
    out.omega.resize(dd, dd);
    for (Eigen::Index i = 0; i < dd; ++i)
        for (Eigen::Index j = 0; j < dd; ++j) out.omega(i, j) = out.v(i, j) / (out.v(i, i) * out.v(j, j));

    const Vector inv_sd = gram.diagonal().cwiseSqrt().cwiseInverse();
    const Matrix correlation = inv_sd.asDiagonal() * gram * inv_sd.asDiagonal();
    out.near_singular = min_eigenvalue(correlation) < 1e-8;
    return out;
}

std::vector<IndexPair> diagonal_indices(std::size_t d) {
    std::vector<IndexPair> out;
    out.reserve(d);
    for (std::size_t j = 0; j < d; ++j) out.emplace_back(j, j);
    return out;
}

SeriesMatrix second_moment_sequence(const SeriesMatrix& y, std::span<const IndexPair> index_set) {
    if (index_set.empty()) throw std::invalid_argument("index set is empty");
    Matrix out(static_cast<Eigen::Index>(y.n()), static_cast<Eigen::Index>(index_set.size()));
    for (std::size_t a = 0; a < index_set.size(); ++a) {
        const auto [i, j] = index_set[a];
        if (i >= y.p() || j >= y.p()) throw std::out_of_range("index set entry outside the matrix");
        out.col(static_cast<Eigen::Index>(a)) =
            y.values().col(static_cast<Eigen::Index>(i)).cwiseProduct(y.values().col(static_cast<Eigen::Index>(j)));
    }
    return SeriesMatrix(std::move(out));
}

double ConfRegion::distance(std::span<const double> xi) const {
    if (xi.size() != static_cast<std::size_t>(center.size()))
        throw std::invalid_argument("ConfRegion: point has the wrong dimension");
    const double root_n = std::sqrt(static_cast<double>(n));
    std::vector<double> diff(xi.size());
    for (std::size_t a = 0; a < xi.size(); ++a) diff[a] = root_n * (center(static_cast<Eigen::Index>(a)) - xi[a]);
    return tns_statistic(diff, s, weights);
}

nlohmann::json to_json(const ConfRegion& region) {
    nlohmann::json j;
    j["schema_version"] = 1;
    auto indices = nlohmann::json::array();
    for (const auto& [a, b] : region.index_set) indices.push_back({a, b});
    j["index_set"] = indices;
    j["center"] = std::vector<double>(region.center.data(), region.center.data() + region.center.size());
    j["radius"] = region.radius;
    j["s"] = region.s;
    j["weights"] = region.weights;
    j["n"] = region.n;
    j["delta"] = region.delta;
    j["bandwidth"] = region.bandwidth;
    j["B"] = region.B;
    j["seed"] = region.seed;
    return j;
}

ConfRegion cov_confidence_region(const SeriesMatrix& y, std::span<const IndexPair> index_set, const TestConfig& config) {
    const SeriesMatrix x = second_moment_sequence(y, index_set);
    check_config(config, x.p());
    const double bandwidth = config.bandwidth.value_or(andrews_bandwidth(x));

    ConfRegion region;
    region.index_set.assign(index_set.begin(), index_set.end());
    region.center = x.mean();
    region.s = config.s;
    region.weights = config.weights;
    region.n = y.n();
    region.delta = config.delta;
    region.bandwidth = bandwidth;
    region.B = config.B;
    region.seed = config.seed;

    const Reduction reduction = [&](std::span<const double> g) { return tns_statistic(g, config.s, config.weights); };
    const double deltas[] = {config.delta};
    region.radius = calibrate(x, bandwidth, config.B, config.seed, reduction, deltas).quantiles.front().value;
    return region;
}

}  // namespace hdclt
