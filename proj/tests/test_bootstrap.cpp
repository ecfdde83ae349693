#include "catch_amalgamated.hpp"

#include "hdclt/bootstrap.hpp"
#include "hdclt/dgp.hpp"
#include "hdclt/lrcov.hpp"
#include "hdclt/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

using namespace hdclt;
using Catch::Matchers::WithinAbs;

namespace {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double ks_distance(std::vector<double> sample, double sd) {
    std::sort(sample.begin(), sample.end());
    const double m = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = normal_cdf(sample[i] / sd);
        d = std::max({d, f - static_cast<double>(i) / m, static_cast<double>(i + 1) / m - f});
    }
    return d;
}

}  // namespace

TEST_CASE("Theta factor reproduces Theta", "[bootstrap][factor]") {
    for (double b : {1.3221, 5.0, 10.0}) {
        const auto factor = factor_theta(50, b);
        const Matrix theta = theta_matrix(50, b);
        const Matrix rebuilt = factor.lower * factor.lower.transpose();
        REQUIRE((rebuilt - theta).cwiseAbs().maxCoeff() < (factor.jittered ? 1e-9 : 1e-12));
    }
    REQUIRE(cached_theta_factor(30, 2.0) == cached_theta_factor(30, 2.0));
}

TEST_CASE("sample_ghat is deterministic and thread-count independent", "[bootstrap][determinism]") {
    const auto x = generate(DgpSpec::moving_average(1, {1.0, 0.5}), 80, 3);
    const std::size_t saved = thread_count();
    set_thread_count(1);
    const auto one = sample_ghat(x, 3.0, 300, 11);
    set_thread_count(4);
    const auto four = sample_ghat(x, 3.0, 300, 11);
    set_thread_count(saved);
    REQUIRE(one.draws == four.draws);
    REQUIRE(one.series_fingerprint == x.fingerprint());

    // Draw b depends only on its own stream, so a shorter run is a prefix.
    const auto prefix = sample_ghat(x, 3.0, 70, 11);
    REQUIRE(prefix.draws == one.draws.topRows(70));
    REQUIRE(sample_ghat(x, 3.0, 70, 12).draws != prefix.draws);
}

TEST_CASE("bootstrap draws follow N(0, centered lrcov)", "[bootstrap][law]") {
    const auto x = generate(DgpSpec::moving_average(3, {1.0, 0.6, 0.3}, Innovation::exponential), 60, 5);
    const double b = 4.0;
    const std::size_t B = 20000;
    const auto draws = sample_ghat(x, b, B, 99);
    const Matrix xi = lrcov_estimate(x, KernelSpec::quadratic_spectral(b), LagTruncation::none).values;
    const Matrix cov = draws.draws.transpose() * draws.draws / static_cast<double>(B);
    for (Eigen::Index j = 0; j < 3; ++j) {
        for (Eigen::Index k = 0; k < 3; ++k) {
            const double se = std::sqrt((xi(j, j) * xi(k, k) + xi(j, k) * xi(j, k)) / static_cast<double>(B));
            REQUIRE(std::abs(cov(j, k) - xi(j, k)) <= 4.0 * se);
        }
        std::vector<double> col(draws.draws.col(j).data(), draws.draws.col(j).data() + B);
        REQUIRE(ks_distance(col, std::sqrt(xi(j, j))) < 1.62762 / std::sqrt(static_cast<double>(B)));
    }
}

TEST_CASE("quantile picks the ceil((1-delta)B)-th order statistic", "[bootstrap][quantile]") {
    std::vector<double> v(100);
    std::iota(v.begin(), v.end(), 1.0);
    std::reverse(v.begin(), v.end());
    REQUIRE(quantile(v, 0.05).value == 95.0);
    REQUIRE(quantile(v, 0.1).value == 90.0);
    REQUIRE(quantile(v, 0.013).value == 99.0);
    REQUIRE_FALSE(quantile(v, 0.05).degenerate);

    const std::vector<double> small{3.0, 1.0, 2.0};
    const auto q = quantile(small, 0.05);
    REQUIRE(q.value == 3.0);
    REQUIRE(q.degenerate);
    REQUIRE_THROWS(quantile(small, 0.0));
    REQUIRE_THROWS(quantile(small, 1.0));
}

TEST_CASE("bootstrap p-value", "[bootstrap][quantile]") {
    const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    REQUIRE(bootstrap_p_value(v, 2.5) == 3.0 / 5.0);
    REQUIRE(bootstrap_p_value(v, 3.0) == 3.0 / 5.0);
    REQUIRE(bootstrap_p_value(v, 10.0) == 1.0 / 5.0);
}

TEST_CASE("calibrate reduces each draw", "[bootstrap][calibrate]") {
    const auto x = generate(DgpSpec::iid(4), 50, 8);
    const std::vector<double> deltas{0.1, 0.05};
    const auto max_abs = [](std::span<const double> g) {
        double m = 0.0;
        for (double v : g) m = std::max(m, std::abs(v));
        return m;
    };
    const auto cal = calibrate(x, 2.0, 400, 3, max_abs, deltas);
    const auto draws = sample_ghat(x, 2.0, 400, 3);
    REQUIRE(cal.sample.size() == 400);
    REQUIRE(cal.sample[17] == draws.draws.row(17).cwiseAbs().maxCoeff());
    REQUIRE(cal.quantiles.size() == 2);
    REQUIRE(cal.quantiles[0].value <= cal.quantiles[1].value);
    REQUIRE(cal.quantiles[1].value == quantile(cal.sample, 0.05).value);
}

TEST_CASE("export_draws writes csv and sidecar", "[bootstrap][io]") {
    const auto x = generate(DgpSpec::iid(2), 20, 1);
    const auto draws = sample_ghat(x, 1.5, 10, 4);
    const auto path = std::filesystem::temp_directory_path() / "hdclt_test_draws.csv";
    export_draws(draws, path);
    const auto table = read_csv(path);
    REQUIRE(table.header == std::vector<std::string>{"g1", "g2"});
    REQUIRE((table.data.values() - draws.draws).cwiseAbs().maxCoeff() == 0.0);
    std::ifstream sidecar(path.string() + ".json");
    const auto meta = nlohmann::json::parse(sidecar);
    REQUIRE(meta["B"] == 10);
    REQUIRE(meta["series_fingerprint"] == x.fingerprint());
    std::filesystem::remove(path);
    std::filesystem::remove(path.string() + ".json");
}
