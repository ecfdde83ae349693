#include "catch_amalgamated.hpp"

#include "hdclt/dgp.hpp"
#include "hdclt/error.hpp"
#include "hdclt/lrcov.hpp"

#include <cmath>
#include <random>

using namespace hdclt;
using Catch::Matchers::WithinAbs;

namespace {

/// Independent re-simulation of the innovation draws used by generate().
Matrix innovations(std::size_t rows, std::size_t p, std::uint64_t key) {
    Stream s(key);
    std::normal_distribution<double> normal;
    Matrix e(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
    for (Eigen::Index t = 0; t < e.rows(); ++t)
        for (Eigen::Index j = 0; j < e.cols(); ++j) e(t, j) = normal(s);
    return e;
}

}  // namespace

TEST_CASE("identity filter returns the innovations", "[dgp]") {
    const auto x = generate(DgpSpec::iid(3), 50, 11);
    REQUIRE(x.values() == innovations(50, 3, derive(11, 0)));
}

TEST_CASE("causal_linear with L=0 collapses to the iid case", "[dgp]") {
    const auto causal = generate(DgpSpec::causal(4, 2.0, 0), 80, 3);
    const auto iid = generate(DgpSpec::iid(4), 80, 3);
    REQUIRE(causal.values() == iid.values());
}

TEST_CASE("generators are deterministic in (spec, n, seed)", "[dgp]") {
    Matrix a(2, 2);
    a << 0.5, 0.1, -0.2, 0.3;
    for (const auto& spec : {DgpSpec::moving_average(3, {1.0, 0.5, 0.25}), DgpSpec::causal(2, 2.5, 30),
                             DgpSpec::var(a, Innovation::uniform)}) {
        REQUIRE(generate(spec, 100, 9).values() == generate(spec, 100, 9).values());
        REQUIRE(generate(spec, 100, 9).values() != generate(spec, 100, 10).values());
    }
}

TEST_CASE("ma_q applies the filter to shifted innovations", "[dgp]") {
    const std::vector<double> c{1.0, -0.4, 0.7};
    const auto x = generate(DgpSpec::moving_average(2, c), 30, 5);
    const Matrix e = innovations(32, 2, derive(5, 0));
    for (Eigen::Index t = 0; t < 30; ++t)
        for (Eigen::Index j = 0; j < 2; ++j) {
            const double expected = c[0] * e(t + 2, j) + c[1] * e(t + 1, j) + c[2] * e(t, j);
            REQUIRE_THAT(x(static_cast<std::size_t>(t), static_cast<std::size_t>(j)), WithinAbs(expected, 1e-14));
        }
}

TEST_CASE("ma_q is exactly m-dependent", "[dgp][property]") {
    // Correlation between X_1 and X_{1+k} across independent seeds.
    const auto spec = DgpSpec::moving_average(1, {1.0, 0.8, 0.6});
    const int reps = 4000;
    auto corr_at = [&](std::size_t k) {
        double sxy = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
        for (int r = 0; r < reps; ++r) {
            const auto x = generate(spec, 8, static_cast<std::uint64_t>(r));
            const double a = x(0, 0), b = x(k, 0);
            sx += a; sy += b; sxy += a * b; sxx += a * a; syy += b * b;
        }
        const double cov = sxy / reps - sx / reps * sy / reps;
        return cov / std::sqrt((sxx / reps - sx * sx / reps / reps) * (syy / reps - sy * sy / reps / reps));
    };
    for (std::size_t k : {3u, 4u, 6u}) REQUIRE(std::abs(corr_at(k)) < 4.0 / std::sqrt(reps));
    // Lag 2 carries c_0 c_2 / Σc² = 0.6 / 2.0 = 0.3.
    REQUIRE_THAT(corr_at(2), WithinAbs(0.3, 4.0 / std::sqrt(reps)));
}

TEST_CASE("var1 burn-in and stationary variance", "[dgp]") {
    Matrix a = Matrix::Identity(1, 1) * 0.5;
    const auto spec = DgpSpec::var(a);
    // 0.5^k < 1e-12 first at k = 40.
    REQUIRE(var_burn_in(a) == 240);
    const auto x = generate(spec, 20000, 1);
    const double var = (x.values().array() - x.values().mean()).square().mean();
    REQUIRE_THAT(var, WithinAbs(1.0 / (1.0 - 0.25), 0.05));
}

TEST_CASE("invalid specs are rejected", "[dgp]") {
    REQUIRE_THROWS_AS(DgpSpec::causal(2, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(DgpSpec::var(Matrix::Identity(2, 2)), std::invalid_argument);
    REQUIRE_THROWS_AS(DgpSpec::moving_average(2, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(DgpSpec::moving_average(2, {1.0, std::nan("")}), std::invalid_argument);
    REQUIRE_THROWS_AS(generate(DgpSpec::iid(2), 1, 0), std::invalid_argument);
}

TEST_CASE("truncation lag follows the 1e-10 rule", "[dgp]") {
    for (double beta : {2.0, 3.0, 5.0}) {
        const auto lag = truncation_lag(beta);
        REQUIRE(std::pow(lag + 1.0, -beta) < 1e-10);
        REQUIRE(std::pow(static_cast<double>(lag), -beta) >= 1e-10);
    }
    REQUIRE(DgpSpec::causal(1, 5.0).filter().size() == truncation_lag(5.0) + 1);
}

TEST_CASE("coupling beyond the truncation lag leaves the series unchanged", "[dgp][coupling]") {
    const auto pair = generate_coupled(DgpSpec::causal(3, 2.0, 2), 40, 5, 8);
    REQUIRE(pair.x.values() == pair.x_prime.values());
    REQUIRE(pair.x.values() == generate(DgpSpec::causal(3, 2.0, 2), 40, 8).values());
}

TEST_CASE("coupling at lag 0 changes each row through c_0 only", "[dgp][coupling]") {
    const auto spec = DgpSpec::causal(2, 2.0, 3);
    const std::size_t n = 25;
    const auto pair = generate_coupled(spec, n, 0, 4);
    const Matrix e = innovations(n + 3, 2, derive(4, 0));
    const Matrix e_copy = innovations(n, 2, derive(4, 1));
    const double c0 = 1.0;
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t j = 0; j < 2; ++j) {
            const double expected =
                c0 * (e_copy(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) -
                      e(static_cast<Eigen::Index>(t + 3), static_cast<Eigen::Index>(j)));
            REQUIRE_THAT(pair.x_prime(t, j) - pair.x(t, j), WithinAbs(expected, 1e-13));
        }
}

TEST_CASE("coupling rejects unsupported inputs", "[dgp][coupling]") {
    REQUIRE_THROWS_AS(generate_coupled(DgpSpec::var(Matrix::Identity(2, 2) * 0.3), 20, 1, 0), UnsupportedError);
    REQUIRE_THROWS_AS(generate_coupled(DgpSpec::iid(2), 20, 20, 0), std::invalid_argument);
}

TEST_CASE("theta estimates match the closed form sqrt(2)(m+1)^-beta", "[dgp][theta]") {
    const auto spec = DgpSpec::causal(2, 2.0, 10);
    for (std::size_t m : {0u, 1u, 3u}) {
        const auto est = estimate_theta(spec, m, 2.0, 20000, 100 + m);
        const double truth = std::sqrt(2.0) * std::pow(m + 1.0, -2.0);
        for (std::size_t j = 0; j < 2; ++j) {
            REQUIRE(est.se[j] > 0.0);
            REQUIRE(std::abs(est.theta[j] - truth) < 3.0 * est.se[j]);
        }
    }
    const auto beyond = estimate_theta(spec, 11, 2.0, 100, 1);
    REQUIRE(beyond.theta == std::vector<double>{0.0, 0.0});

    const auto iid = estimate_theta(DgpSpec::iid(1), 0, 2.0, 20000, 3);
    REQUIRE(std::abs(iid.theta[0] - std::sqrt(2.0)) < 3.0 * iid.se[0]);
    REQUIRE_THROWS(estimate_theta(spec, 0, 2.0, 50, 0));
}

TEST_CASE("analytic long-run covariance closed forms", "[dgp][lrcov]") {
    const auto ma1 = analytic_longrun_cov(DgpSpec::moving_average(1, {1.0, 0.5}), 100);
    REQUIRE_THAT(ma1(0, 0), WithinAbs(2.24, 1e-12));
    REQUIRE(analytic_longrun_cov(DgpSpec::iid(4), 100) == Matrix::Identity(4, 4));
    const auto var0 = analytic_longrun_cov(DgpSpec::var(Matrix::Zero(3, 3)), 50);
    REQUIRE((var0 - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);

    // AR(1), φ = 0.5: Γ(k) = φ^k/(1−φ²); compare against the direct finite sum.
    const double phi = 0.5;
    const std::size_t n = 40;
    double expected = 1.0 / (1.0 - phi * phi);
    for (std::size_t k = 1; k < n; ++k)
        expected += 2.0 * (1.0 - static_cast<double>(k) / n) * std::pow(phi, k) / (1.0 - phi * phi);
    const auto ar = analytic_longrun_cov(DgpSpec::var(Matrix::Identity(1, 1) * phi), n);
    REQUIRE_THAT(ar(0, 0), WithinAbs(expected, 1e-10));
}

TEST_CASE("analytic long-run covariance matches the simulated sum covariance", "[dgp][lrcov]") {
    Matrix a(2, 2);
    a << 0.4, 0.3, -0.1, 0.2;
    const auto spec = DgpSpec::var(a);
    const std::size_t n = 30;
    const int reps = 20000;
    Matrix acc = Matrix::Zero(2, 2);
    for (int r = 0; r < reps; ++r) {
        const Vector s = generate(spec, n, static_cast<std::uint64_t>(r)).values().colwise().sum().transpose() /
                         std::sqrt(static_cast<double>(n));
        acc += s * s.transpose();
    }
    acc /= reps;
    const Matrix xi = analytic_longrun_cov(spec, n);
    REQUIRE((acc - xi).cwiseAbs().maxCoeff() < 0.08);
}

TEST_CASE("analytic long-run covariance is symmetric PSD", "[dgp][property]") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix a(4, 4);
        for (Eigen::Index i = 0; i < 4; ++i)
            for (Eigen::Index j = 0; j < 4; ++j) a(i, j) = u(gen);
        const auto xi = analytic_longrun_cov(DgpSpec::var(a), 60);
        REQUIRE((xi - xi.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(xi);
        REQUIRE(eig.eigenvalues().minCoeff() >= -1e-10 * eig.eigenvalues().maxCoeff());
    }
}

TEST_CASE("DgpSpec config round-trip and schema check", "[dgp][config]") {
    Matrix a(2, 2);
    a << 0.5, 0.1, 0.0, 0.25;
    for (auto spec : {DgpSpec::moving_average(3, {1.0, 0.5}, Innovation::exponential), DgpSpec::causal(2, 3.0, 12),
                      DgpSpec::var(a, Innovation::uniform)}) {
        spec.moment_bound_tag = "B_n=1";
        const auto back = dgp_from_json(to_json(spec));
        REQUIRE(to_json(back) == to_json(spec));
        REQUIRE(generate(back, 20, 1).values() == generate(spec, 20, 1).values());
    }
    auto j = to_json(DgpSpec::iid(2));
    j["schema_version"] = 99;
    REQUIRE_THROWS_AS(dgp_from_json(j), FormatError);
}
