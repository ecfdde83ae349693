#include "catch_amalgamated.hpp"

#include "hdclt/dgp.hpp"
#include "hdclt/error.hpp"
#include "hdclt/lrcov.hpp"

#include <cmath>
#include <random>

using namespace hdclt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// 50-digit mpmath evaluations of the QS kernel formula.
struct KernelValue {
    double x;
    double value;
};
constexpr KernelValue kQsReference[] = {
    {1.0, 0.13786058167459354869},    {-10.0, -0.0021108579925487035717}, {-7.3, 0.0029860296231064075154},
    {-4.5, 0.0026368082847392081297}, {-2.25, 0.028485109384780162661},   {-0.6, 0.5734882380838298108},
    {0.1, 0.98585971849779755077},    {0.35, 0.83638324453513933057},     {1.7, -0.071035734286380623455},
    {3.3, -0.019425885879410625666},  {6.05, 0.0037634486417286549819},   {0.5, 0.68693073006405944663},
    {1e-3, 0.99999857877768762684},   {1e-5, 0.99999999985787769663},     {1e-8, 0.99999999999999985788},
    {1e-12, 1.0},
};

SeriesMatrix column(std::initializer_list<double> values) {
    Matrix m(static_cast<Eigen::Index>(values.size()), 1);
    Eigen::Index i = 0;
    for (double v : values) m(i++, 0) = v;
    return SeriesMatrix(m);
}

SeriesMatrix ar1_series(double phi, std::size_t n, std::uint64_t seed) {
    return generate(DgpSpec::var(Matrix::Identity(1, 1) * phi), n, seed);
}

}  // namespace

TEST_CASE("qs_kernel matches high-precision values", "[lrcov][kernel]") {
    for (const auto& [x, value] : kQsReference) {
        INFO("x = " << x);
        REQUIRE_THAT(qs_kernel(x), WithinAbs(value, 1e-14));
    }
    REQUIRE(qs_kernel(0.0) == 1.0);
    for (double x : {0.1, 1.0, 7.3, 1e-6, 0.2652}) REQUIRE(qs_kernel(-x) == qs_kernel(x));
}

TEST_CASE("qs_kernel is continuous across the series/direct switch", "[lrcov][kernel]") {
    const double switch_x = 5.0 / (6.0 * 3.14159265358979323846);
    const double below = qs_kernel(std::nextafter(switch_x, 0.0));
    const double above = qs_kernel(std::nextafter(switch_x, 1.0));
    REQUIRE(std::abs(below - above) < 1e-14);
    for (double x = 0.0; x < 12.0; x += 0.01) REQUIRE(std::abs(qs_kernel(x)) <= 1.0);
}

TEST_CASE("custom kernels are validated", "[lrcov][kernel]") {
    REQUIRE_NOTHROW(KernelSpec::custom([](double x) { return std::max(0.0, 1.0 - std::abs(x)); }, 3.0, "bartlett"));
    REQUIRE_THROWS(KernelSpec::custom([](double) { return 0.5; }, 1.0));
    REQUIRE_THROWS(KernelSpec::custom([](double x) { return x > 0 ? std::exp(-x) : 1.0; }, 1.0));
    REQUIRE_THROWS(KernelSpec::custom([](double x) { return 1.0 + x * x; }, 1.0));
    REQUIRE_THROWS(KernelSpec::quadratic_spectral(0.0));
}

TEST_CASE("autocov_hat hand cases", "[lrcov]") {
    const auto x = column({0.0, 2.0});
    REQUIRE_THAT(autocov_hat(x, 1)(0, 0), WithinAbs(-0.5, 1e-15));
    REQUIRE_THAT(autocov_hat(x, 0)(0, 0), WithinAbs(1.0, 1e-15));
    REQUIRE_THROWS_AS(autocov_hat(x, 2), std::out_of_range);

    const SeriesMatrix constant(Matrix::Constant(6, 3, 4.2));
    for (long j = -5; j <= 5; ++j) REQUIRE(autocov_hat(constant, j).isZero(1e-15));

    const auto r = generate(DgpSpec::var(Matrix::Identity(3, 3) * 0.4), 40, 2);
    for (long j : {1L, 3L, 39L}) REQUIRE(autocov_hat(r, -j) == autocov_hat(r, j).transpose());
}

TEST_CASE("fit_ar1 recovers the autoregressive coefficient", "[lrcov][ar1]") {
    const auto noise = generate(DgpSpec::iid(1), 10000, 1);
    const Vector c0 = noise.values().col(0);
    REQUIRE(std::abs(fit_ar1(std::span<const double>(c0.data(), 10000)).rho) < 0.05);

    const auto ar = ar1_series(0.5, 20000, 2);
    const Vector c1 = ar.values().col(0);
    const auto fit = fit_ar1(std::span<const double>(c1.data(), 20000));
    REQUIRE_THAT(fit.rho, WithinAbs(0.5, 0.05));
    REQUIRE_THAT(fit.sigma2, WithinAbs(1.0, 0.05));

    // Independent route: least squares through a QR solve on the lagged design.
    const Vector centered = c1.array() - c1.mean();
    const Vector lagged = centered.head(19999);
    const Vector response = centered.tail(19999);
    const double qr_rho = lagged.colPivHouseholderQr().solve(response)(0);
    REQUIRE_THAT(fit.rho, WithinAbs(qr_rho, 1e-12));
}

TEST_CASE("fit_ar1 clips and detects degenerate columns", "[lrcov][ar1]") {
    std::vector<double> alternating(10);
    for (std::size_t t = 0; t < alternating.size(); ++t) alternating[t] = t % 2 ? -1.0 : 1.0;
    REQUIRE(fit_ar1(alternating).rho == -kRhoClip);

    std::vector<double> flat(10, 3.3);
    REQUIRE_THROWS_AS(fit_ar1(flat), DegenerateError);
    std::vector<double> tiny{1.0, 2.0};
    REQUIRE_THROWS_AS(fit_ar1(tiny), InsufficientDataError);
}

TEST_CASE("Andrews bandwidth formula", "[lrcov][bandwidth]") {
    const Ar1Fit forced[] = {{0.5, 1.0}};
    // â = 4·0.25·256/16 = 16, b = 1.3221·1600^{1/5}
    REQUIRE_THAT(andrews_bandwidth(forced, 100), WithinAbs(5.782, 0.001));
    REQUIRE_THAT(andrews_bandwidth(forced, 100), WithinRel(1.3221 * std::pow(1600.0, 0.2), 1e-14));

    const Ar1Fit white[] = {{0.0, 1.0}, {0.0, 2.0}};
    REQUIRE(andrews_bandwidth(white, 500) == kMinBandwidth);

    const Ar1Fit mixed[] = {{0.3, 1.0}, {-0.2, 0.5}, {0.6, 2.0}};
    REQUIRE_THAT(andrews_bandwidth(mixed, 800) / andrews_bandwidth(mixed, 400), WithinRel(std::pow(2.0, 0.2), 1e-12));

    const SeriesMatrix with_flat(Matrix::Constant(20, 2, 1.0));
    REQUIRE_THROWS_AS(andrews_bandwidth(with_flat), DegenerateError);
}

TEST_CASE("lrcov_estimate hand case and degenerate input", "[lrcov][estimator]") {
    const auto x = column({0.0, 2.0});
    const auto est = lrcov_estimate(x, KernelSpec::quadratic_spectral(1.0));
    // Ĥ_0 + 2·𝒦(1)·Ĥ_1 = 1 − 𝒦(1)
    REQUIRE_THAT(est.values(0, 0), WithinAbs(1.0 - 0.13786058167459354869, 1e-14));

    const SeriesMatrix constant(Matrix::Constant(30, 2, -7.0));
    REQUIRE(lrcov_estimate(constant, KernelSpec::quadratic_spectral(3.0)).values.isZero(0.0));
}

TEST_CASE("lrcov_estimate equals the naive lag sum for p = 1", "[lrcov][estimator][oracle]") {
    const auto x = ar1_series(0.6, 120, 9);
    const Vector xc = x.values().col(0).array() - x.values().col(0).mean();
    const auto n = static_cast<long>(x.n());
    for (double b : {0.5, 1.3221, 4.0, 17.0}) {
        double naive = 0.0;
        for (long j = -(n - 1); j <= n - 1; ++j) {
            double h = 0.0;
            if (j >= 0)
                for (long t = j; t < n; ++t) h += xc(t) * xc(t - j);
            else
                for (long t = -j; t < n; ++t) h += xc(t + j) * xc(t);
            naive += qs_kernel(static_cast<double>(j) / b) * h / static_cast<double>(n);
        }
        const auto kernel = KernelSpec::quadratic_spectral(b);
        REQUIRE_THAT(lrcov_estimate(x, kernel, LagTruncation::none).values(0, 0), WithinRel(naive, 1e-11));
        REQUIRE_THAT(lrcov_estimate(x, kernel).values(0, 0), WithinRel(naive, 1e-11));
        REQUIRE_THAT(lrcov_diagonal(x, kernel)(0), WithinRel(naive, 1e-11));
    }
}

TEST_CASE("lrcov_estimate is consistent for iid data", "[lrcov][estimator]") {
    const auto x = generate(DgpSpec::iid(3), 5000, 21);
    const auto est = lrcov_estimate(x, KernelSpec::quadratic_spectral(andrews_bandwidth(x)));
    REQUIRE((est.values - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 0.15);
}

TEST_CASE("lrcov_estimate invariants", "[lrcov][estimator][property]") {
    Matrix a(3, 3);
    a << 0.5, 0.1, 0.0, 0.0, 0.3, 0.2, 0.1, 0.0, -0.4;
    const auto x = generate(DgpSpec::var(a), 300, 4);
    const auto kernel = KernelSpec::quadratic_spectral(6.0);
    const auto est = lrcov_estimate(x, kernel);
    REQUIRE(est.values == est.values.transpose());
    REQUIRE(min_eigenvalue(est.values) >= -1e-8 * est.values.diagonal().maxCoeff());

    Matrix shifted = x.values();
    shifted.rowwise() += Eigen::RowVector3d(5.0, -2.0, 100.0);
    const auto est_shift = lrcov_estimate(SeriesMatrix(shifted), kernel);
    REQUIRE((est_shift.values - est.values).cwiseAbs().maxCoeff() < 1e-9);

    // A kernel that vanishes at every nonzero lag leaves exactly the sample covariance.
    const auto spike = KernelSpec::custom([](double u) { return std::max(0.0, 1.0 - std::abs(u)); }, 0.5, "spike");
    const auto h0 = autocov_hat(x, 0);
    REQUIRE((lrcov_estimate(x, spike).values - h0).cwiseAbs().maxCoeff() < 1e-15 * h0.cwiseAbs().maxCoeff() * 10);
}

TEST_CASE("theta_matrix structure", "[lrcov][theta]") {
    const auto theta = theta_matrix(200, 5.0);
    REQUIRE(theta.diagonal().isOnes(0.0));
    REQUIRE(theta == theta.transpose());
    REQUIRE(min_eigenvalue(theta) >= -1e-8 * 200);
    REQUIRE_THAT(theta_matrix(2, 1.0)(0, 1), WithinAbs(0.13786058167459354869, 1e-15));
    REQUIRE_THROWS(theta_matrix(1, 1.0));
}
