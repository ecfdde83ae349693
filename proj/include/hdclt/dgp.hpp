#pragma once

#include "hdclt/rng.hpp"
#include "hdclt/series.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace hdclt {

enum class DgpKind { ma_q, var1, causal_linear };

/// Innovation law; every option has mean 0 and variance 1.
enum class Innovation {
    gaussian,
    uniform,      ///< U(−√3, √3)
    exponential,  ///< Exp(1) − 1, skewed
};

/**
 * Synthetic data-generating process.
 *
 *  - ma_q:          X_{t,j} = Σ_{l=0}^{m} c_l ε_{t−l,j}, exactly m-dependent.
 *  - causal_linear: same filter with c_l = (l+1)^{−β}, l ≤ L.
 *  - var1:          X_t = A X_{t−1} + ε_t, spectral radius of A below 1.
 *
 * Innovations are iid across time and coordinates.
 */
struct DgpSpec {
    DgpKind kind = DgpKind::ma_q;
    Innovation innovation = Innovation::gaussian;
    std::size_t p = 1;

    std::vector<double> ma_coeffs{1.0};  ///< ma_q: c_0..c_m
    double beta = 2.0;                   ///< causal_linear decay exponent, > 1
    std::optional<std::size_t> truncation;  ///< causal_linear L; default from truncation_lag()
    Matrix var_matrix;                   ///< var1: p×p coefficient matrix A

    // Metadata only; never estimated.
    std::optional<double> mixing_alpha;  ///< nominal α-mixing decay rate (var1)
    std::string moment_bound_tag;        ///< nominal B_n label

    static DgpSpec iid(std::size_t p, Innovation innovation = Innovation::gaussian);
    static DgpSpec moving_average(std::size_t p, std::vector<double> coeffs,
                                  Innovation innovation = Innovation::gaussian);
    static DgpSpec causal(std::size_t p, double beta, std::optional<std::size_t> truncation = {},
                          Innovation innovation = Innovation::gaussian);
    static DgpSpec var(Matrix a, Innovation innovation = Innovation::gaussian);

    /// Throws std::invalid_argument when an invariant is violated.
    void validate() const;

    /// Filter coefficients c_0..c_L for the linear kinds.
    [[nodiscard]] std::vector<double> filter() const;

    /// Dependence range m for ma_q (order) and causal_linear (L).
    [[nodiscard]] std::size_t dependence_range() const;

    /// Physical-dependence decay exponent β − 1 (causal_linear only).
    [[nodiscard]] std::optional<double> physical_alpha() const;

    [[nodiscard]] std::string label() const;
};

/// Smallest L with (L+1)^{−β} < 1e−10.
[[nodiscard]] std::size_t truncation_lag(double beta);

/// Burn-in for var1: 200 plus the smallest k with ‖A^k‖₂ < 1e−12.
[[nodiscard]] std::size_t var_burn_in(const Matrix& a);

[[nodiscard]] std::string to_string(DgpKind kind);
[[nodiscard]] std::string to_string(Innovation innovation);

inline constexpr int kDgpSchemaVersion = 1;

[[nodiscard]] nlohmann::json to_json(const DgpSpec& spec);
[[nodiscard]] DgpSpec dgp_from_json(const nlohmann::json& j);

/// Draws innovations of one law from a stream.
class InnovationSampler {
public:
    explicit InnovationSampler(Innovation innovation) : innovation_(innovation) {}
    double operator()(Stream& stream);

private:
    Innovation innovation_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{-1.7320508075688772, 1.7320508075688772};
    std::exponential_distribution<double> exponential_{1.0};
};

/// Deterministic in (spec, n, seed).
[[nodiscard]] SeriesMatrix generate(const DgpSpec& spec, std::size_t n, std::uint64_t seed);

/**
 * x and its coupled copy: row t of x_prime is X'_{t,{m}}, i.e. X_t recomputed
 * with ε_{t−m} replaced by an independent copy ε'_{t−m}.
 */
struct CoupledPair {
    SeriesMatrix x;
    SeriesMatrix x_prime;
    std::size_t lag;
};

/// x equals generate(spec, n, seed). Requires a linear-filter spec and m < n.
[[nodiscard]] CoupledPair generate_coupled(const DgpSpec& spec, std::size_t n, std::size_t m,
                                           std::uint64_t seed);

struct ThetaEstimate {
    std::vector<double> theta;  ///< θ̂_{m,q,j}, one per coordinate
    std::vector<double> se;     ///< delta-method standard errors
    std::size_t reps = 0;
};

/// Monte Carlo estimate of θ_{m,q,j} = ‖X_{t,j} − X'_{t,j,{m}}‖_q at a
/// stationary time point. Requires reps ≥ 100 and q ≥ 1.
[[nodiscard]] ThetaEstimate estimate_theta(const DgpSpec& spec, std::size_t m, double q,
                                           std::size_t reps, std::uint64_t seed);

/// Lag-k autocovariance Γ(k) of the stationary process.
[[nodiscard]] Matrix analytic_autocov(const DgpSpec& spec, std::size_t k);

/// Ξ = Cov(n^{−1/2} Σ X_t) = Γ(0) + Σ_{k=1}^{n−1} (1 − k/n)(Γ(k) + Γ(k)ᵀ).
[[nodiscard]] Matrix analytic_longrun_cov(const DgpSpec& spec, std::size_t n);

}  // namespace hdclt
