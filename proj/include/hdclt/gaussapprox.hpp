#pragma once

#include "hdclt/dgp.hpp"
#include "hdclt/series.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hdclt {

/// Axis-aligned box {x : lower ≤ x ≤ upper}; bounds may be infinite.
struct Box {
    Vector lower;
    Vector upper;

    [[nodiscard]] bool contains(std::span<const double> x) const;
};

/**
 * Finite family of hyper-rectangles approximating the sup over 𝒜^re.
 *
 *  - max_rect:    {x : max_j |x_j|/σ_j ≤ u} over a grid of u.
 *  - orthant:     {x : x_j ≤ u σ_j ∀j} over the same grid.
 *  - random_rect: boxes whose per-coordinate bounds are N(0, σ_j²) quantiles.
 *
 * The u grid holds the Šidák approximation of the π-quantile of
 * max_j |G_j|/σ_j for π spaced evenly on [0.5, 0.999].
 */
struct RectFamily {
    enum class Kind { max_rect, orthant, random_rect, full_space };

    struct Options {
        std::size_t grid = 41;
        std::size_t random_boxes = 200;
        bool include_orthants = false;
        std::uint64_t seed = 0;
    };

    std::vector<Kind> kinds;
    std::vector<Box> boxes;

    /// Default family: max-rect grid plus random boxes, sized by options.
    static RectFamily build(std::span<const double> sd, const Options& options);
    static RectFamily full_space(std::size_t p);

    [[nodiscard]] std::size_t size() const noexcept { return boxes.size(); }

    /// Indicator matrix: entry (r, a) is 1 when row r of points lies in box a.
    [[nodiscard]] std::vector<std::vector<char>> membership(const Matrix& points) const;
};

[[nodiscard]] RectFamily::Kind rect_kind_from_string(const std::string& name);
[[nodiscard]] std::string to_string(RectFamily::Kind kind);

struct RhoEstimate {
    double rho = 0.0;
    double se = 0.0;
    std::size_t reps = 0;
};

/// R draws of n^{−1/2} Σ X_t from the generator, stream derive(derive(seed, 0), r).
[[nodiscard]] Matrix simulate_scaled_sums(const DgpSpec& spec, std::size_t n, std::size_t R, std::uint64_t seed);

/// R draws of N(0, Ξ), stream derive(derive(seed, 1), r).
[[nodiscard]] Matrix simulate_gaussian(const Matrix& covariance, std::size_t R, std::uint64_t seed);

/// Frequency of each box over the rows of points.
[[nodiscard]] std::vector<double> box_frequencies(const RectFamily& family, const Matrix& points);

/**
 * max over the family of |P̂(S_n ∈ A) − P̂(G ∈ A)|, G ∼ N(0, Ξ analytic).
 * se = 2√(0.25/R).
 */
[[nodiscard]] RhoEstimate empirical_rho(const DgpSpec& spec, std::size_t n, const RectFamily& family,
                                        std::size_t R, std::uint64_t seed);

struct BootstrapRhoOptions {
    std::size_t R = 2000;        ///< draws of S_n
    std::size_t datasets = 100;  ///< data sets, each with its own bootstrap
    std::size_t B = 1000;        ///< bootstrap draws per data set
};

/**
 * For each data set, P̂(Ĝ ∈ A | 𝒳_n) from B draws; the discrepancy to P̂(S ∈ A)
 * is averaged over data sets and the sup over A is reported.
 * se = 2√(0.25/R + 0.25/B).
 */
[[nodiscard]] RhoEstimate bootstrap_rho(const DgpSpec& spec, std::size_t n, const RectFamily& family,
                                        const BootstrapRhoOptions& options, std::uint64_t seed);

struct DeltaSummary {
    double median = 0.0;
    double lower_quartile = 0.0;
    double upper_quartile = 0.0;
    std::vector<double> values;
};

/// |Ξ̂_n − Ξ|_∞ for one data set; plug-in bandwidth unless one is given.
[[nodiscard]] double delta_for_series(const SeriesMatrix& series, const Matrix& xi,
                                      std::optional<double> bandwidth = {});

[[nodiscard]] DeltaSummary delta_nr(const DgpSpec& spec, std::size_t n, std::size_t reps, std::uint64_t seed);

struct RateRow {
    std::size_t n = 0;
    std::size_t p = 0;
    std::string framework;
    std::string metric;
    double value = 0.0;
    double se = 0.0;
    std::size_t reps = 0;
    std::uint64_t seed = 0;
};

using RateTable = std::vector<RateRow>;

/// empirical_rho over specs × n_list; cell i uses seed derive(seed, i).
[[nodiscard]] RateTable rate_sweep(std::span<const DgpSpec> specs, std::span<const std::size_t> n_list,
                                   std::size_t p, const RectFamily::Options& family, std::size_t R,
                                   std::uint64_t seed);

/// Columns n,p,framework,metric,value,se,reps,seed.
void write_rate_table(const std::filesystem::path& path, const RateTable& table);
[[nodiscard]] std::string format_rate_table(const RateTable& table);

}  // namespace hdclt
