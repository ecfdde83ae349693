#include "hdclt/gaussapprox.hpp"

#include "hdclt/bootstrap.hpp"
#include "hdclt/error.hpp"
#include "hdclt/lrcov.hpp"
#include "hdclt/parallel.hpp"
#include "hdclt/rng.hpp"

#include <boost/math/distributions/normal.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace hdclt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_quantile(double prob) {
    if (prob <= 0.0) return -kInf;
    if (prob >= 1.0) return kInf;
    return boost::math::quantile(boost::math::normal(), prob);
}

Box scaled_box(std::span<const double> sd, double lower, double upper) {
    const auto p = static_cast<Eigen::Index>(sd.size());
    Box box{Vector(p), Vector(p)};
    for (Eigen::Index j = 0; j < p; ++j) {
        box.lower(j) = std::isinf(lower) ? lower : lower * sd[static_cast<std::size_t>(j)];
        box.upper(j) = std::isinf(upper) ? upper : upper * sd[static_cast<std::size_t>(j)];
    }
    return box;
}

}  // namespace

bool Box::contains(std::span<const double> x) const {
    for (std::size_t j = 0; j < x.size(); ++j) {
        const auto jj = static_cast<Eigen::Index>(j);
        if (x[j] < lower(jj) || x[j] > upper(jj)) return false;
    }
    return true;
}

RectFamily RectFamily::build(std::span<const double> sd, const Options& options) {
    if (sd.empty()) throw std::invalid_argument("RectFamily: empty scale vector");
    const double p = static_cast<double>(sd.size());
    RectFamily family;

    for (std::size_t i = 0; i < options.grid; ++i) {
        const double level = options.grid == 1
                                 ? 0.5
                                 : 0.5 + (0.999 - 0.5) * static_cast<double>(i) / static_cast<double>(options.grid - 1);
        const double u = normal_quantile(0.5 * (1.0 + std::pow(level, 1.0 / p)));
        family.kinds.push_back(Kind::max_rect);
        family.boxes.push_back(scaled_box(sd, -u, u));
        if (options.include_orthants) {
            family.kinds.push_back(Kind::orthant);
            family.boxes.push_back(scaled_box(sd, -kInf, normal_quantile(std::pow(level, 1.0 / p))));
        }
    }

    Stream stream(derive(options.seed, 0x7265637473ULL));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto dim = static_cast<Eigen::Index>(sd.size());
    for (std::size_t b = 0; b < options.random_boxes; ++b) {
        const double target = 0.1 + 0.85 * unit(stream);
        const double per_coord = std::pow(target, 1.0 / p);
        Box box{Vector(dim), Vector(dim)};
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double share = unit(stream);
            const double s = sd[static_cast<std::size_t>(j)];
            box.lower(j) = s * normal_quantile(share * (1.0 - per_coord));
            box.upper(j) = s * normal_quantile(1.0 - (1.0 - share) * (1.0 - per_coord));
        }
        family.kinds.push_back(Kind::random_rect);
        family.boxes.push_back(std::move(box));
    }
    return family;
}

RectFamily RectFamily::full_space(std::size_t p) {
    RectFamily family;
    const auto dim = static_cast<Eigen::Index>(p);
    family.kinds.push_back(Kind::full_space);
    family.boxes.push_back(Box{Vector::Constant(dim, -kInf), Vector::Constant(dim, kInf)});
    return family;
}

std::vector<std::vector<char>> RectFamily::membership(const Matrix& points) const {
    std::vector<std::vector<char>> out(static_cast<std::size_t>(points.rows()), std::vector<char>(boxes.size(), 0));
    std::vector<double> row(static_cast<std::size_t>(points.cols()));
    for (Eigen::Index r = 0; r < points.rows(); ++r) {
        for (Eigen::Index j = 0; j < points.cols(); ++j) row[static_cast<std::size_t>(j)] = points(r, j);
        for (std::size_t a = 0; a < boxes.size(); ++a) out[static_cast<std::size_t>(r)][a] = boxes[a].contains(row);
    }
    return out;
}

RectFamily::Kind rect_kind_from_string(const std::string& name) {
    if (name == "max_rect") return RectFamily::Kind::max_rect;
    if (name == "orthant") return RectFamily::Kind::orthant;
    if (name == "random_rect") return RectFamily::Kind::random_rect;
    if (name == "full_space") return RectFamily::Kind::full_space;
    throw std::invalid_argument("unknown rectangle family '" + name + "'");
}

std::string to_string(RectFamily::Kind kind) {
    switch (kind) {
        case RectFamily::Kind::max_rect: return "max_rect";
        case RectFamily::Kind::orthant: return "orthant";
        case RectFamily::Kind::random_rect: return "random_rect";
        case RectFamily::Kind::full_space: return "full_space";
    }
    return "?";
}

std::vector<double> box_frequencies(const RectFamily& family, const Matrix& points) {
    std::vector<double> freq(family.size(), 0.0);
    std::vector<double> row(static_cast<std::size_t>(points.cols()));
    for (Eigen::Index r = 0; r < points.rows(); ++r) {
        for (Eigen::Index j = 0; j < points.cols(); ++j) row[static_cast<std::size_t>(j)] = points(r, j);
        for (std::size_t a = 0; a < family.size(); ++a)
            if (family.boxes[a].contains(row)) freq[a] += 1.0;
    }
    for (auto& f : freq) f /= static_cast<double>(points.rows());
    return freq;
}

Matrix simulate_scaled_sums(const DgpSpec& spec, std::size_t n, std::size_t R, std::uint64_t seed) {
    Matrix out(static_cast<Eigen::Index>(R), static_cast<Eigen::Index>(spec.p));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    const std::uint64_t base = derive(seed, 0);
    parallel_for(R, [&](std::size_t r) {
        const SeriesMatrix x = generate(spec, n, derive(base, r));
        out.row(static_cast<Eigen::Index>(r)) = scale * x.values().colwise().sum();
    });
    return out;
}

Matrix simulate_gaussian(const Matrix& covariance, std::size_t R, std::uint64_t seed) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(covariance);
    if (solver.info() != Eigen::Success) throw NumericalError("simulate_gaussian: eigendecomposition failed");
    const Matrix root = solver.eigenvectors() * solver.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    const Eigen::Index p = covariance.rows();

    Matrix out(static_cast<Eigen::Index>(R), p);
    const std::uint64_t base = derive(seed, 1);
    parallel_for(R, [&](std::size_t r) {
        Stream stream(derive(base, r));
        std::normal_distribution<double> normal;
        Vector z(p);
        for (Eigen::Index j = 0; j < p; ++j) z(j) = normal(stream);
        out.row(static_cast<Eigen::Index>(r)) = (root * z).transpose();
    });
    return out;
}

RhoEstimate empirical_rho(const DgpSpec& spec, std::size_t n, const RectFamily& family, std::size_t R,
                          std::uint64_t seed) {
    if (R < 1) throw std::invalid_argument("empirical_rho: R must be positive");
    const Matrix xi = analytic_longrun_cov(spec, n);
    const auto s_freq = box_frequencies(family, simulate_scaled_sums(spec, n, R, seed));
    const auto g_freq = box_frequencies(family, simulate_gaussian(xi, R, seed));

    RhoEstimate out;
    out.reps = R;
    out.se = 2.0 * std::sqrt(0.25 / static_cast<double>(R));
    for (std::size_t a = 0; a < family.size(); ++a) out.rho = std::max(out.rho, std::abs(s_freq[a] - g_freq[a]));
    return out;
}

RhoEstimate bootstrap_rho(const DgpSpec& spec, std::size_t n, const RectFamily& family,
                          const BootstrapRhoOptions& options, std::uint64_t seed) {
    if (options.R < 1 || options.datasets < 1 || options.B < 1)
        throw std::invalid_argument("bootstrap_rho: R, datasets and B must be positive");
    const auto s_freq = box_frequencies(family, simulate_scaled_sums(spec, n, options.R, derive(seed, 0)));

    std::vector<std::vector<double>> discrepancy(options.datasets);
    parallel_for(options.datasets, [&](std::size_t d) {
        const SeriesMatrix x = generate(spec, n, derive(derive(seed, 2), d));
        const double bandwidth = andrews_bandwidth(x);
        const BootstrapDraws draws = sample_ghat(x, bandwidth, options.B, derive(derive(seed, 3), d));
        auto freq = box_frequencies(family, draws.draws);
        for (std::size_t a = 0; a < freq.size(); ++a) freq[a] = std::abs(freq[a] - s_freq[a]);
        discrepancy[d] = std::move(freq);
    });

    RhoEstimate out;
    out.reps = options.datasets;
    out.se = 2.0 * std::sqrt(0.25 / static_cast<double>(options.R) + 0.25 / static_cast<double>(options.B));
    for (std::size_t a = 0; a < family.size(); ++a) {
        double sum = 0.0;
        for (const auto& disc : discrepancy) sum += disc[a];
        out.rho = std::max(out.rho, sum / static_cast<double>(options.datasets));
    }
    return out;
}

double delta_for_series(const SeriesMatrix& series, const Matrix& xi, std::optional<double> bandwidth) {
    const double b = bandwidth.value_or(andrews_bandwidth(series));
    const LrcMatrix estimate = lrcov_estimate(series, KernelSpec::quadratic_spectral(b));
    return (estimate.values - xi).cwiseAbs().maxCoeff();
}

namespace {

/// Linear interpolation between order statistics (type 7).
double interpolated_quantile(std::vector<double> sorted, double level) {
    std::sort(sorted.begin(), sorted.end());
    const double pos = level * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

DeltaSummary delta_nr(const DgpSpec& spec, std::size_t n, std::size_t reps, std::uint64_t seed) {
    if (reps < 1) throw std::invalid_argument("delta_nr: reps must be positive");
    const Matrix xi = analytic_longrun_cov(spec, n);
    DeltaSummary out;
    out.values.resize(reps);
    parallel_for(reps, [&](std::size_t r) { out.values[r] = delta_for_series(generate(spec, n, derive(seed, r)), xi); });
    out.median = interpolated_quantile(out.values, 0.5);
    out.lower_quartile = interpolated_quantile(out.values, 0.25);
    out.upper_quartile = interpolated_quantile(out.values, 0.75);
    return out;
}

RateTable rate_sweep(std::span<const DgpSpec> specs, std::span<const std::size_t> n_list, std::size_t p,
                     const RectFamily::Options& family_options, std::size_t R, std::uint64_t seed) {
    RateTable table;
    std::size_t cell = 0;
    for (DgpSpec spec : specs) {
        if (spec.kind == DgpKind::var1) {
            if (spec.p != p) throw std::invalid_argument("rate_sweep: var1 dimension is fixed by its matrix");
        } else {
            spec.p = p;
        }
        for (std::size_t n : n_list) {
            const std::uint64_t cell_seed = derive(seed, cell++);
            const Vector sd = analytic_longrun_cov(spec, n).diagonal().cwiseSqrt();
            const RectFamily family =
                RectFamily::build(std::span<const double>(sd.data(), static_cast<std::size_t>(sd.size())), family_options);
            const RhoEstimate rho = empirical_rho(spec, n, family, R, cell_seed);
            table.push_back(RateRow{n, p, spec.label(), "rho", rho.rho, rho.se, R, cell_seed});
        }
    }
    return table;
}

std::string format_rate_table(const RateTable& table) {
    std::ostringstream os;
    os << "n,p,framework,metric,value,se,reps,seed\n" << std::setprecision(17);
    for (const auto& row : table)
        os << row.n << ',' << row.p << ',' << row.framework << ',' << row.metric << ',' << row.value << ',' << row.se
           << ',' << row.reps << ',' << row.seed << '\n';
    return os.str();
}

void write_rate_table(const std::filesystem::path& path, const RateTable& table) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    out << format_rate_table(table);
}

}  // namespace hdclt
