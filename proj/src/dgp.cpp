#include "hdclt/dgp.hpp"

#include "hdclt/error.hpp"
#include "hdclt/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hdclt {

double InnovationSampler::operator()(Stream& stream) {
    switch (innovation_) {
        case Innovation::gaussian: return normal_(stream);
        case Innovation::uniform: return uniform_(stream);
        case Innovation::exponential: return exponential_(stream) - 1.0;
    }
    return 0.0;
}

DgpSpec DgpSpec::iid(std::size_t p, Innovation innovation) { return moving_average(p, {1.0}, innovation); }

DgpSpec DgpSpec::moving_average(std::size_t p, std::vector<double> coeffs, Innovation innovation) {
    DgpSpec spec;
    spec.kind = DgpKind::ma_q;
    spec.innovation = innovation;
    spec.p = p;
    spec.ma_coeffs = std::move(coeffs);
    spec.validate();
    return spec;
}

DgpSpec DgpSpec::causal(std::size_t p, double beta, std::optional<std::size_t> truncation, Innovation innovation) {
    DgpSpec spec;
    spec.kind = DgpKind::causal_linear;
    spec.innovation = innovation;
    spec.p = p;
    spec.beta = beta;
    spec.truncation = truncation;
    spec.ma_coeffs.clear();
    spec.validate();
    return spec;
}

DgpSpec DgpSpec::var(Matrix a, Innovation innovation) {
    DgpSpec spec;
    spec.kind = DgpKind::var1;
    spec.innovation = innovation;
    spec.p = static_cast<std::size_t>(a.rows());
    spec.var_matrix = std::move(a);
    spec.ma_coeffs.clear();
    spec.validate();
    return spec;
}

void DgpSpec::validate() const {
    if (p < 1) throw std::invalid_argument("dgp: p must be positive");
    switch (kind) {
        case DgpKind::ma_q:
            if (ma_coeffs.empty()) throw std::invalid_argument("dgp: ma_q needs at least c_0");
            for (double c : ma_coeffs)
                if (!std::isfinite(c)) throw std::invalid_argument("dgp: ma_q coefficients must be finite");
            break;
        case DgpKind::causal_linear:
            if (!(beta > 1.0) || !std::isfinite(beta)) throw std::invalid_argument("dgp: causal_linear needs beta > 1");
            break;
        case DgpKind::var1: {
            if (var_matrix.rows() != static_cast<Eigen::Index>(p) || var_matrix.cols() != static_cast<Eigen::Index>(p))
                throw std::invalid_argument("dgp: var1 matrix must be p x p");
            if (!var_matrix.allFinite()) throw std::invalid_argument("dgp: var1 matrix must be finite");
            const double radius = var_matrix.eigenvalues().cwiseAbs().maxCoeff();
            if (!(radius < 1.0))
                throw std::invalid_argument("dgp: var1 spectral radius " + std::to_string(radius) + " is not below 1");
            break;
        }
    }
}

std::size_t truncation_lag(double beta) {
    // (L+1)^{-β} < 1e-10  ⇔  L + 1 > 1e10^{1/β}
    auto lag = static_cast<std::size_t>(std::floor(std::pow(1e10, 1.0 / beta)));
    while (lag > 0 && std::pow(static_cast<double>(lag), -beta) < 1e-10) --lag;
    while (std::pow(static_cast<double>(lag + 1), -beta) >= 1e-10) ++lag;
    return lag;
}

std::vector<double> DgpSpec::filter() const {
    switch (kind) {
        case DgpKind::ma_q: return ma_coeffs;
        case DgpKind::causal_linear: {
            const std::size_t lag = truncation.value_or(truncation_lag(beta));
            std::vector<double> c(lag + 1);
            for (std::size_t l = 0; l <= lag; ++l) c[l] = std::pow(static_cast<double>(l + 1), -beta);
            return c;
        }
        case DgpKind::var1: break;
    }
    throw UnsupportedError("dgp: var1 has no finite filter representation");
}

std::size_t DgpSpec::dependence_range() const {
    switch (kind) {
        case DgpKind::ma_q: return ma_coeffs.size() - 1;
        case DgpKind::causal_linear: return truncation.value_or(truncation_lag(beta));
        case DgpKind::var1: break;
    }
    throw UnsupportedError("dgp: var1 is not m-dependent");
}

std::optional<double> DgpSpec::physical_alpha() const {
    if (kind == DgpKind::causal_linear) return beta - 1.0;
    return std::nullopt;
}

std::string to_string(DgpKind kind) {
    switch (kind) {
        case DgpKind::ma_q: return "ma_q";
        case DgpKind::var1: return "var1";
        case DgpKind::causal_linear: return "causal_linear";
    }
    return "?";
}

std::string to_string(Innovation innovation) {
    switch (innovation) {
        case Innovation::gaussian: return "gaussian";
        case Innovation::uniform: return "uniform";
        case Innovation::exponential: return "exponential";
    }
    return "?";
}

std::string DgpSpec::label() const {
    std::string out = to_string(kind);
    switch (kind) {
        case DgpKind::ma_q: out += "(m=" + std::to_string(ma_coeffs.size() - 1) + ")"; break;
        case DgpKind::causal_linear: {
            char buf[64];
            std::snprintf(buf, sizeof buf, "(beta=%g)", beta);
            out += buf;
            break;
        }
        case DgpKind::var1: break;
    }
    return out + "/" + to_string(innovation);
}

namespace {

double operator_norm(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
}

constexpr std::size_t kMaxPowerSteps = 1000000;

}  // namespace

std::size_t var_burn_in(const Matrix& a) {
    // ‖A^k‖₂ instead of ‖A‖₂^k: the latter never decays when A is not normal
    // and ‖A‖₂ ≥ 1 although the spectral radius is below 1.
    Matrix power = Matrix::Identity(a.rows(), a.cols());
    std::size_t k = 0;
    while (operator_norm(power) >= 1e-12) {
        power = power * a;
        if (++k > kMaxPowerSteps) throw NumericalError("var1: A^k does not decay");
    }
    return 200 + k;
}

nlohmann::json to_json(const DgpSpec& spec) {
    nlohmann::json j;
    j["schema_version"] = kDgpSchemaVersion;
    j["kind"] = to_string(spec.kind);
    j["innovation"] = to_string(spec.innovation);
    j["p"] = spec.p;
    switch (spec.kind) {
        case DgpKind::ma_q: j["ma_coeffs"] = spec.ma_coeffs; break;
        case DgpKind::causal_linear:
            j["beta"] = spec.beta;
            if (spec.truncation) j["truncation"] = *spec.truncation;
            break;
        case DgpKind::var1: {
            auto rows = nlohmann::json::array();
            for (Eigen::Index r = 0; r < spec.var_matrix.rows(); ++r) {
                std::vector<double> row;
                for (Eigen::Index c = 0; c < spec.var_matrix.cols(); ++c) row.push_back(spec.var_matrix(r, c));
                rows.push_back(row);
            }
            j["var_matrix"] = rows;
            break;
        }
    }
    nlohmann::json meta = nlohmann::json::object();
    if (spec.mixing_alpha) meta["mixing_alpha"] = *spec.mixing_alpha;
    if (!spec.moment_bound_tag.empty()) meta["moment_bound"] = spec.moment_bound_tag;
    if (spec.kind != DgpKind::var1) meta["dependence_range"] = spec.dependence_range();
    if (auto a = spec.physical_alpha()) meta["physical_alpha"] = *a;
    j["metadata"] = meta;
    return j;
}

DgpSpec dgp_from_json(const nlohmann::json& j) {
    const int version = j.value("schema_version", 0);
    if (version != kDgpSchemaVersion)
        throw FormatError("dgp config: unsupported schema_version " + std::to_string(version));

    DgpSpec spec;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "ma_q") spec.kind = DgpKind::ma_q;
    else if (kind == "var1") spec.kind = DgpKind::var1;
    else if (kind == "causal_linear") spec.kind = DgpKind::causal_linear;
    else throw FormatError("dgp config: unknown kind '" + kind + "'");

    const auto innovation = j.value("innovation", std::string("gaussian"));
    if (innovation == "gaussian") spec.innovation = Innovation::gaussian;
    else if (innovation == "uniform") spec.innovation = Innovation::uniform;
    else if (innovation == "exponential") spec.innovation = Innovation::exponential;
    else throw FormatError("dgp config: unknown innovation '" + innovation + "'");

    switch (spec.kind) {
        case DgpKind::ma_q:
            spec.p = j.at("p").get<std::size_t>();
            spec.ma_coeffs = j.at("ma_coeffs").get<std::vector<double>>();
            break;
        case DgpKind::causal_linear:
            spec.p = j.at("p").get<std::size_t>();
            spec.beta = j.at("beta").get<double>();
            spec.ma_coeffs.clear();
            if (j.contains("truncation") && !j["truncation"].is_null())
                spec.truncation = j["truncation"].get<std::size_t>();
            break;
        case DgpKind::var1: {
            const auto rows = j.at("var_matrix").get<std::vector<std::vector<double>>>();
            spec.p = rows.size();
            spec.var_matrix.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.size()));
            for (std::size_t r = 0; r < rows.size(); ++r) {
                if (rows[r].size() != rows.size()) throw FormatError("dgp config: var_matrix must be square");
                for (std::size_t c = 0; c < rows.size(); ++c)
                    spec.var_matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
            }
            spec.ma_coeffs.clear();
            if (j.contains("p") && j["p"].get<std::size_t>() != spec.p)
                throw FormatError("dgp config: p does not match var_matrix");
            break;
        }
    }
    if (j.contains("metadata")) {
        const auto& meta = j["metadata"];
        if (meta.contains("mixing_alpha")) spec.mixing_alpha = meta["mixing_alpha"].get<double>();
        spec.moment_bound_tag = meta.value("moment_bound", std::string());
    }
    spec.validate();
    return spec;
}

namespace {

/// (n + L)×p innovations for time indices 1−L..n, drawn row by row.
Matrix draw_innovations(Innovation law, std::size_t rows, std::size_t p, Stream& stream) {
    InnovationSampler sampler(law);
    Matrix e(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
    for (Eigen::Index t = 0; t < e.rows(); ++t)
        for (Eigen::Index j = 0; j < e.cols(); ++j) e(t, j) = sampler(stream);
    return e;
}

Matrix apply_filter(const std::vector<double>& c, const Matrix& e, std::size_t n) {
    const auto lag = static_cast<Eigen::Index>(c.size() - 1);
    const auto rows = static_cast<Eigen::Index>(n);
    Matrix x = Matrix::Zero(rows, e.cols());
    for (Eigen::Index l = 0; l <= lag; ++l) x.noalias() += c[static_cast<std::size_t>(l)] * e.middleRows(lag - l, rows);
    return x;
}

}  // namespace

SeriesMatrix generate(const DgpSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("generate: n must be at least 2");
    spec.validate();
    Stream stream(derive(seed, 0));

    if (spec.kind == DgpKind::var1) {
        const std::size_t burn = var_burn_in(spec.var_matrix);
        const Matrix e = draw_innovations(spec.innovation, burn + n, spec.p, stream);
        Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.p));
        Vector state = Vector::Zero(static_cast<Eigen::Index>(spec.p));
        for (std::size_t t = 0; t < burn + n; ++t) {
            state = spec.var_matrix * state + e.row(static_cast<Eigen::Index>(t)).transpose();
            if (t >= burn) x.row(static_cast<Eigen::Index>(t - burn)) = state.transpose();
        }
        return SeriesMatrix(std::move(x));
    }

    const auto c = spec.filter();
    const Matrix e = draw_innovations(spec.innovation, n + c.size() - 1, spec.p, stream);
    return SeriesMatrix(apply_filter(c, e, n));
}

CoupledPair generate_coupled(const DgpSpec& spec, std::size_t n, std::size_t m, std::uint64_t seed) {
    if (spec.kind == DgpKind::var1)
        throw UnsupportedError("generate_coupled: var1 has no per-lag innovation representation");
    if (n < 2) throw std::invalid_argument("generate_coupled: n must be at least 2");
    if (m >= n) throw std::invalid_argument("generate_coupled: coupling lag must be below n");
    spec.validate();

    const auto c = spec.filter();
    const std::size_t lag = c.size() - 1;
    Stream stream(derive(seed, 0));
    const Matrix e = draw_innovations(spec.innovation, n + lag, spec.p, stream);
    Matrix x = apply_filter(c, e, n);
    Matrix x_prime = x;

    if (m <= lag) {
        Stream copies(derive(seed, 1));
        const Matrix e_copy = draw_innovations(spec.innovation, n, spec.p, copies);
        for (std::size_t t = 0; t < n; ++t) {
            for (std::size_t j = 0; j < spec.p; ++j) {
                double acc = 0.0;
                for (std::size_t l = 0; l <= lag; ++l) {
                    const double eps = l == m ? e_copy(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j))
                                              : e(static_cast<Eigen::Index>(t + lag - l), static_cast<Eigen::Index>(j));
                    acc += c[l] * eps;
                }
                x_prime(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = acc;
            }
        }
    }
    return CoupledPair{SeriesMatrix(std::move(x)), SeriesMatrix(std::move(x_prime)), m};
}

ThetaEstimate estimate_theta(const DgpSpec& spec, std::size_t m, double q, std::size_t reps, std::uint64_t seed) {
    if (spec.kind == DgpKind::var1)
        throw UnsupportedError("estimate_theta: var1 has no per-lag innovation representation");
    if (reps < 100) throw std::invalid_argument("estimate_theta: reps must be at least 100");
    if (!(q >= 1.0)) throw std::invalid_argument("estimate_theta: q must be at least 1");
    spec.validate();

    const auto c = spec.filter();
    const std::size_t lag = c.size() - 1;
    const std::size_t p = spec.p;
    ThetaEstimate out;
    out.reps = reps;
    out.theta.assign(p, 0.0);
    out.se.assign(p, 0.0);
    if (m > lag) return out;  // X'_{t,{m}} = X_t

    // |X_{t,j} − X'_{t,j,{m}}|^q per replicate and coordinate.
    std::vector<double> powers(reps * p);
    parallel_for(reps, [&](std::size_t r) {
        Stream stream(derive(seed, r));
        InnovationSampler sampler(spec.innovation);
        std::vector<double> window(lag + 1);
        for (std::size_t j = 0; j < p; ++j) {
            for (auto& w : window) w = sampler(stream);
            const double replacement = sampler(stream);
            double x = 0.0;
            double x_prime = 0.0;
            for (std::size_t l = 0; l <= lag; ++l) {
                x += c[l] * window[l];
                x_prime += c[l] * (l == m ? replacement : window[l]);
            }
            powers[r * p + j] = std::pow(std::abs(x - x_prime), q);
        }
    });

    for (std::size_t j = 0; j < p; ++j) {
        double sum = 0.0;
        for (std::size_t r = 0; r < reps; ++r) sum += powers[r * p + j];
        const double mean = sum / static_cast<double>(reps);
        double ss = 0.0;
        for (std::size_t r = 0; r < reps; ++r) ss += (powers[r * p + j] - mean) * (powers[r * p + j] - mean);
        const double sd = std::sqrt(ss / static_cast<double>(reps - 1));
        out.theta[j] = std::pow(mean, 1.0 / q);
        out.se[j] = mean > 0.0 ? std::pow(mean, 1.0 / q - 1.0) / q * sd / std::sqrt(static_cast<double>(reps)) : 0.0;
    }
    return out;
}

namespace {

double linear_autocov(const std::vector<double>& c, std::size_t k) {
    double acc = 0.0;
    for (std::size_t l = 0; l + k < c.size(); ++l) acc += c[l] * c[l + k];
    return acc;
}

constexpr double kPowerTolerance = 1e-12;

Matrix var_gamma0(const Matrix& a) {
    Matrix gamma = Matrix::Zero(a.rows(), a.cols());
    Matrix power = Matrix::Identity(a.rows(), a.cols());
    std::size_t k = 0;
    while (power.norm() >= kPowerTolerance) {
        gamma.noalias() += power * power.transpose();
        power = power * a;
        if (++k > kMaxPowerSteps) throw NumericalError("var1: A^k does not decay");
    }
    return gamma;
}

}  // namespace

Matrix analytic_autocov(const DgpSpec& spec, std::size_t k) {
    spec.validate();
    const auto p = static_cast<Eigen::Index>(spec.p);
    if (spec.kind == DgpKind::var1) {
        Matrix power = Matrix::Identity(p, p);
        for (std::size_t i = 0; i < k; ++i) power = power * spec.var_matrix;
        return power * var_gamma0(spec.var_matrix);
    }
    return linear_autocov(spec.filter(), k) * Matrix::Identity(p, p);
}

Matrix analytic_longrun_cov(const DgpSpec& spec, std::size_t n) {
    spec.validate();
    if (n < 1) throw std::invalid_argument("analytic_longrun_cov: n must be positive");
    const auto p = static_cast<Eigen::Index>(spec.p);
    const double nn = static_cast<double>(n);

    if (spec.kind == DgpKind::var1) {
        const Matrix gamma0 = var_gamma0(spec.var_matrix);
        Matrix xi = gamma0;
        Matrix power = spec.var_matrix;
        for (std::size_t k = 1; k < n && power.norm() >= kPowerTolerance; ++k) {
            const Matrix gk = power * gamma0;
            xi += (1.0 - static_cast<double>(k) / nn) * (gk + gk.transpose());
            power = power * spec.var_matrix;
        }
        return 0.5 * (xi + xi.transpose());
    }

    const auto c = spec.filter();
    double xi = linear_autocov(c, 0);
    for (std::size_t k = 1; k < std::min(n, c.size()); ++k)
        xi += 2.0 * (1.0 - static_cast<double>(k) / nn) * linear_autocov(c, k);
    return xi * Matrix::Identity(p, p);
}

}  // namespace hdclt
