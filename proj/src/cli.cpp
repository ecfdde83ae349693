#include "hdclt/cli.hpp"

#include "hdclt/bootstrap.hpp"
#include "hdclt/dgp.hpp"
#include "hdclt/error.hpp"
#include "hdclt/gaussapprox.hpp"
#include "hdclt/lrcov.hpp"
#include "hdclt/parallel.hpp"
#include "hdclt/rng.hpp"
#include "hdclt/series.hpp"
#include "hdclt/stats.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdclt::cli {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config;
    std::size_t threads = 0;
    std::string out;
    std::uint64_t seed = 0;
    bool allow_small_b = false;

    std::string input;
    std::size_t s = 1;
    std::vector<double> weights;
    double delta = 0.05;
    std::size_t B = 1000;
    std::optional<double> bandwidth;

    std::size_t K = 1;
    std::string index_set = "diag";
    std::optional<double> lambda;
    std::string truncation = "negligible";

    std::string spec;
    std::string kind = "ma_q";
    std::string innovation = "gaussian";
    std::size_t p = 1;
    std::vector<double> coeffs{1.0};
    double beta = 2.0;
    std::optional<std::size_t> max_lag;
    std::size_t n = 0;

    std::vector<std::size_t> n_list;
    std::optional<std::size_t> rates_p;
    std::size_t rates_reps = 2000;
    std::size_t grid = 41;
    std::size_t random_boxes = 200;
    bool orthants = false;

    std::size_t coverage_n = 400;
    std::size_t d = 10;
    std::size_t coverage_reps = 1000;
};

std::string fixed(double value, int digits = 6) {
    std::ostringstream os;
    os.precision(digits);
    os << value;
    return os.str();
}

json optional_json(const std::optional<double>& value) { return value ? json(*value) : json(); }

// Appends "--key value" for every config entry whose flag is absent from args.
std::vector<std::string> inject_config(std::vector<std::string> args) {
    std::optional<std::string> path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
    }
    if (!path) return args;

    std::ifstream in(*path);
    if (!in) throw FormatError("cannot read config " + *path);
    json config;
    try {
        config = json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError("config " + *path + ": " + e.what());
    }
    if (!config.is_object()) throw FormatError("config " + *path + ": expected a JSON object");

    for (const auto& [key, value] : config.items()) {
        std::string flag = "--" + key;
        std::replace(flag.begin() + 2, flag.end(), '_', '-');
        if (flag == "--config") throw FormatError("config files cannot nest --config");
        const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
        if (given || value.is_null()) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
            continue;
        }
        std::string text;
        if (value.is_array()) {
            for (std::size_t i = 0; i < value.size(); ++i)
                text += (i ? "," : "") + (value[i].is_string() ? value[i].get<std::string>() : value[i].dump());
        } else {
            text = value.is_string() ? value.get<std::string>() : value.dump();
        }
        args.push_back(flag);
        args.push_back(text);
    }
    return args;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream file(path);
    if (!file) throw FormatError("cannot write " + path);
    file << text;
    if (!file) throw FormatError("write failed: " + path);
}

void emit_json(const json& report, const Options& o, std::ostream& out) {
    const std::string text = report.dump(2) + "\n";
    if (o.out.empty()) out << text;
    else write_text(o.out, text);
}

void emit_csv(const Matrix& values, const std::vector<std::string>& header, const Options& o, std::ostream& out) {
    if (o.out.empty()) {
        write_csv(out, values, header);
    } else {
        write_csv(o.out, values, header);
    }
}

void check_test_options(const Options& o) {
    if (!(o.delta > 0.0 && o.delta < 1.0)) throw UsageError("--delta must lie in (0,1)");
    if (o.B < 100 && !o.allow_small_b) throw UsageError("--B below 100 needs --allow-small-b");
    if (o.B < 1) throw UsageError("--B must be positive");
    if (o.s < 1) throw UsageError("--s must be at least 1");
    if (!o.weights.empty() && o.weights.size() != o.s) throw UsageError("--weights needs exactly s entries");
}

TestConfig test_config(const Options& o, const std::string& procedure) {
    TestConfig config;
    config.procedure = procedure;
    config.s = o.s;
    config.weights = o.weights;
    config.delta = o.delta;
    config.B = o.B;
    config.seed = o.seed;
    config.bandwidth = o.bandwidth;
    return config;
}

json test_run_config(const std::string& command, const Options& o) {
    return json{{"command", command},        {"input", o.input},
                {"s", o.s},                  {"weights", o.weights},
                {"delta", o.delta},          {"B", o.B},
                {"seed", o.seed},            {"bandwidth", optional_json(o.bandwidth)},
                {"allow_small_b", o.allow_small_b}};
}

Innovation parse_innovation(const std::string& name) {
    if (name == "gaussian") return Innovation::gaussian;
    if (name == "uniform") return Innovation::uniform;
    if (name == "exponential") return Innovation::exponential;
    throw UsageError("unknown innovation '" + name + "'");
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError(path + ": " + e.what());
    }
}

DgpSpec spec_from_options(const Options& o) {
    if (!o.spec.empty()) return dgp_from_json(read_json_file(o.spec));
    const Innovation innovation = parse_innovation(o.innovation);
    if (o.kind == "ma_q") return DgpSpec::moving_average(o.p, o.coeffs, innovation);
    if (o.kind == "causal_linear") return DgpSpec::causal(o.p, o.beta, o.max_lag, innovation);
    if (o.kind == "var1") throw UsageError("var1 needs a --spec file with var_matrix");
    throw UsageError("unknown --kind '" + o.kind + "'");
}

std::vector<DgpSpec> specs_from_file(const std::string& path) {
    const json j = read_json_file(path);
    const json& list = j.is_object() && j.contains("specs") ? j["specs"] : j;
    std::vector<DgpSpec> specs;
    if (list.is_array()) {
        for (const auto& item : list) specs.push_back(dgp_from_json(item));
    } else {
        specs.push_back(dgp_from_json(list));
    }
    if (specs.empty()) throw FormatError(path + ": no specs");
    return specs;
}

std::vector<IndexPair> parse_index_set(const std::string& text, std::size_t d) {
    if (text == "diag") return diagonal_indices(d);
    std::vector<IndexPair> out;
    std::stringstream items(text);
    std::string item;
    while (std::getline(items, item, ',')) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) throw UsageError("index pair '" + item + "' must look like a-b");
        try {
            std::size_t used = 0;
            const auto a = std::stoul(item.substr(0, dash), &used);
            if (used != dash) throw UsageError("bad index pair '" + item + "'");
            const auto rest = item.substr(dash + 1);
            const auto b = std::stoul(rest, &used);
            if (used != rest.size()) throw UsageError("bad index pair '" + item + "'");
            out.emplace_back(a, b);
        } catch (const std::logic_error&) {
            throw UsageError("bad index pair '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError("empty --index-set");
    return out;
}

json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c) row[static_cast<std::size_t>(c)] = m(r, c);
        rows.push_back(row);
    }
    return rows;
}

std::string decision_summary(const std::string& name, const TestReport& report) {
    return name + ": T=" + fixed(report.statistic) + " q=" + fixed(report.critical_value) +
           " p-value=" + fixed(report.p_value, 4) + " b_n=" + fixed(report.bandwidth, 5) +
           (report.reject ? " reject" : " do not reject");
}

// ---------------------------------------------------------------------------

int cmd_gen(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.n < 2) throw UsageError("--n must be at least 2");
    const DgpSpec spec = spec_from_options(o);
    const SeriesMatrix x = generate(spec, o.n, o.seed);
    emit_csv(x.values(), default_header(x.p()), o, out);
    if (!o.out.empty()) {
        const json sidecar{{"schema_version", 1}, {"command", "gen"}, {"dgp", to_json(spec)},
                           {"n", o.n},            {"seed", o.seed},   {"fingerprint", x.fingerprint()}};
        write_text(o.out + ".json", sidecar.dump(2) + "\n");
    }
    err << "gen: " << x.n() << "x" << x.p() << " " << spec.label() << " seed=" << o.seed << "\n";
    return kExitOk;
}

int cmd_bandwidth(const Options& o, std::ostream& out, std::ostream& err) {
    const SeriesMatrix x = load_csv(o.input);
    std::vector<Ar1Fit> fits;
    json columns = json::array();
    for (std::size_t j = 0; j < x.p(); ++j) {
        const Vector col = x.values().col(static_cast<Eigen::Index>(j));
        fits.push_back(fit_ar1(std::span<const double>(col.data(), x.n())));
        columns.push_back({{"rho", fits.back().rho}, {"sigma2", fits.back().sigma2}});
    }
    const double b = andrews_bandwidth(fits, x.n());
    const json report{{"schema_version", 1}, {"command", "bandwidth"}, {"bandwidth", b},
                      {"n", x.n()},          {"p", x.p()},             {"ar1", columns},
                      {"run_config", {{"command", "bandwidth"}, {"input", o.input}}}};
    emit_json(report, o, out);
    err << "bandwidth: b_n=" << fixed(b, 10) << "\n";
    return kExitOk;
}

int cmd_lrcov(const Options& o, std::ostream& out, std::ostream& err) {
    const CsvTable table = read_csv(o.input);
    const SeriesMatrix& x = table.data;
    LagTruncation truncation;
    if (o.truncation == "negligible") truncation = LagTruncation::negligible;
    else if (o.truncation == "none") truncation = LagTruncation::none;
    else throw UsageError("--truncation must be negligible or none");
    const double b = o.bandwidth.value_or(andrews_bandwidth(x));
    const LrcMatrix estimate = lrcov_estimate(x, KernelSpec::quadratic_spectral(b), truncation);
    emit_csv(estimate.values, table.header, o, out);
    if (!o.out.empty()) {
        const json sidecar{{"schema_version", 1},
                           {"command", "lrcov"},
                           {"kernel", estimate.kernel},
                           {"bandwidth", b},
                           {"n", x.n()},
                           {"p", x.p()},
                           {"fingerprint", x.fingerprint()},
                           {"run_config",
                            {{"command", "lrcov"},
                             {"input", o.input},
                             {"bandwidth", optional_json(o.bandwidth)},
                             {"truncation", o.truncation}}}};
        write_text(o.out + ".json", sidecar.dump(2) + "\n");
    }
    err << "lrcov: " << x.p() << "x" << x.p() << " estimate, b_n=" << fixed(b, 6) << "\n";
    return kExitOk;
}

int cmd_test_mean(const Options& o, std::ostream& out, std::ostream& err) {
    check_test_options(o);
    const SeriesMatrix x = load_csv(o.input);
    const TestReport report = mean_test(x, test_config(o, "mean"));
    json j = to_json(report);
    j["run_config"] = test_run_config("test-mean", o);
    emit_json(j, o, out);
    err << decision_summary("test-mean", report) << "\n";
    return kExitOk;
}

int cmd_test_whitenoise(const Options& o, std::ostream& out, std::ostream& err) {
    check_test_options(o);
    if (o.K < 1) throw UsageError("--K must be at least 1");
    const SeriesMatrix eps = load_csv(o.input);
    const TestReport report = whitenoise_test(eps, o.K, test_config(o, "whitenoise"));
    json j = to_json(report);
    j["run_config"] = test_run_config("test-whitenoise", o);
    j["run_config"]["K"] = o.K;
    emit_json(j, o, out);
    err << decision_summary("test-whitenoise", report) << "\n";
    return kExitOk;
}

int cmd_changepoint(const Options& o, std::ostream& out, std::ostream& err) {
    check_test_options(o);
    const SeriesMatrix x = load_csv(o.input);
    const TestReport report = changepoint_test(x, test_config(o, "changepoint"));
    json j = to_json(report);
    j["run_config"] = test_run_config("changepoint", o);
    emit_json(j, o, out);
    err << decision_summary("changepoint", report) << "\n";
    return kExitOk;
}

int cmd_confregion(const Options& o, std::ostream& out, std::ostream& err) {
    check_test_options(o);
    const SeriesMatrix y = load_csv(o.input);
    const auto index_set = parse_index_set(o.index_set, y.p());
    const ConfRegion region = cov_confidence_region(y, index_set, test_config(o, "confregion"));
    json j = to_json(region);
    j["run_config"] = test_run_config("confregion", o);
    j["run_config"]["index_set"] = o.index_set;
    emit_json(j, o, out);
    err << "confregion: |S|=" << index_set.size() << " radius=" << fixed(region.radius)
        << " b_n=" << fixed(region.bandwidth, 5) << "\n";
    return kExitOk;
}

int cmd_precision(const Options& o, std::ostream& out, std::ostream& err) {
    const SeriesMatrix y = load_csv(o.input);
    std::vector<double> lambdas;
    if (o.lambda) {
        if (!(*o.lambda >= 0.0)) throw UsageError("--lambda must be nonnegative");
        lambdas.assign(y.p(), *o.lambda);
    } else {
        lambdas = default_lambdas(y);
    }
    const PrecisionEstimate est = precision_estimate(y, lambdas);
    std::vector<bool> converged(est.converged.begin(), est.converged.end());
    const json report{{"schema_version", 1},
                      {"command", "precision"},
                      {"n", y.n()},
                      {"d", y.p()},
                      {"lambdas", lambdas},
                      {"omega", matrix_json(est.omega)},
                      {"v", matrix_json(est.v)},
                      {"beta", matrix_json(est.beta)},
                      {"converged", converged},
                      {"near_singular", est.near_singular},
                      {"run_config", {{"command", "precision"}, {"input", o.input}, {"lambda", optional_json(o.lambda)}}}};
    emit_json(report, o, out);
    const auto unconverged = std::count(converged.begin(), converged.end(), false);
    err << "precision: d=" << y.p() << " unconverged nodes=" << unconverged
        << (est.near_singular ? " (near-singular sample correlation)" : "") << "\n";
    return kExitOk;
}

int cmd_rates(const Options& o, std::ostream& out, std::ostream& err) {
    if (o.n_list.empty()) throw UsageError("--n needs at least one sample size");
    if (o.rates_reps < 1) throw UsageError("--reps must be positive");
    const std::vector<DgpSpec> specs = specs_from_file(o.spec);
    const std::size_t p = o.rates_p.value_or(specs.front().p);
    RectFamily::Options family;
    family.grid = o.grid;
    family.random_boxes = o.random_boxes;
    family.include_orthants = o.orthants;
    family.seed = o.seed;
    const RateTable table = rate_sweep(specs, o.n_list, p, family, o.rates_reps, o.seed);
    const std::string text = format_rate_table(table);
    if (o.out.empty()) out << text;
    else write_text(o.out, text);
    err << "rates: " << table.size() << " rows, R=" << o.rates_reps << " seed=" << o.seed << "\n";
    return kExitOk;
}

int cmd_coverage(const Options& o, std::ostream& out, std::ostream& err) {
    check_test_options(o);
    if (o.coverage_reps < 1) throw UsageError("--reps must be positive");
    DgpSpec spec = o.spec.empty() ? DgpSpec::iid(o.d) : dgp_from_json(read_json_file(o.spec));
    const Vector truth = analytic_autocov(spec, 0).diagonal();
    const auto index_set = diagonal_indices(spec.p);
    const TestConfig base = test_config(o, "confregion");

    std::vector<char> covered(o.coverage_reps, 0);
    parallel_for(o.coverage_reps, [&](std::size_t r) {
        const SeriesMatrix y = generate(spec, o.coverage_n, derive(derive(o.seed, 0), r));
        TestConfig config = base;
        config.seed = derive(derive(o.seed, 1), r);
        const ConfRegion region = cov_confidence_region(y, index_set, config);
        covered[r] = region.contains(std::span<const double>(truth.data(), spec.p));
    });
    const auto hits = static_cast<std::size_t>(std::count(covered.begin(), covered.end(), 1));
    const double rate = static_cast<double>(hits) / static_cast<double>(o.coverage_reps);

    json run_config = test_run_config("coverage", o);
    run_config.erase("input");
    run_config["n"] = o.coverage_n;
    run_config["reps"] = o.coverage_reps;
    run_config["spec"] = o.spec;
    run_config["d"] = spec.p;
    const json report{{"schema_version", 1},
                      {"command", "coverage"},
                      {"dgp", to_json(spec)},
                      {"coverage", rate},
                      {"se", std::sqrt(rate * (1.0 - rate) / static_cast<double>(o.coverage_reps))},
                      {"covered", hits},
                      {"reps", o.coverage_reps},
                      {"nominal", 1.0 - o.delta},
                      {"run_config", run_config}};
    emit_json(report, o, out);
    err << "coverage: " << fixed(rate, 4) << " (" << hits << "/" << o.coverage_reps << ", nominal "
        << fixed(1.0 - o.delta, 4) << ")\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--threads", o.threads, "Worker threads (0: HDCLT_THREADS or hardware)");
    sub->add_option("--config", o.config, "JSON object of flag values; explicit flags win");
    sub->add_option("--out", o.out, "Output file (stdout when empty)");
}

void add_seed(CLI::App* sub, Options& o) { sub->add_option("--seed", o.seed, "Master seed"); }

void add_test_options(CLI::App* sub, Options& o) {
    sub->add_option("--input", o.input, "Wide CSV with a header row")->required();
    sub->add_option("--s", o.s, "Sparsity level of T_n(s)");
    sub->add_option("--weights", o.weights, "Positional weights a_1..a_s (comma separated)")->delimiter(',');
    sub->add_option("--delta", o.delta, "Significance level");
    sub->add_option("--B", o.B, "Bootstrap draws");
    sub->add_option("--bandwidth", o.bandwidth, "Bandwidth override (default: data-driven)");
    sub->add_flag("--allow-small-b", o.allow_small_b, "Permit B < 100");
    add_seed(sub, o);
}

void add_synthetic(CLI::App* sub, Options& o) {
    sub->add_option("--spec", o.spec, "DGP JSON file (overrides the inline flags)");
    sub->add_option("--kind", o.kind, "ma_q or causal_linear");
    sub->add_option("--innovation", o.innovation, "gaussian, uniform or exponential");
    sub->add_option("--p", o.p, "Dimension");
    sub->add_option("--coeffs", o.coeffs, "ma_q filter c_0..c_m (comma separated)")->delimiter(',');
    sub->add_option("--beta", o.beta, "causal_linear decay exponent");
    sub->add_option("--max-lag", o.max_lag, "causal_linear truncation lag L");
}

std::vector<std::string> to_vector(std::span<const std::string> args) { return {args.begin(), args.end()}; }

}  // namespace

int run(std::span<const std::string> args_in, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Inference for high-dimensional time series: long-run covariance, parametric bootstrap, "
                 "sparse max-type tests and Gaussian-approximation diagnostics.",
                 "hdclt"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "Simulate a series from a DGP and write it as CSV");
    add_synthetic(gen, o);
    gen->add_option("--n", o.n, "Series length")->required();
    add_seed(gen, o);

    auto* bandwidth = app.add_subcommand("bandwidth", "Data-driven QS bandwidth b_n");
    bandwidth->add_option("--input", o.input, "Wide CSV with a header row")->required();

    auto* lrcov = app.add_subcommand("lrcov", "QS long-run covariance estimate as a p x p CSV");
    lrcov->add_option("--input", o.input, "Wide CSV with a header row")->required();
    lrcov->add_option("--bandwidth", o.bandwidth, "Bandwidth override (default: data-driven)");
    lrcov->add_option("--truncation", o.truncation, "Lag truncation: negligible or none");

    auto* mean = app.add_subcommand("test-mean", "Sparse max-type test of a zero mean vector");
    add_test_options(mean, o);

    auto* whitenoise = app.add_subcommand("test-whitenoise", "White-noise test up to lag K");
    add_test_options(whitenoise, o);
    whitenoise->add_option("--K", o.K, "Largest lag");

    auto* changepoint = app.add_subcommand("changepoint", "CUSUM test for a single change in the mean");
    add_test_options(changepoint, o);

    auto* confregion = app.add_subcommand("confregion", "Confidence region for covariance entries");
    add_test_options(confregion, o);
    confregion->add_option("--index-set", o.index_set, "'diag' or 0-based pairs like 0-0,1-2");

    auto* precision = app.add_subcommand("precision", "Node-wise lasso precision matrix estimate");
    precision->add_option("--input", o.input, "Wide CSV with a header row")->required();
    precision->add_option("--lambda", o.lambda, "Penalty for every node (default: 2 sd_j sqrt(log d / n))");

    auto* rates = app.add_subcommand("rates", "Monte Carlo rho_n over DGP specs and sample sizes");
    rates->add_option("--spec", o.spec, "JSON file: one spec, an array, or {\"specs\": [...]}")->required();
    rates->add_option("--n", o.n_list, "Sample sizes (comma separated)")->delimiter(',')->required();
    rates->add_option("--reps", o.rates_reps, "Monte Carlo draws R per cell");
    rates->add_option("--p", o.rates_p, "Dimension (default: first spec)");
    rates->add_option("--grid", o.grid, "Levels in the max-rectangle grid");
    rates->add_option("--random-boxes", o.random_boxes, "Random rectangles in the family");
    rates->add_flag("--orthants", o.orthants, "Add lower orthants to the family");
    add_seed(rates, o);

    auto* coverage = app.add_subcommand("coverage", "Monte Carlo coverage of diagonal covariance regions");
    coverage->add_option("--spec", o.spec, "DGP JSON file (default: iid Gaussian of dimension d)");
    coverage->add_option("--d", o.d, "Dimension of the default DGP");
    coverage->add_option("--n", o.coverage_n, "Series length");
    coverage->add_option("--reps", o.coverage_reps, "Monte Carlo replicates");
    coverage->add_option("--s", o.s, "Sparsity level of the region");
    coverage->add_option("--weights", o.weights, "Positional weights a_1..a_s")->delimiter(',');
    coverage->add_option("--delta", o.delta, "One minus the nominal coverage");
    coverage->add_option("--B", o.B, "Bootstrap draws per replicate");
    coverage->add_option("--bandwidth", o.bandwidth, "Bandwidth override (default: data-driven)");
    coverage->add_flag("--allow-small-b", o.allow_small_b, "Permit B < 100");
    add_seed(coverage, o);

    for (auto* sub : app.get_subcommands({})) add_common(sub, o);

    std::vector<std::string> args;
    try {
        args = inject_config(to_vector(args_in));
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    std::vector<const char*> argv{"hdclt"};
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "error: " << e.what() << "\n\n";
        const auto parsed = app.get_subcommands();
        err << (parsed.empty() ? app.help() : parsed.front()->help());
        return kExitUsage;
    }

    if (o.threads > 0) set_thread_count(o.threads);

    try {
        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "gen") return cmd_gen(o, out, err);
        if (name == "bandwidth") return cmd_bandwidth(o, out, err);
        if (name == "lrcov") return cmd_lrcov(o, out, err);
        if (name == "test-mean") return cmd_test_mean(o, out, err);
        if (name == "test-whitenoise") return cmd_test_whitenoise(o, out, err);
        if (name == "changepoint") return cmd_changepoint(o, out, err);
        if (name == "confregion") return cmd_confregion(o, out, err);
        if (name == "precision") return cmd_precision(o, out, err);
        if (name == "rates") return cmd_rates(o, out, err);
        if (name == "coverage") return cmd_coverage(o, out, err);
        err << "error: unknown command " << name << "\n";
        return kExitUsage;
    } catch (const DegenerateError& e) {
        err << "degenerate: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const InsufficientDataError& e) {
        err << "insufficient data: " << e.what() << "\n";
        return kExitDegenerate;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}

int run(int argc, const char* const* argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    return run(args, std::cout, std::cerr);
}

}  // namespace hdclt::cli
