#include "hdclt/series.hpp"

#include "hdclt/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace hdclt {

SeriesMatrix::SeriesMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 2) {
        throw InsufficientDataError("series needs at least 2 observations, got " + std::to_string(values_.rows()));
    }
    if (values_.cols() < 1) throw std::invalid_argument("series needs at least one column");
    if (!values_.allFinite()) throw std::invalid_argument("series contains non-finite values");
}

std::string SeriesMatrix::fingerprint() const {
    // FNV-1a, 64-bit
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](const void* data, std::size_t bytes) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < bytes; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ULL;
        }
    };
    const std::uint64_t dims[2] = {n(), p()};
    feed(dims, sizeof dims);
    feed(values_.data(), sizeof(double) * static_cast<std::size_t>(values_.size()));
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

SeriesMatrix center(const SeriesMatrix& series) {
    Matrix centered = series.values().rowwise() - series.values().colwise().mean();
    return SeriesMatrix(std::move(centered));
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": missing header row");
    std::vector<std::string> header;
    for (auto& name : split_line(line)) header.push_back(trim(name));
    const std::size_t p = header.size();

    std::vector<double> data;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto cells = split_line(line);
        ++rows;
        if (cells.size() != p) {
            throw FormatError(path.string() + ": row " + std::to_string(rows) + " has " +
                              std::to_string(cells.size()) + " fields, expected " + std::to_string(p));
        }
        for (std::size_t j = 0; j < p; ++j) {
            const std::string cell = trim(cells[j]);
            double value = 0.0;
            const auto* first = cell.data();
            const auto* last = cell.data() + cell.size();
            const auto [ptr, ec] = std::from_chars(first, last, value);
            if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
                throw ParseError(rows, header[j], cell);
            }
            data.push_back(value);
        }
    }
    if (rows < 2) {
        throw InsufficientDataError(path.string() + ": need at least 2 data rows, got " + std::to_string(rows));
    }

    Matrix values(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(p));
    for (std::size_t t = 0; t < rows; ++t)
        for (std::size_t j = 0; j < p; ++j)
            values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = data[t * p + j];
    return CsvTable{std::move(header), SeriesMatrix(std::move(values))};
}

SeriesMatrix load_csv(const std::filesystem::path& path) { return read_csv(path).data; }

std::vector<std::string> default_header(std::size_t p, const std::string& prefix) {
    std::vector<std::string> header;
    header.reserve(p);
    for (std::size_t j = 0; j < p; ++j) header.push_back(prefix + std::to_string(j + 1));
    return header;
}

void write_csv(std::ostream& out, const Matrix& values, const std::vector<std::string>& header) {
    const auto names = header.empty() ? default_header(static_cast<std::size_t>(values.cols())) : header;
    if (names.size() != static_cast<std::size_t>(values.cols()))
        throw std::invalid_argument("write_csv: header size does not match the column count");
    for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
    const auto precision = out.precision(17);
    out << '\n';
    for (Eigen::Index t = 0; t < values.rows(); ++t) {
        for (Eigen::Index j = 0; j < values.cols(); ++j) out << (j ? "," : "") << values(t, j);
        out << '\n';
    }
    out.precision(precision);
}

void write_csv(const std::filesystem::path& path, const Matrix& values, const std::vector<std::string>& header) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    write_csv(out, values, header);
    if (!out) throw FormatError("write failed: " + path.string());
}

}  // namespace hdclt
