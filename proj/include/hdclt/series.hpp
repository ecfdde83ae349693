#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hdclt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/**
 * An n×p panel of observations; row t is X_t.
 *
 * Invariants (checked on construction): n ≥ 2, p ≥ 1, all entries finite.
 * Immutable after construction, so instances are safe to share across
 * threads.
 */
class SeriesMatrix {
public:
    explicit SeriesMatrix(Matrix values);

    [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    [[nodiscard]] std::size_t p() const noexcept { return static_cast<std::size_t>(values_.cols()); }
    [[nodiscard]] const Matrix& values() const noexcept { return values_; }
    [[nodiscard]] double operator()(std::size_t t, std::size_t j) const {
        return values_(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j));
    }

    /// Column means X̄.
    [[nodiscard]] Vector mean() const { return values_.colwise().mean().transpose(); }

    /// Hex digest of the dimensions and raw bytes; used as provenance.
    [[nodiscard]] std::string fingerprint() const;

private:
    Matrix values_;
};

/// Subtracts the column means. Output has the same shape as the input.
[[nodiscard]] SeriesMatrix center(const SeriesMatrix& series);

struct CsvTable {
    std::vector<std::string> header;
    SeriesMatrix data;
};

/**
 * Reads a wide CSV: one header row of column names, then one row per time
 * point. Throws FormatError on ragged rows, ParseError on non-numeric cells
 * and InsufficientDataError when fewer than two data rows are present.
 */
[[nodiscard]] CsvTable read_csv(const std::filesystem::path& path);
[[nodiscard]] SeriesMatrix load_csv(const std::filesystem::path& path);

/// Writes with 17 significant digits so values round-trip exactly.
void write_csv(const std::filesystem::path& path, const Matrix& values,
               const std::vector<std::string>& header = {});
void write_csv(std::ostream& out, const Matrix& values, const std::vector<std::string>& header = {});

/// Default header x1..xp.
[[nodiscard]] std::vector<std::string> default_header(std::size_t p, const std::string& prefix = "x");

}  // namespace hdclt
