#pragma once

#include <filesystem>
#include <iosfwd>

#include "eewm/core.hpp"

namespace eewm {

// Plain-text CSV: N lines, N comma-separated decimals per line, written
// with 17 significant digits so values survive the round trip.

Matrix read_matrix_csv(std::istream& in);
void write_matrix_csv(std::ostream& out, const Matrix& m);

CovarianceMatrix load_covariance_csv(const std::filesystem::path& path);
void save_covariance_csv(const CovarianceMatrix& c, const std::filesystem::path& path);

}  // namespace eewm
