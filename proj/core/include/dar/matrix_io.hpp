#pragma once

#include <filesystem>

#include "dar/numerics.hpp"

namespace dar {

/// Matrix CSV: header line `rows,cols`, then the two dimensions, then one line per row (row-major, %.17g).
void write_matrix_csv(const Eigen::Ref<const Matrix>& m, const std::filesystem::path& path);
Matrix read_matrix_csv(const std::filesystem::path& path);

}  // namespace dar
