#pragma once

#include "schatten/types.hpp"

#include <string>

namespace schatten {

// MatrixMarket "matrix coordinate real general" (also reads "integer" and "symmetric").
SparseMatrix read_matrix_market(const std::string& path);
void write_matrix_market(const std::string& path, const SparseMatrix& A);

// Headerless comma-separated rows.
Matrix read_csv(const std::string& path);
void write_csv(const std::string& path, const Matrix& X);

// Dispatches on extension: ".mtx" is MatrixMarket, anything else CSV.
Matrix read_dense(const std::string& path);
SparseMatrix read_sparse(const std::string& path);

}  // namespace schatten
