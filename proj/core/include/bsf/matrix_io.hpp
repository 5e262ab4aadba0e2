#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bsf/payloads.hpp"

// Dense text format shared by all problem files: a first line "rows cols",
// then rows*cols whitespace-separated reals in row-major order. Vectors
// are stored as n x 1 matrices. All failures throw std::runtime_error
// naming the offending file or input.

namespace bsf {

DenseMatrix read_matrix(std::istream& is);
void write_matrix(std::ostream& os, const DenseMatrix& m);

DenseMatrix load_matrix(const std::string& path);
void save_matrix(const std::string& path, const DenseMatrix& m);

std::vector<double> load_vector(const std::string& path);
void save_vector(const std::string& path, const std::vector<double>& v);

/// Assembles a Jacobi-ready system from matrix and right-hand-side files;
/// an empty x0 path means a zero starting iterate.
LinearSystem load_linear_system(const std::string& matrix_path,
                                const std::string& rhs_path,
                                const std::string& x0_path = "");

}  // namespace bsf
