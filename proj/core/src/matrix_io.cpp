#include "bsf/matrix_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bsf/text.hpp"

namespace bsf {

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error(what);
}

DenseMatrix read_matrix_impl(std::istream& is, const std::string& origin) {
  long long rows = 0;
  long long cols = 0;
  if (!(is >> rows >> cols)) {
    fail(origin + ": expected a \"rows cols\" header line");
  }
  if (rows < 0 || cols < 0) {
    fail(origin + ": negative dimensions in header");
  }
  DenseMatrix m;
  m.rows = static_cast<std::size_t>(rows);
  m.cols = static_cast<std::size_t>(cols);
  m.values.resize(m.rows * m.cols);
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    if (!(is >> m.values[i])) {
      fail(origin + ": expected " + std::to_string(m.values.size()) +
           " values, got " + std::to_string(i));
    }
  }
  std::string extra;
  if (is >> extra) {
    fail(origin + ": trailing data after " +
         std::to_string(m.values.size()) + " values: \"" + extra + "\"");
  }
  return m;
}

}  // namespace

DenseMatrix read_matrix(std::istream& is) {
  return read_matrix_impl(is, "matrix input");
}

void write_matrix(std::ostream& os, const DenseMatrix& m) {
  if (m.values.size() != m.rows * m.cols) {
    fail("matrix storage does not match its shape");
  }
  os << m.rows << ' ' << m.cols << '\n';
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) {
      if (c > 0) os << ' ';
      os << format_double(m(r, c));
    }
    os << '\n';
  }
}

DenseMatrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    fail(path + ": cannot open for reading");
  }
  return read_matrix_impl(in, path);
}

void save_matrix(const std::string& path, const DenseMatrix& m) {
  std::ofstream out(path);
  if (!out) {
    fail(path + ": cannot open for writing");
  }
  write_matrix(out, m);
  if (!out) {
    fail(path + ": write failed");
  }
}

std::vector<double> load_vector(const std::string& path) {
  DenseMatrix m = load_matrix(path);
  if (m.cols != 1) {
    fail(path + ": expected an n x 1 vector, got " + std::to_string(m.rows) +
         " x " + std::to_string(m.cols));
  }
  return m.values;
}

void save_vector(const std::string& path, const std::vector<double>& v) {
  DenseMatrix m;
  m.rows = v.size();
  m.cols = 1;
  m.values = v;
  save_matrix(path, m);
}

LinearSystem load_linear_system(const std::string& matrix_path,
                                const std::string& rhs_path,
                                const std::string& x0_path) {
  LinearSystem sys;
  sys.a = load_matrix(matrix_path);
  sys.b = load_vector(rhs_path);
  if (sys.b.size() != sys.a.rows) {
    fail(rhs_path + ": right-hand side length " +
         std::to_string(sys.b.size()) + " does not match " +
         std::to_string(sys.a.rows) + " matrix rows");
  }
  if (x0_path.empty()) {
    sys.x0.assign(sys.a.cols, 0.0);
  } else {
    sys.x0 = load_vector(x0_path);
    if (sys.x0.size() != sys.a.cols) {
      fail(x0_path + ": starting iterate length " +
           std::to_string(sys.x0.size()) + " does not match " +
           std::to_string(sys.a.cols) + " matrix columns");
    }
  }
  return sys;
}

}  // namespace bsf
