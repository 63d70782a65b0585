#include "ctiv/features/matrix.hpp"

#include <algorithm>

namespace ctiv::features {

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

CsrMatrix CsrMatrix::from_dense(const Matrix& m) {
  CsrMatrix out;
  out.rows = m.rows();
  out.cols = m.cols();
  out.indptr.reserve(m.rows() + 1);
  out.indptr.push_back(0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] != 0.0) {
        out.indices.push_back(static_cast<std::uint32_t>(c));
        out.values.push_back(row[c]);
      }
    }
    out.indptr.push_back(out.indices.size());
  }
  return out;
}

CscMatrix CscMatrix::from_dense(const Matrix& m) {
  CscMatrix out;
  out.rows = m.rows();
  out.cols = m.cols();
  std::vector<std::size_t> counts(m.cols(), 0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c)
      if (row[c] != 0.0) ++counts[c];
  }
  out.indptr.assign(m.cols() + 1, 0);
  for (std::size_t c = 0; c < m.cols(); ++c) out.indptr[c + 1] = out.indptr[c] + counts[c];
  out.indices.resize(out.indptr.back());
  out.values.resize(out.indptr.back());
  std::vector<std::size_t> cursor(out.indptr.begin(), out.indptr.end() - 1);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (row[c] != 0.0) {
        out.indices[cursor[c]] = static_cast<std::uint32_t>(r);
        out.values[cursor[c]] = row[c];
        ++cursor[c];
      }
    }
  }
  return out;
}

}  // namespace ctiv::features
