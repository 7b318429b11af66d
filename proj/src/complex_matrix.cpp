#include "qdiffuse/complex_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "qdiffuse/errors.hpp"

namespace qdiffuse {

namespace {

// Entries below this magnitude are treated as structural zeros.
constexpr double kStructuralZero = 1e-15;

}  // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::adjoint() const {
  DenseMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols_ != b.rows_) throw EngineError("matrix product: dimension mismatch");
  DenseMatrix out(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i)
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

double DenseMatrix::max_abs_diff(const DenseMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw EngineError("max_abs_diff: dimension mismatch");
  }
  double best = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) best = std::max(best, std::abs(data_[i] - other.data_[i]));
  return best;
}

double unitarity_defect(std::size_t dim, std::span<const std::size_t> col_start,
                        std::span<const MatrixEntry> entries) {
  // (U†U)_{ab} = Σ_r conj(U_ra) U_rb, so only pairs of entries sharing a row
  // contribute. Bucket entries by row and accumulate those pairs.
  std::vector<std::vector<std::pair<std::size_t, Complex>>> by_row(dim);
  for (std::size_t c = 0; c < dim; ++c)
    for (std::size_t k = col_start[c]; k < col_start[c + 1]; ++k)
      by_row[entries[k].row].emplace_back(c, entries[k].value);

  std::vector<double> diag(dim, 0.0);
  std::unordered_map<std::uint64_t, Complex> off;
  for (const auto& row : by_row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      diag[row[i].first] += std::norm(row[i].second);
      for (std::size_t j = i + 1; j < row.size(); ++j) {
        const auto a = std::min(row[i].first, row[j].first);
        const auto b = std::max(row[i].first, row[j].first);
        const Complex v = row[i].first == a ? std::conj(row[i].second) * row[j].second
                                            : std::conj(row[j].second) * row[i].second;
        off[(static_cast<std::uint64_t>(a) << 32) | b] += v;
      }
    }
  }
  double defect = 0.0;
  for (double d : diag) defect = std::max(defect, std::abs(d - 1.0));
  for (const auto& [_, v] : off) defect = std::max(defect, std::abs(v));
  return defect;
}

Unitary Unitary::from_dense(const DenseMatrix& m, double tolerance) {
  if (!m.is_square() || m.rows() == 0) {
    throw EngineError("unitary: matrix must be square and non-empty (got " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ")");
  }
  Unitary u;
  u.dim_ = m.rows();
  u.col_start_.push_back(0);
  for (std::size_t c = 0; c < u.dim_; ++c) {
    for (std::size_t r = 0; r < u.dim_; ++r) {
      if (std::abs(m(r, c)) > kStructuralZero) u.entries_.push_back({r, m(r, c)});
    }
    u.col_start_.push_back(u.entries_.size());
  }
  u.finalize(tolerance);
  return u;
}

Unitary Unitary::from_columns(std::size_t dim, const std::vector<std::vector<MatrixEntry>>& columns,
                              double tolerance) {
  if (dim == 0 || columns.size() != dim) {
    throw EngineError("unitary: expected " + std::to_string(dim) + " columns, got " +
                      std::to_string(columns.size()));
  }
  Unitary u;
  u.dim_ = dim;
  u.col_start_.push_back(0);
  for (const auto& col : columns) {
    std::map<std::size_t, Complex> merged;
    for (const auto& e : col) {
      if (e.row >= dim) throw EngineError("unitary: row index out of range");
      merged[e.row] += e.value;
    }
    for (const auto& [r, v] : merged)
      if (std::abs(v) > kStructuralZero) u.entries_.push_back({r, v});
    u.col_start_.push_back(u.entries_.size());
  }
  u.finalize(tolerance);
  return u;
}

void Unitary::finalize(double tolerance) {
  const double defect = unitarity_defect(dim_, col_start_, entries_);
  if (!(defect <= tolerance)) {
    throw EngineError("unitary: matrix is not unitary (max |U^H U - I| = " +
                      std::to_string(defect) + ")");
  }
  monomial_ = true;
  permutation_ = true;
  for (std::size_t c = 0; c < dim_; ++c) {
    if (col_start_[c + 1] - col_start_[c] != 1) {
      monomial_ = permutation_ = false;
      break;
    }
    if (entries_[col_start_[c]].value != Complex{1.0, 0.0}) permutation_ = false;
  }
}

Unitary Unitary::identity(std::size_t dim) {
  std::vector<std::size_t> image(dim);
  for (std::size_t i = 0; i < dim; ++i) image[i] = i;
  return permutation(image);
}

Unitary Unitary::swap(std::size_t d) {
  std::vector<std::size_t> image(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) image[i * d + j] = j * d + i;
  return permutation(image);
}

Unitary Unitary::pauli_x() { return permutation({1, 0}); }

Unitary Unitary::permutation(const std::vector<std::size_t>& image) {
  std::vector<std::vector<MatrixEntry>> cols(image.size());
  for (std::size_t c = 0; c < image.size(); ++c) cols[c].push_back({image[c], 1.0});
  return from_columns(image.size(), cols);
}

Complex Unitary::at(std::size_t r, std::size_t c) const {
  for (const auto& e : column(c))
    if (e.row == r) return e.value;
  return {};
}

Unitary Unitary::adjoint() const {
  std::vector<std::vector<MatrixEntry>> cols(dim_);
  for (std::size_t c = 0; c < dim_; ++c)
    for (const auto& e : column(c)) cols[e.row].push_back({c, std::conj(e.value)});
  return from_columns(dim_, cols);
}

DenseMatrix Unitary::to_dense() const {
  if (dim_ > 4096) throw EngineError("unitary: too large for a dense view");
  DenseMatrix m(dim_, dim_);
  for (std::size_t c = 0; c < dim_; ++c)
    for (const auto& e : column(c)) m(e.row, c) = e.value;
  return m;
}

}  // namespace qdiffuse
