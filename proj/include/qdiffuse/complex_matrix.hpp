#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qdiffuse {

using Complex = std::complex<double>;

/// ‖U†U − I‖_max bound accepted for a unitary.
inline constexpr double kUnitaryTolerance = 1e-9;

/// Row-major dense complex matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  DenseMatrix adjoint() const;
  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
  double max_abs_diff(const DenseMatrix& other) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

struct MatrixEntry {
  std::size_t row;
  Complex value;
};

/// A square unitary validated at construction, stored column-compressed so
/// that applying it to one basis vector only touches that column's nonzeros.
class Unitary {
 public:
  /// Throws EngineError if `m` is not square or not unitary within `tolerance`.
  static Unitary from_dense(const DenseMatrix& m, double tolerance = kUnitaryTolerance);
  /// `columns[c]` lists the nonzero entries of column c.
  static Unitary from_columns(std::size_t dim, const std::vector<std::vector<MatrixEntry>>& columns,
                              double tolerance = kUnitaryTolerance);
  static Unitary identity(std::size_t dim);
  /// The swap of two d-level registers: |i⟩|j⟩ ↦ |j⟩|i⟩ with index i·d + j.
  static Unitary swap(std::size_t d);
  /// Pauli X.
  static Unitary pauli_x();
  /// Basis permutation |c⟩ ↦ |image[c]⟩.
  static Unitary permutation(const std::vector<std::size_t>& image);

  std::size_t dim() const noexcept { return dim_; }
  std::span<const MatrixEntry> column(std::size_t c) const {
    return {entries_.data() + col_start_[c], col_start_[c + 1] - col_start_[c]};
  }
  Complex at(std::size_t r, std::size_t c) const;
  std::size_t nonzeros() const noexcept { return entries_.size(); }

  /// Every column has exactly one entry; such operators never merge terms.
  bool is_monomial() const noexcept { return monomial_; }
  /// Monomial with all nonzero entries exactly 1.
  bool is_permutation() const noexcept { return permutation_; }

  Unitary adjoint() const;
  DenseMatrix to_dense() const;

 private:
  Unitary() = default;
  void finalize(double tolerance);

  std::size_t dim_ = 0;
  std::vector<std::size_t> col_start_;
  std::vector<MatrixEntry> entries_;
  bool monomial_ = false;
  bool permutation_ = false;
};

/// max over (i,j) of |(U†U − I)_ij| for a column-compressed operator.
double unitarity_defect(std::size_t dim, std::span<const std::size_t> col_start,
                        std::span<const MatrixEntry> entries);

}  // namespace qdiffuse
