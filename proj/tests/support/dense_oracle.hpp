#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "qdiffuse/complex_matrix.hpp"
#include "qdiffuse/registers.hpp"
#include "qdiffuse/sparse_state.hpp"

namespace qdiffuse::testing {

// Brute-force state vector over a small register space (first register is
// the most significant digit). Used to cross-check the sparse engine.
class DenseState {
 public:
  static constexpr std::size_t kMaxDim = 4096;

  DenseState(RegisterSpace space, const BasisAssignment& start) : space_(std::move(space)) {
    std::size_t dim = 1;
    for (const auto& r : space_) dim *= r.dim;
    if (dim > kMaxDim) throw std::invalid_argument("dense oracle space too large");
    amp_.assign(dim, Complex{0.0, 0.0});
    std::vector<std::size_t> digits;
    for (const auto& r : space_) digits.push_back(*start.get(r.label));
    amp_[index_of(digits)] = 1.0;
  }

  std::size_t dim() const { return amp_.size(); }
  const std::vector<Complex>& amplitudes() const { return amp_; }

  std::vector<std::size_t> digits_of(std::size_t index) const {
    std::vector<std::size_t> d(space_.size());
    for (std::size_t i = space_.size(); i-- > 0;) {
      d[i] = index % space_[i].dim;
      index /= space_[i].dim;
    }
    return d;
  }

  std::size_t index_of(const std::vector<std::size_t>& digits) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < space_.size(); ++i) idx = idx * space_[i].dim + digits[i];
    return idx;
  }

  void apply(std::span<const RegisterLabel> targets, const DenseMatrix& m,
             std::span<const Control> controls = {}) {
    std::vector<std::size_t> pos;
    for (const auto& t : targets) pos.push_back(space_.position(t));
    std::vector<Complex> next(amp_.size(), Complex{0.0, 0.0});
    for (std::size_t idx = 0; idx < amp_.size(); ++idx) {
      if (amp_[idx] == Complex{0.0, 0.0}) continue;
      auto d = digits_of(idx);
      bool active = true;
      for (const auto& c : controls) active = active && d[space_.position(c.label)] == c.value;
      if (!active) {
        next[idx] += amp_[idx];
        continue;
      }
      std::size_t col = 0;
      for (std::size_t p : pos) col = col * space_[p].dim + d[p];
      for (std::size_t row = 0; row < m.rows(); ++row) {
        if (m(row, col) == Complex{0.0, 0.0}) continue;
        std::size_t r = row;
        for (std::size_t k = pos.size(); k-- > 0;) {
          d[pos[k]] = r % space_[pos[k]].dim;
          r /= space_[pos[k]].dim;
        }
        next[index_of(d)] += m(row, col) * amp_[idx];
      }
    }
    amp_ = std::move(next);
  }

  /// Largest amplitude difference against a sparse state on the same space.
  double max_diff(const SparseState& s) const {
    std::vector<Complex> other(amp_.size(), Complex{0.0, 0.0});
    s.for_each_term([&](std::span<const Digit> key, Complex a) {
      std::vector<std::size_t> d(key.begin(), key.end());
      other[index_of(d)] = a;
    });
    double worst = 0.0;
    for (std::size_t i = 0; i < amp_.size(); ++i) worst = std::max(worst, std::abs(amp_[i] - other[i]));
    return worst;
  }

 private:
  RegisterSpace space_;
  std::vector<Complex> amp_;
};

}  // namespace qdiffuse::testing
