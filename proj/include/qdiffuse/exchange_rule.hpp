#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "qdiffuse/complex_matrix.hpp"

namespace qdiffuse {

/// Two-qudit unitary applied to (tail, head) token registers across a
/// selected edge. Operand order matters for asymmetric rules: the first
/// factor is the tail register.
class ExchangeRule {
 public:
  /// |i⟩|j⟩ ↦ |j⟩|i⟩ for `token_dim` levels.
  static ExchangeRule full_swap(std::size_t token_dim);
  /// The qutrit rule that swaps |0⟩ with any token and leaves pairs of
  /// nonzero tokens in place.
  static ExchangeRule directed_qutrit();
  /// Any unitary of dimension d² for some d >= 1.
  static ExchangeRule custom(const DenseMatrix& matrix, std::string name = "custom");

  std::size_t token_dim() const noexcept { return token_dim_; }
  const Unitary& unitary() const noexcept { return unitary_; }
  const std::string& name() const noexcept { return name_; }
  bool is_full_swap() const noexcept { return full_swap_; }

  /// True when every basis pair maps to a single basis pair (up to phase),
  /// which is what the classical oracle can simulate.
  bool is_basis_permutation() const noexcept { return unitary_.is_monomial(); }
  /// Image of |tail⟩|head⟩ for a basis-permutation rule.
  std::pair<std::size_t, std::size_t> basis_image(std::size_t tail, std::size_t head) const;
  /// True when |t⟩|t⟩ is mapped to itself up to phase.
  bool fixes_pair(std::size_t t) const;

 private:
  ExchangeRule(std::size_t token_dim, Unitary u, std::string name, bool full_swap)
      : token_dim_(token_dim), unitary_(std::move(u)), name_(std::move(name)), full_swap_(full_swap) {}

  std::size_t token_dim_;
  Unitary unitary_;
  std::string name_;
  bool full_swap_;
};

/// The 9×9 qutrit exchange permutation as a rule.
ExchangeRule directed_exchange_matrix();

/// Reads `{"matrix": [[x, ...], ...]}` where each entry is a number or a
/// [re, im] pair. Throws ConfigError on malformed input.
DenseMatrix parse_matrix_json(std::string_view json_text);

}  // namespace qdiffuse
