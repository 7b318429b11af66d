#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdiffuse/complex_matrix.hpp"
#include "qdiffuse/registers.hpp"
#include "qdiffuse/rng.hpp"

namespace qdiffuse {

using Digit = std::uint16_t;
/// Joint basis value of an ordered list of registers.
using Outcome = std::vector<std::size_t>;

/// Probability of each joint basis value of some registers.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::map<Outcome, double> support) : support_(std::move(support)) {}

  double probability(const Outcome& o) const {
    auto it = support_.find(o);
    return it == support_.end() ? 0.0 : it->second;
  }
  const std::map<Outcome, double>& support() const noexcept { return support_; }
  double total() const;

 private:
  std::map<Outcome, double> support_;
};

struct Control {
  RegisterLabel label;
  std::size_t value;
};

struct Measurement {
  Outcome outcome;
  double probability;
};

/// Sparse amplitude map over the joint basis of a RegisterSpace.
///
/// Terms are stored flat (one digit per register per term). The canonical
/// order, lexicographic in register order, is restored lazily: monomial
/// operators (permutations up to phase) rewrite keys in place and only mark
/// the order stale, while any operator that can merge terms re-sorts,
/// merges and prunes immediately.
class SparseState {
 public:
  static constexpr double kPruneThreshold = 1e-12;

  /// init_basis. Throws EngineError on a missing, unknown or out-of-range value.
  static SparseState basis_state(RegisterSpace space, const BasisAssignment& assignment);

  const RegisterSpace& space() const noexcept { return space_; }
  std::size_t support_size() const noexcept { return amps_.size(); }
  double norm_squared() const;

  Complex amplitude(const BasisAssignment& assignment) const;

  /// Visits terms in canonical order as f(digits, amplitude).
  template <class F>
  void for_each_term(F&& f) const {
    canonicalize();
    const std::size_t w = space_.size();
    for (std::size_t t = 0; t < amps_.size(); ++t)
      f(std::span<const Digit>(digits_.data() + t * w, w), amps_[t]);
  }

  /// Applies `u` to the joint register of `targets` (first target is the
  /// most significant digit of the operator index).
  void apply(std::span<const RegisterLabel> targets, const Unitary& u);
  /// Validates `m` as a unitary first.
  void apply(std::span<const RegisterLabel> targets, const DenseMatrix& m);
  /// Applies `u` only on components where every control has its value.
  void apply_controlled(std::span<const Control> controls, std::span<const RegisterLabel> targets,
                        const Unitary& u);

  /// Projective measurement in the standard basis; collapses and renormalizes.
  Measurement measure(std::span<const RegisterLabel> labels, Rng& rng);
  Distribution marginal(std::span<const RegisterLabel> labels) const;
  /// Reduced density matrix of a subsystem of total dimension <= 64.
  DenseMatrix reduced_density_matrix(std::span<const RegisterLabel> labels) const;

  /// The common value of a register over all terms, if it has one.
  std::optional<std::size_t> definite_value(const RegisterLabel& label) const;
  /// Relabels registers holding a definite value to |0⟩. Throws
  /// ProtocolError if a register is still in superposition.
  void reset_to_zero(std::span<const RegisterLabel> labels);
  /// Adds registers initialized to |0⟩.
  void append_registers(std::vector<Register> registers);

  /// One line per term: `<re>,<im>,<label=value;...>`, canonical order.
  std::string dump() const;

 private:
  SparseState() = default;

  void apply_impl(const std::vector<std::size_t>& targets, const Unitary& u,
                  const std::vector<std::pair<std::size_t, Digit>>& controls);
  void merge_and_prune() const;
  void canonicalize() const;

  RegisterSpace space_;
  mutable std::vector<Digit> digits_;
  mutable std::vector<Complex> amps_;
  mutable bool canonical_ = true;
};

}  // namespace qdiffuse
