#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdiffuse/graph.hpp"

namespace qdiffuse {

/// Names one register: the token qudit of a vertex, or one of the two flag
/// qubits a vertex keeps per neighbor. Flags carry a generation so coherent
/// multi-round runs can append a fresh flag set per round.
///
/// Order: all vertex registers (by vertex), then flags by
/// (generation, owner, neighbor, slot).
class RegisterLabel {
 public:
  static RegisterLabel vertex(VertexId v);
  static RegisterLabel flag(VertexId owner, VertexId neighbor, int slot,
                            std::uint32_t generation = 0);

  bool is_vertex() const noexcept { return kind_ == Kind::Vertex; }
  bool is_flag() const noexcept { return kind_ == Kind::Flag; }
  const VertexId& owner() const noexcept { return owner_; }
  const VertexId& neighbor() const;
  int slot() const noexcept { return slot_; }
  std::uint32_t generation() const noexcept { return generation_; }

  /// "A" for vertices, "A,B,1" for generation-0 flags, "A,B,1#2" otherwise.
  std::string to_string() const;

  friend bool operator==(const RegisterLabel&, const RegisterLabel&) = default;
  friend std::strong_ordering operator<=>(const RegisterLabel& a, const RegisterLabel& b);

 private:
  enum class Kind : std::uint8_t { Vertex = 0, Flag = 1 };

  RegisterLabel(Kind kind, VertexId owner, std::optional<VertexId> neighbor, int slot,
                std::uint32_t generation)
      : kind_(kind), generation_(generation), owner_(std::move(owner)),
        neighbor_(std::move(neighbor)), slot_(slot) {}

  Kind kind_;
  std::uint32_t generation_;
  VertexId owner_;
  std::optional<VertexId> neighbor_;
  int slot_;
};

struct Register {
  RegisterLabel label;
  std::size_t dim;
};

/// Ordered, duplicate-free set of registers. Basis keys of a SparseState
/// store one digit per register in this order.
class RegisterSpace {
 public:
  /// Largest register dimension representable in a basis key digit.
  static constexpr std::size_t kMaxDimension = 65535;

  RegisterSpace() = default;
  /// Sorts into label order; throws EngineError on duplicate labels or a
  /// dimension outside [1, kMaxDimension].
  explicit RegisterSpace(std::vector<Register> registers);

  /// One token register of `token_dim` levels per vertex plus, per flag
  /// generation g < `generations`, the qubits Flag(v,u,1), Flag(v,u,2) for
  /// every v and u in N(v).
  static RegisterSpace for_graph(const OrientedGraph& g, std::size_t token_dim,
                                 std::uint32_t generations = 1);
  /// The flag registers of one generation.
  static std::vector<Register> flag_generation(const OrientedGraph& g, std::uint32_t generation);

  std::size_t size() const noexcept { return registers_.size(); }
  const Register& operator[](std::size_t i) const { return registers_[i]; }
  const std::vector<Register>& registers() const noexcept { return registers_; }
  auto begin() const { return registers_.begin(); }
  auto end() const { return registers_.end(); }

  bool contains(const RegisterLabel& label) const { return position_.count(label) != 0; }
  /// Throws EngineError for an unknown label.
  std::size_t position(const RegisterLabel& label) const;
  /// Positions of distinct labels; throws on an unknown or repeated label.
  std::vector<std::size_t> positions(std::span<const RegisterLabel> labels) const;
  std::size_t dimension(const RegisterLabel& label) const { return registers_[position(label)].dim; }

  /// Product of all dimensions, or nullopt when it exceeds 2^62.
  std::optional<std::uint64_t> total_dimension() const;

  friend bool operator==(const RegisterSpace& a, const RegisterSpace& b) {
    if (a.registers_.size() != b.registers_.size()) return false;
    for (std::size_t i = 0; i < a.registers_.size(); ++i)
      if (a.registers_[i].label != b.registers_[i].label || a.registers_[i].dim != b.registers_[i].dim)
        return false;
    return true;
  }

 private:
  std::vector<Register> registers_;
  std::map<RegisterLabel, std::size_t> position_;
};

/// A value for every register of a space.
class BasisAssignment {
 public:
  BasisAssignment() = default;

  void set(const RegisterLabel& label, std::size_t value) { values_[label] = value; }
  std::optional<std::size_t> get(const RegisterLabel& label) const;
  const std::map<RegisterLabel, std::size_t>& values() const noexcept { return values_; }

  /// Every register of the graph's vertices at the given token, all flags 0.
  static BasisAssignment all_flags_zero(const RegisterSpace& space,
                                        const std::map<VertexId, std::size_t>& tokens);

 private:
  std::map<RegisterLabel, std::size_t> values_;
};

}  // namespace qdiffuse
