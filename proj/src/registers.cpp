#include "qdiffuse/registers.hpp"

#include <algorithm>

#include "qdiffuse/errors.hpp"

namespace qdiffuse {

RegisterLabel RegisterLabel::vertex(VertexId v) {
  return RegisterLabel(Kind::Vertex, std::move(v), std::nullopt, 0, 0);
}

RegisterLabel RegisterLabel::flag(VertexId owner, VertexId neighbor, int slot,
                                  std::uint32_t generation) {
  if (slot != 1 && slot != 2) throw EngineError("flag slot must be 1 or 2");
  if (owner == neighbor) throw EngineError("flag owner and neighbor must differ");
  return RegisterLabel(Kind::Flag, std::move(owner), std::move(neighbor), slot, generation);
}

const VertexId& RegisterLabel::neighbor() const {
  if (!neighbor_) throw EngineError("vertex register '" + owner_.str() + "' has no neighbor");
  return *neighbor_;
}

std::string RegisterLabel::to_string() const {
  if (is_vertex()) return owner_.str();
  std::string s = owner_.str() + "," + neighbor_->str() + "," + std::to_string(slot_);
  if (generation_ != 0) s += "#" + std::to_string(generation_);
  return s;
}

std::strong_ordering operator<=>(const RegisterLabel& a, const RegisterLabel& b) {
  if (auto c = a.kind_ <=> b.kind_; c != 0) return c;
  if (auto c = a.generation_ <=> b.generation_; c != 0) return c;
  if (auto c = a.owner_ <=> b.owner_; c != 0) return c;
  if (a.neighbor_ && b.neighbor_) {
    if (auto c = *a.neighbor_ <=> *b.neighbor_; c != 0) return c;
  }
  return a.slot_ <=> b.slot_;
}

RegisterSpace::RegisterSpace(std::vector<Register> registers) : registers_(std::move(registers)) {
  std::sort(registers_.begin(), registers_.end(),
            [](const Register& a, const Register& b) { return a.label < b.label; });
  for (std::size_t i = 0; i < registers_.size(); ++i) {
    const auto& r = registers_[i];
    if (r.dim == 0 || r.dim > kMaxDimension) {
      throw EngineError("register '" + r.label.to_string() + "' has unsupported dimension " +
                        std::to_string(r.dim));
    }
    if (!position_.emplace(r.label, i).second) {
      throw EngineError("duplicate register '" + r.label.to_string() + "'");
    }
  }
}

std::vector<Register> RegisterSpace::flag_generation(const OrientedGraph& g,
                                                     std::uint32_t generation) {
  std::vector<Register> regs;
  for (const auto& v : g.vertices())
    for (const auto& u : g.neighbors(v))
      for (int slot : {1, 2}) regs.push_back({RegisterLabel::flag(v, u, slot, generation), 2});
  return regs;
}

RegisterSpace RegisterSpace::for_graph(const OrientedGraph& g, std::size_t token_dim,
                                       std::uint32_t generations) {
  std::vector<Register> regs;
  for (const auto& v : g.vertices()) regs.push_back({RegisterLabel::vertex(v), token_dim});
  for (std::uint32_t gen = 0; gen < generations; ++gen) {
    auto flags = flag_generation(g, gen);
    regs.insert(regs.end(), flags.begin(), flags.end());
  }
  return RegisterSpace(std::move(regs));
}

std::size_t RegisterSpace::position(const RegisterLabel& label) const {
  auto it = position_.find(label);
  if (it == position_.end()) throw EngineError("unknown register '" + label.to_string() + "'");
  return it->second;
}

std::vector<std::size_t> RegisterSpace::positions(std::span<const RegisterLabel> labels) const {
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    const std::size_t p = position(l);
    if (std::find(out.begin(), out.end(), p) != out.end()) {
      throw EngineError("register '" + l.to_string() + "' listed twice");
    }
    out.push_back(p);
  }
  return out;
}

std::optional<std::uint64_t> RegisterSpace::total_dimension() const {
  std::uint64_t total = 1;
  for (const auto& r : registers_) {
    if (total > (std::uint64_t{1} << 62) / r.dim) return std::nullopt;
    total *= r.dim;
  }
  return total;
}

std::optional<std::size_t> BasisAssignment::get(const RegisterLabel& label) const {
  auto it = values_.find(label);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

BasisAssignment BasisAssignment::all_flags_zero(const RegisterSpace& space,
                                                const std::map<VertexId, std::size_t>& tokens) {
  BasisAssignment a;
  for (const auto& r : space) {
    if (r.label.is_vertex()) {
      auto it = tokens.find(r.label.owner());
      if (it == tokens.end()) {
        throw EngineError("no token given for vertex '" + r.label.owner().str() + "'");
      }
      a.set(r.label, it->second);
    } else {
      a.set(r.label, 0);
    }
  }
  return a;
}

}  // namespace qdiffuse
