#include "qdiffuse/sparse_state.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "qdiffuse/errors.hpp"

namespace qdiffuse {

double Distribution::total() const {
  double s = 0.0;
  for (const auto& [_, p] : support_) s += p;
  return s;
}

SparseState SparseState::basis_state(RegisterSpace space, const BasisAssignment& assignment) {
  for (const auto& [label, _] : assignment.values()) {
    if (!space.contains(label)) {
      throw EngineError("assignment names unknown register '" + label.to_string() + "'");
    }
  }
  SparseState s;
  s.digits_.reserve(space.size());
  for (const auto& r : space) {
    auto v = assignment.get(r.label);
    if (!v) throw EngineError("assignment is missing register '" + r.label.to_string() + "'");
    if (*v >= r.dim) {
      throw EngineError("value " + std::to_string(*v) + " out of range for register '" +
                        r.label.to_string() + "' of dimension " + std::to_string(r.dim));
    }
    s.digits_.push_back(static_cast<Digit>(*v));
  }
  s.space_ = std::move(space);
  s.amps_.push_back(1.0);
  return s;
}

double SparseState::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

Complex SparseState::amplitude(const BasisAssignment& assignment) const {
  const std::size_t w = space_.size();
  std::vector<Digit> key(w);
  for (std::size_t i = 0; i < w; ++i) {
    auto v = assignment.get(space_[i].label);
    if (!v) throw EngineError("assignment is missing register '" + space_[i].label.to_string() + "'");
    key[i] = static_cast<Digit>(*v);
  }
  for (std::size_t t = 0; t < amps_.size(); ++t) {
    if (std::equal(key.begin(), key.end(), digits_.begin() + static_cast<std::ptrdiff_t>(t * w)))
      return amps_[t];
  }
  return {};
}

void SparseState::apply(std::span<const RegisterLabel> targets, const Unitary& u) {
  apply_impl(space_.positions(targets), u, {});
}

void SparseState::apply(std::span<const RegisterLabel> targets, const DenseMatrix& m) {
  apply(targets, Unitary::from_dense(m));
}

void SparseState::apply_controlled(std::span<const Control> controls,
                                   std::span<const RegisterLabel> targets, const Unitary& u) {
  const auto tpos = space_.positions(targets);
  std::vector<std::pair<std::size_t, Digit>> cpos;
  for (const auto& c : controls) {
    const std::size_t p = space_.position(c.label);
    if (std::find(tpos.begin(), tpos.end(), p) != tpos.end()) {
      throw EngineError("register '" + c.label.to_string() + "' is both control and target");
    }
    for (const auto& [q, _] : cpos)
      if (q == p) throw EngineError("control '" + c.label.to_string() + "' listed twice");
    if (c.value >= space_[p].dim) {
      throw EngineError("control value out of range for '" + c.label.to_string() + "'");
    }
    cpos.emplace_back(p, static_cast<Digit>(c.value));
  }
  apply_impl(tpos, u, cpos);
}

void SparseState::apply_impl(const std::vector<std::size_t>& targets, const Unitary& u,
                             const std::vector<std::pair<std::size_t, Digit>>& controls) {
  std::size_t sub_dim = 1;
  for (std::size_t p : targets) sub_dim *= space_[p].dim;
  if (targets.empty() || sub_dim != u.dim()) {
    throw EngineError("operator dimension " + std::to_string(u.dim()) +
                      " does not match target dimension " + std::to_string(sub_dim));
  }
  std::vector<std::size_t> stride(targets.size());
  {
    std::size_t s = 1;
    for (std::size_t k = targets.size(); k-- > 0;) {
      stride[k] = s;
      s *= space_[targets[k]].dim;
    }
  }

  const std::size_t w = space_.size();
  auto active = [&](const Digit* key) {
    for (const auto& [p, v] : controls)
      if (key[p] != v) return false;
    return true;
  };
  auto column_of = [&](const Digit* key) {
    std::size_t c = 0;
    for (std::size_t k = 0; k < targets.size(); ++k) c += key[targets[k]] * stride[k];
    return c;
  };
  auto write_row = [&](Digit* key, std::size_t row) {
    for (std::size_t k = 0; k < targets.size(); ++k) {
      key[targets[k]] = static_cast<Digit>(row / stride[k]);
      row %= stride[k];
    }
  };

  if (u.is_monomial()) {
    for (std::size_t t = 0; t < amps_.size(); ++t) {
      Digit* key = digits_.data() + t * w;
      if (!active(key)) continue;
      const std::size_t c = column_of(key);
      const MatrixEntry& e = u.column(c).front();
      if (e.row != c) {
        write_row(key, e.row);
        canonical_ = false;
      }
      amps_[t] *= e.value;
    }
    return;
  }

  std::vector<Digit> out_digits;
  std::vector<Complex> out_amps;
  out_digits.reserve(digits_.size());
  out_amps.reserve(amps_.size());
  for (std::size_t t = 0; t < amps_.size(); ++t) {
    const Digit* key = digits_.data() + t * w;
    if (!active(key)) {
      out_digits.insert(out_digits.end(), key, key + w);
      out_amps.push_back(amps_[t]);
      continue;
    }
    for (const MatrixEntry& e : u.column(column_of(key))) {
      const std::size_t at = out_digits.size();
      out_digits.insert(out_digits.end(), key, key + w);
      write_row(out_digits.data() + at, e.row);
      out_amps.push_back(amps_[t] * e.value);
    }
  }
  digits_ = std::move(out_digits);
  amps_ = std::move(out_amps);
  merge_and_prune();
}

void SparseState::merge_and_prune() const {
  const std::size_t w = space_.size();
  const std::size_t n = amps_.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const Digit* d = digits_.data();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(d + a * w, d + a * w + w, d + b * w, d + b * w + w);
  });
  std::vector<Digit> out_digits;
  std::vector<Complex> out_amps;
  out_digits.reserve(digits_.size());
  out_amps.reserve(n);
  for (std::size_t i = 0; i < n;) {
    const Digit* key = d + order[i] * w;
    Complex sum = amps_[order[i]];
    std::size_t j = i + 1;
    while (j < n && std::equal(key, key + w, d + order[j] * w)) sum += amps_[order[j++]];
    if (std::abs(sum) >= kPruneThreshold) {
      out_digits.insert(out_digits.end(), key, key + w);
      out_amps.push_back(sum);
    }
    i = j;
  }
  digits_ = std::move(out_digits);
  amps_ = std::move(out_amps);
  canonical_ = true;
}

void SparseState::canonicalize() const {
  if (canonical_) return;
  // Monomial operators are bijections on basis keys, so no duplicates can exist.
  merge_and_prune();
}

Distribution SparseState::marginal(std::span<const RegisterLabel> labels) const {
  const auto pos = space_.positions(labels);
  canonicalize();
  const std::size_t w = space_.size();
  std::map<Outcome, double> support;
  Outcome o(pos.size());
  for (std::size_t t = 0; t < amps_.size(); ++t) {
    const Digit* key = digits_.data() + t * w;
    for (std::size_t k = 0; k < pos.size(); ++k) o[k] = key[pos[k]];
    support[o] += std::norm(amps_[t]);
  }
  return Distribution(std::move(support));
}

Measurement SparseState::measure(std::span<const RegisterLabel> labels, Rng& rng) {
  const auto pos = space_.positions(labels);
  const Distribution dist = marginal(labels);
  const double total = dist.total();
  if (!(total > 0.0)) throw EngineError("cannot measure a state with zero norm");

  const double u = rng.uniform() * total;
  double acc = 0.0;
  const Outcome* chosen = nullptr;
  double chosen_p = 0.0;
  for (const auto& [o, p] : dist.support()) {
    chosen = &o;
    chosen_p = p;
    acc += p;
    if (u < acc) break;
  }
  Outcome outcome = *chosen;

  const std::size_t w = space_.size();
  const double scale = 1.0 / std::sqrt(chosen_p);
  std::vector<Digit> out_digits;
  std::vector<Complex> out_amps;
  for (std::size_t t = 0; t < amps_.size(); ++t) {
    const Digit* key = digits_.data() + t * w;
    bool keep = true;
    for (std::size_t k = 0; k < pos.size() && keep; ++k) keep = key[pos[k]] == outcome[k];
    if (!keep) continue;
    out_digits.insert(out_digits.end(), key, key + w);
    out_amps.push_back(amps_[t] * scale);
  }
  digits_ = std::move(out_digits);
  amps_ = std::move(out_amps);
  return {std::move(outcome), chosen_p / total};
}

DenseMatrix SparseState::reduced_density_matrix(std::span<const RegisterLabel> labels) const {
  const auto pos = space_.positions(labels);
  std::size_t dim = 1;
  for (std::size_t p : pos) dim *= space_[p].dim;
  if (dim > 64) throw EngineError("reduced density matrix limited to subsystems of dimension <= 64");
  canonicalize();

  // Group amplitudes by the values of the traced-out registers.
  const std::size_t w = space_.size();
  std::vector<bool> kept(w, false);
  for (std::size_t p : pos) kept[p] = true;
  std::map<std::vector<Digit>, std::vector<std::pair<std::size_t, Complex>>> groups;
  for (std::size_t t = 0; t < amps_.size(); ++t) {
    const Digit* key = digits_.data() + t * w;
    std::vector<Digit> rest;
    for (std::size_t i = 0; i < w; ++i)
      if (!kept[i]) rest.push_back(key[i]);
    std::size_t idx = 0;
    for (std::size_t p : pos) idx = idx * space_[p].dim + key[p];
    groups[rest].emplace_back(idx, amps_[t]);
  }
  DenseMatrix rho(dim, dim);
  for (const auto& [_, members] : groups)
    for (const auto& [i, a] : members)
      for (const auto& [j, b] : members) rho(i, j) += a * std::conj(b);
  return rho;
}

std::optional<std::size_t> SparseState::definite_value(const RegisterLabel& label) const {
  const std::size_t p = space_.position(label);
  const std::size_t w = space_.size();
  if (amps_.empty()) return std::nullopt;
  const Digit v = digits_[p];
  for (std::size_t t = 1; t < amps_.size(); ++t)
    if (digits_[t * w + p] != v) return std::nullopt;
  return v;
}

void SparseState::reset_to_zero(std::span<const RegisterLabel> labels) {
  const auto pos = space_.positions(labels);
  for (std::size_t k = 0; k < pos.size(); ++k) {
    if (!definite_value(labels[k])) {
      throw ProtocolError("cannot reset register '" + labels[k].to_string() +
                          "': it is not in a definite basis state");
    }
  }
  // Every term shares the same digit at each position, so order is unchanged.
  const std::size_t w = space_.size();
  for (std::size_t t = 0; t < amps_.size(); ++t)
    for (std::size_t p : pos) digits_[t * w + p] = 0;
}

void SparseState::append_registers(std::vector<Register> registers) {
  std::vector<Register> all = space_.registers();
  all.insert(all.end(), registers.begin(), registers.end());
  RegisterSpace next(std::move(all));

  const std::size_t old_w = space_.size();
  const std::size_t new_w = next.size();
  std::vector<std::size_t> moved(old_w);
  for (std::size_t i = 0; i < old_w; ++i) moved[i] = next.position(space_[i].label);

  std::vector<Digit> out(amps_.size() * new_w, 0);
  for (std::size_t t = 0; t < amps_.size(); ++t)
    for (std::size_t i = 0; i < old_w; ++i) out[t * new_w + moved[i]] = digits_[t * old_w + i];
  digits_ = std::move(out);
  space_ = std::move(next);
  canonical_ = false;
}

std::string SparseState::dump() const {
  canonicalize();
  auto num = [](double x) {
    if (std::abs(x) < 5e-13) x = 0.0;
    return fmt::format("{:.12g}", x);
  };
  std::string out;
  const std::size_t w = space_.size();
  for (std::size_t t = 0; t < amps_.size(); ++t) {
    out += num(amps_[t].real());
    out += ',';
    out += num(amps_[t].imag());
    out += ',';
    for (std::size_t i = 0; i < w; ++i) {
      if (i) out += ';';
      out += space_[i].label.to_string();
      out += '=';
      out += std::to_string(digits_[t * w + i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace qdiffuse
