#include "qdiffuse/exchange_rule.hpp"

#include <cmath>

#include <json.hpp>

#include "qdiffuse/errors.hpp"

namespace qdiffuse {

ExchangeRule ExchangeRule::full_swap(std::size_t token_dim) {
  if (token_dim == 0) throw EngineError("exchange rule needs token_dim >= 1");
  return ExchangeRule(token_dim, Unitary::swap(token_dim), "full_swap", true);
}

ExchangeRule ExchangeRule::directed_qutrit() {
  // Rows and columns indexed 00,01,02,10,11,12,20,21,22.
  static constexpr int kMatrix[9][9] = {
      {1, 0, 0, 0, 0, 0, 0, 0, 0},  //
      {0, 0, 0, 1, 0, 0, 0, 0, 0},  //
      {0, 0, 0, 0, 0, 0, 1, 0, 0},  //
      {0, 1, 0, 0, 0, 0, 0, 0, 0},  //
      {0, 0, 0, 0, 1, 0, 0, 0, 0},  //
      {0, 0, 0, 0, 0, 1, 0, 0, 0},  //
      {0, 0, 1, 0, 0, 0, 0, 0, 0},  //
      {0, 0, 0, 0, 0, 0, 0, 1, 0},  //
      {0, 0, 0, 0, 0, 0, 0, 0, 1},
  };
  DenseMatrix m(9, 9);
  for (std::size_t r = 0; r < 9; ++r)
    for (std::size_t c = 0; c < 9; ++c) m(r, c) = kMatrix[r][c];
  return ExchangeRule(3, Unitary::from_dense(m), "directed_qutrit", false);
}

ExchangeRule ExchangeRule::custom(const DenseMatrix& matrix, std::string name) {
  const std::size_t n = matrix.rows();
  const auto d = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (!matrix.is_square() || d == 0 || d * d != n) {
    throw EngineError("exchange matrix must be square with a perfect-square dimension (got " +
                      std::to_string(matrix.rows()) + "x" + std::to_string(matrix.cols()) + ")");
  }
  Unitary u = Unitary::from_dense(matrix);
  bool is_swap = true;
  const Unitary swap = Unitary::swap(d);
  for (std::size_t c = 0; c < n && is_swap; ++c)
    is_swap = u.column(c).size() == 1 && u.column(c)[0].row == swap.column(c)[0].row &&
              u.column(c)[0].value == Complex{1.0, 0.0};
  return ExchangeRule(d, std::move(u), std::move(name), is_swap);
}

std::pair<std::size_t, std::size_t> ExchangeRule::basis_image(std::size_t tail,
                                                              std::size_t head) const {
  if (!is_basis_permutation()) {
    throw EngineError("exchange rule '" + name_ + "' is not a basis permutation");
  }
  if (tail >= token_dim_ || head >= token_dim_) throw EngineError("token out of range for exchange rule");
  const std::size_t row = unitary_.column(tail * token_dim_ + head).front().row;
  return {row / token_dim_, row % token_dim_};
}

bool ExchangeRule::fixes_pair(std::size_t t) const {
  const auto col = unitary_.column(t * token_dim_ + t);
  return col.size() == 1 && col[0].row == t * token_dim_ + t;
}

ExchangeRule directed_exchange_matrix() { return ExchangeRule::directed_qutrit(); }

DenseMatrix parse_matrix_json(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("matrix JSON: ") + e.what());
  }
  // Either a bare array of rows or {"matrix": rows}.
  if (doc.is_object() && doc.contains("matrix")) doc = doc["matrix"];
  if (!doc.is_array() || doc.empty()) {
    throw ConfigError("matrix JSON: expected a non-empty array of rows");
  }
  const auto& rows = doc;
  const std::size_t n = rows.size();
  DenseMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r) {
    if (!rows[r].is_array() || rows[r].size() != n) {
      throw ConfigError("matrix JSON: row " + std::to_string(r) + " must have " +
                        std::to_string(n) + " entries");
    }
    for (std::size_t c = 0; c < n; ++c) {
      const auto& x = rows[r][c];
      if (x.is_number()) {
        m(r, c) = x.get<double>();
      } else if (x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number()) {
        m(r, c) = Complex(x[0].get<double>(), x[1].get<double>());
      } else {
        throw ConfigError("matrix JSON: entry (" + std::to_string(r) + "," + std::to_string(c) +
                          ") must be a number or [re, im]");
      }
    }
  }
  return m;
}

}  // namespace qdiffuse
