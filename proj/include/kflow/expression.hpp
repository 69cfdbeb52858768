// Tiny closed expression grammar for densities and potentials in configs:
//
//   expr   := term (('+' | '-') term)*
//   term   := unary ('*' unary)*
//   unary  := '-' unary | atom
//   atom   := number | coord | ('exp' | 'sin' | 'cos') '(' expr ')' | '(' expr ')'
//   coord  := 'x' digit+ | 'y' digit+
//
// sin and cos must take an argument depending on at most one coordinate.
#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kflow/grid.hpp"

namespace kflow {

class ExpressionError : public std::invalid_argument {
public:
  ExpressionError(const std::string& what, std::size_t column)
      : std::invalid_argument(what + " (column " + std::to_string(column + 1) + ")"),
        column_(column) {}
  std::size_t column() const { return column_; }

private:
  std::size_t column_;
};

class Expression {
public:
  /// Parses `source` for complex dimension n. Throws ExpressionError.
  static Expression parse(std::string_view source, int n);
  static Expression constant(double c);

  /// Evaluates at all 2n real coordinates.
  double operator()(std::span<const double> coords) const;
  /// Canonical, fully parenthesized text; parse(to_string()) reproduces it.
  std::string to_string() const;
  /// Real axes referenced anywhere in the expression.
  std::vector<Axis> axes() const;
  bool is_constant() const { return axes().empty(); }

  ScalarField sample(const PeriodicGrid& grid) const;

  bool operator==(const Expression& o) const { return to_string() == o.to_string(); }

  struct Node;

private:
  std::shared_ptr<const Node> root_;
  int n_ = 1;
};

}  // namespace kflow
