#pragma once

/// @file expr.hpp
/// Arithmetic expression parsing and evaluation for scalar fields on R^d.
///
/// Grammar (see docs/grammar.md for the full reference):
///   sum     := product (('+' | '-') product)*
///   product := signed (('*' | '/') signed)*
///   signed  := '-' signed | power
///   power   := atom ('^' signed)?          right-associative, binds above '-'
///   atom    := number | ident | call | '(' sum ')'
///
/// Coordinates are written x1..xd (1-based). The bare identifier `x` denotes
/// the whole point and is only valid as an argument of norm(x), norm2(x) or
/// dot(c, x). Named scalar and vector constants come from a SymbolTable and
/// are folded into the tree at parse time.

#include <map>
#include <memory>
#include <string>
#include <string_view>

#include "invlab/errors.hpp"
#include "invlab/linalg.hpp"

namespace invlab {

struct SymbolTable {
  std::map<std::string, double> scalars;
  std::map<std::string, Vec> vectors;
};

namespace detail {
struct ExprNode;
}

class Expression {
 public:
  // Throws ParseError (with 1-based line/column) on malformed input.
  static Expression parse(std::string_view source, const SymbolTable& symbols = {});

  Expression() = default;

  // Evaluates at x. Throws DomainError on ln(v<=0), sqrt(v<0), division by
  // zero, 0^negative or fractional powers of negative bases; DimensionError
  // when x has fewer coordinates than the expression references.
  double operator()(const Vec& x) const;

  // Fully parenthesized form; parsing it back yields a tree that evaluates
  // bit-identically to this one.
  std::string str() const;

  // Smallest dimension the expression can be evaluated in.
  int min_dimension() const { return min_dim_; }

  bool empty() const { return root_ == nullptr; }

 private:
  std::shared_ptr<const detail::ExprNode> root_;
  int min_dim_ = 0;
};

} // namespace invlab
