#pragma once

// Closed-form potential expressions over the grammar
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := '-' unary | power
//   power  := atom ('^' unary)?
//   atom   := number | 'x' | 'pi' | func '(' expr ')' | '(' expr ')'
//   func   := exp | sqrt
// Evaluation runs on Taylor jets, so derivatives of any order come from
// forward-mode differentiation of the parsed tree.

#include <memory>
#include <string>

#include "ctunnel/taylor.hpp"

namespace ctunnel {

class Expression {
 public:
  /// Throws ConfigError with the offending column on malformed input.
  static Expression parse(const std::string& text);

  Taylor<double> operator()(const Taylor<double>& x) const;
  double operator()(double x) const;

  const std::string& text() const { return text_; }

  struct Node;

 private:
  Expression(std::string text, std::shared_ptr<const Node> root)
      : text_(std::move(text)), root_(std::move(root)) {}

  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace ctunnel
