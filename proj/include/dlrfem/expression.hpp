/*! @file expression.hpp
 *  Arithmetic expressions in x and y for user-supplied initial conditions.
 *
 *  Grammar: numbers, x, y, pi, + - * / ^ (right associative), unary minus,
 *  parentheses and the functions sin, cos, tanh, sqrt, exp, abs.
 */
#pragma once

#include <memory>
#include <string>

namespace dlrfem {

class Expression {
 public:
  //! Throws ConfigError with the offending column on malformed input.
  static Expression parse(const std::string& text);
  double operator()(double x, double y) const;
  const std::string& source() const { return source_; }

  struct Node;

 private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

}  // namespace dlrfem
