#pragma once

// Coefficient expression language.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' INTEGER)*
//   primary := NUMBER | 'pi' | 'x'INDEX | ('sin'|'cos'|'exp') '(' expr ')' | '(' expr ')'
//
// Exponents are non-negative integer literals, so every expression is smooth
// wherever its denominators do not vanish and `partial` is always defined.

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cpair {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, const std::string& message);
  /// Zero-based character offset of the offending token.
  std::size_t position() const { return pos_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t pos_;
  std::string detail_;
};

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Expr {
 public:
  enum class Kind { constant, pi, variable, negate, add, sub, mul, div, pow, sin, cos, exp };

  /// The constant 0 on a zero-dimensional space.
  Expr();

  static Expr constant(double value, int n);
  static Expr pi(int n);
  static Expr variable(int index, int n);

  Kind kind() const;
  /// Ambient dimension the variable indices are checked against.
  int dim() const { return n_; }

  /// Value of a constant node; throws for other kinds.
  double constant_value() const;
  bool is_zero() const;
  bool is_constant() const;

  double eval(std::span<const double> point) const;
  Expr partial(int axis) const;

  /// Fully parenthesised text that parses back to an equivalent expression.
  std::string to_string() const;

  bool uses_variable(int index) const;

  /// Same expression with every variable xi renamed to x(i + offset), declared on dimension n.
  Expr shifted(int offset, int n) const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr operator*(double s, const Expr& a);

  friend Expr pow(const Expr& a, int exponent);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr exp(const Expr& a);

  struct Node;

 private:
  Expr(std::shared_ptr<const Node> node, int n) : node_(std::move(node)), n_(n) {}
  static Expr make(Kind kind, int n, Expr a = {}, Expr b = {}, double value = 0.0, int index = 0);

  std::shared_ptr<const Node> node_;
  int n_ = 0;
};

/// Parses `text` with variables x0..x{n-1}. Throws ParseError.
Expr parse(std::string_view text, int n);

}  // namespace cpair
