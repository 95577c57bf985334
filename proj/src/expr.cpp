#include "cpair/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace cpair {

struct Expr::Node {
  Kind kind;
  double value = 0.0;  // constant, or exponent for pow
  int index = 0;       // variable index
  std::shared_ptr<const Node> a, b;
};

ParseError::ParseError(std::size_t position, const std::string& message)
    : std::runtime_error(fmt::format("parse error at position {}: {}", position, message)),
      pos_(position),
      detail_(message) {}

Expr::Expr() : Expr(constant(0.0, 0)) {}

Expr Expr::make(Kind kind, int n, Expr a, Expr b, double value, int index) {
  auto node = std::make_shared<Node>();
  node->kind = kind;
  node->value = value;
  node->index = index;
  node->a = a.node_;
  node->b = b.node_;
  return Expr(std::move(node), n);
}

Expr Expr::constant(double value, int n) {
  auto node = std::make_shared<Node>();
  node->kind = Kind::constant;
  node->value = value;
  return Expr(std::move(node), n);
}

Expr Expr::pi(int n) { return make(Kind::pi, n); }

Expr Expr::variable(int index, int n) {
  if (index < 0 || index >= n)
    throw std::invalid_argument(fmt::format("variable x{} out of range for dimension {}", index, n));
  return make(Kind::variable, n, {}, {}, 0.0, index);
}

Expr::Kind Expr::kind() const { return node_->kind; }

double Expr::constant_value() const {
  if (node_->kind == Kind::constant) return node_->value;
  if (node_->kind == Kind::pi) return std::numbers::pi;
  throw std::logic_error("constant_value() on a non-constant expression");
}

bool Expr::is_zero() const { return node_->kind == Kind::constant && node_->value == 0.0; }

bool Expr::is_constant() const { return node_->kind == Kind::constant || node_->kind == Kind::pi; }

namespace {

using Kind = Expr::Kind;
using NodeP = const Expr::Node*;

double eval_node(NodeP n, std::span<const double> x) {
  switch (n->kind) {
    case Kind::constant: return n->value;
    case Kind::pi: return std::numbers::pi;
    case Kind::variable: return x[n->index];
    case Kind::negate: return -eval_node(n->a.get(), x);
    case Kind::add: return eval_node(n->a.get(), x) + eval_node(n->b.get(), x);
    case Kind::sub: return eval_node(n->a.get(), x) - eval_node(n->b.get(), x);
    case Kind::mul: return eval_node(n->a.get(), x) * eval_node(n->b.get(), x);
    case Kind::div: {
      const double den = eval_node(n->b.get(), x);
      if (den == 0.0) throw EvalError("division by zero");
      return eval_node(n->a.get(), x) / den;
    }
    case Kind::pow: {
      const double base = eval_node(n->a.get(), x);
      double r = 1.0;
      for (int i = 0; i < static_cast<int>(n->value); ++i) r *= base;
      return r;
    }
    case Kind::sin: return std::sin(eval_node(n->a.get(), x));
    case Kind::cos: return std::cos(eval_node(n->a.get(), x));
    case Kind::exp: return std::exp(eval_node(n->a.get(), x));
  }
  throw std::logic_error("unknown expression node");
}

void print_node(NodeP n, std::string& out) {
  auto unary = [&](const char* name) {
    out += name;
    out += '(';
    print_node(n->a.get(), out);
    out += ')';
  };
  auto binary = [&](char op) {
    out += '(';
    print_node(n->a.get(), out);
    out += ' ';
    out += op;
    out += ' ';
    print_node(n->b.get(), out);
    out += ')';
  };
  switch (n->kind) {
    case Kind::constant:
      if (n->value < 0 || std::signbit(n->value))
        out += fmt::format("(-{:.17g})", -n->value);
      else
        out += fmt::format("{:.17g}", n->value);
      return;
    case Kind::pi: out += "pi"; return;
    case Kind::variable: out += fmt::format("x{}", n->index); return;
    case Kind::negate: unary("-"); return;
    case Kind::add: binary('+'); return;
    case Kind::sub: binary('-'); return;
    case Kind::mul: binary('*'); return;
    case Kind::div: binary('/'); return;
    case Kind::pow:
      out += '(';
      print_node(n->a.get(), out);
      out += fmt::format(")^{}", static_cast<int>(n->value));
      return;
    case Kind::sin: unary("sin"); return;
    case Kind::cos: unary("cos"); return;
    case Kind::exp: unary("exp"); return;
  }
}

bool uses_node(NodeP n, int index) {
  if (!n) return false;
  if (n->kind == Kind::variable) return n->index == index;
  return uses_node(n->a.get(), index) || uses_node(n->b.get(), index);
}

}  // namespace

double Expr::eval(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != n_)
    throw std::invalid_argument(fmt::format("eval: point has {} coordinates, expression expects {}",
                                            point.size(), n_));
  const double v = eval_node(node_.get(), point);
  if (!std::isfinite(v)) throw EvalError("non-finite value");
  return v;
}

std::string Expr::to_string() const {
  std::string out;
  print_node(node_.get(), out);
  return out;
}

bool Expr::uses_variable(int index) const { return uses_node(node_.get(), index); }

Expr Expr::shifted(int offset, int n) const {
  switch (kind()) {
    case Kind::constant: return constant(node_->value, n);
    case Kind::pi: return pi(n);
    case Kind::variable: return variable(node_->index + offset, n);
    default: break;
  }
  Expr a(node_->a, n_);
  Expr b = node_->b ? Expr(node_->b, n_) : Expr();
  Expr sa = a.shifted(offset, n);
  Expr sb = node_->b ? b.shifted(offset, n) : Expr::constant(0.0, n);
  return make(kind(), n, sa, node_->b ? sb : Expr{}, node_->value, node_->index);
}

// Construction helpers fold constants and the neutral elements 0 and 1 so
// that repeated differentiation does not balloon.

Expr operator+(const Expr& a, const Expr& b) {
  const int n = std::max(a.n_, b.n_);
  if (a.is_zero()) return Expr(b.node_, n);
  if (b.is_zero()) return Expr(a.node_, n);
  if (a.kind() == Kind::constant && b.kind() == Kind::constant)
    return Expr::constant(a.constant_value() + b.constant_value(), n);
  return Expr::make(Kind::add, n, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  const int n = std::max(a.n_, b.n_);
  if (b.is_zero()) return Expr(a.node_, n);
  if (a.is_zero()) return -Expr(b.node_, n);
  if (a.kind() == Kind::constant && b.kind() == Kind::constant)
    return Expr::constant(a.constant_value() - b.constant_value(), n);
  return Expr::make(Kind::sub, n, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  const int n = std::max(a.n_, b.n_);
  if (a.is_zero() || b.is_zero()) return Expr::constant(0.0, n);
  if (a.kind() == Kind::constant && a.constant_value() == 1.0) return Expr(b.node_, n);
  if (b.kind() == Kind::constant && b.constant_value() == 1.0) return Expr(a.node_, n);
  if (a.kind() == Kind::constant && b.kind() == Kind::constant)
    return Expr::constant(a.constant_value() * b.constant_value(), n);
  return Expr::make(Kind::mul, n, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  const int n = std::max(a.n_, b.n_);
  if (a.is_zero() && !b.is_zero()) return Expr::constant(0.0, n);
  if (b.kind() == Kind::constant && b.constant_value() == 1.0) return Expr(a.node_, n);
  return Expr::make(Kind::div, n, a, b);
}

Expr operator-(const Expr& a) {
  if (a.kind() == Kind::constant) return Expr::constant(-a.constant_value(), a.n_);
  if (a.kind() == Kind::negate) return Expr(a.node_->a, a.n_);
  return Expr::make(Kind::negate, a.n_, a);
}

Expr operator*(double s, const Expr& a) { return Expr::constant(s, a.n_) * a; }

Expr pow(const Expr& a, int exponent) {
  if (exponent < 0) throw std::invalid_argument("negative exponent");
  if (exponent == 0) return Expr::constant(1.0, a.n_);
  if (exponent == 1) return a;
  if (a.kind() == Kind::constant) return Expr::constant(std::pow(a.constant_value(), exponent), a.n_);
  return Expr::make(Kind::pow, a.n_, a, {}, exponent);
}

Expr sin(const Expr& a) { return Expr::make(Kind::sin, a.n_, a); }
Expr cos(const Expr& a) { return Expr::make(Kind::cos, a.n_, a); }
Expr exp(const Expr& a) { return Expr::make(Kind::exp, a.n_, a); }

Expr Expr::partial(int axis) const {
  if (axis < 0 || axis >= n_) throw std::invalid_argument(fmt::format("partial: axis {} out of range", axis));
  const Expr zero = constant(0.0, n_);
  const Expr a = node_->a ? Expr(node_->a, n_) : zero;
  const Expr b = node_->b ? Expr(node_->b, n_) : zero;
  switch (kind()) {
    case Kind::constant:
    case Kind::pi: return zero;
    case Kind::variable: return constant(node_->index == axis ? 1.0 : 0.0, n_);
    case Kind::negate: return -a.partial(axis);
    case Kind::add: return a.partial(axis) + b.partial(axis);
    case Kind::sub: return a.partial(axis) - b.partial(axis);
    case Kind::mul: return a.partial(axis) * b + a * b.partial(axis);
    case Kind::div: return (a.partial(axis) * b - a * b.partial(axis)) / pow(b, 2);
    case Kind::pow: {
      const int e = static_cast<int>(node_->value);
      return static_cast<double>(e) * pow(a, e - 1) * a.partial(axis);
    }
    case Kind::sin: return cpair::cos(a) * a.partial(axis);
    case Kind::cos: return -(cpair::sin(a) * a.partial(axis));
    case Kind::exp: return *this * a.partial(axis);
  }
  throw std::logic_error("unknown expression node");
}

namespace {

class Parser {
 public:
  Parser(std::string_view s, int n) : s_(s), n_(n) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail(fmt::format("unexpected '{}'", s_[pos_]));
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= s_.size()) fail(fmt::format("expected '{}' but reached end of input", c));
      fail(fmt::format("expected '{}'", c));
    }
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+'))
        e = e + term();
      else if (accept('-'))
        e = e - term();
      else
        return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*'))
        e = e * unary();
      else if (accept('/'))
        e = e / unary();
      else
        return e;
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    while (accept('^')) {
      skip_ws();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) {
        pos_ = start;
        fail("exponent must be a non-negative integer literal");
      }
      if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E')) {
        pos_ = start;
        fail("exponent must be a non-negative integer literal");
      }
      base = pow(base, std::stoi(std::string(s_.substr(start, pos_ - start))));
    }
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail(fmt::format("unexpected '{}'", c));
  }

  Expr number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    const std::string text(s_.substr(start, pos_ - start));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != text.size()) {
      pos_ = start;
      fail(fmt::format("malformed number '{}'", text));
    }
    return Expr::constant(v, n_);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string name(s_.substr(start, pos_ - start));
    if (name == "pi") return Expr::pi(n_);
    if (name == "sin" || name == "cos" || name == "exp") {
      if (!accept('(')) fail(fmt::format("expected '(' after {}", name));
      Expr arg = expr();
      expect(')');
      if (name == "sin") return sin(arg);
      if (name == "cos") return cos(arg);
      return exp(arg);
    }
    if (name.size() > 1 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int idx = std::stoi(name.substr(1));
      if (idx >= n_) {
        pos_ = start;
        fail(fmt::format("variable {} out of range for dimension {}", name, n_));
      }
      return Expr::variable(idx, n_);
    }
    pos_ = start;
    fail(fmt::format("unknown identifier '{}'", name));
  }

  std::string_view s_;
  int n_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, int n) { return Parser(text, n).run(); }

}  // namespace cpair
