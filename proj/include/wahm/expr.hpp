#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "wahm/cell.hpp"

namespace wahm {

/// Arithmetic expression in x, y, z with exact symbolic differentiation.
///
/// Grammar: + - * / ^, unary minus, parentheses, numbers, the constant pi, and the functions
/// sin cos exp atan sqrt log. `^` is right associative and binds tighter than unary minus.
class Expr {
 public:
  Expr();  ///< the constant 0
  static Expr parse(std::string_view text);
  static Expr constant(double v);
  static Expr variable(int axis);

  double operator()(const Point& x) const;
  Expr diff(int axis) const;
  /// Mixed partial derivative D^alpha.
  Expr derivative(const Index& alpha) const;
  bool is_constant(double* value = nullptr) const;
  std::string to_string() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& a, const Expr& b);
  friend Expr call(std::string_view fn, const Expr& a);

  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<const Node> node_;
};

}  // namespace wahm
