#include "wahm/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wahm/error.hpp"

namespace wahm {

enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Atan, Sqrt, Log };

struct Expr::Node {
  Op op;
  double value = 0.0;  // Const
  int axis = 0;        // Var
  Expr a, b;
};

namespace {

std::shared_ptr<const Expr::Node> make(Op op, double value = 0.0, int axis = 0) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->value = value;
  n->axis = axis;
  return n;
}

Expr node(Op op, const Expr& a, const Expr& b = Expr()) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->a = a;
  n->b = b;
  return Expr(std::shared_ptr<const Expr::Node>(std::move(n)));
}

struct FunctionName {
  std::string_view name;
  Op op;
};
constexpr FunctionName kFunctions[] = {{"sin", Op::Sin},   {"cos", Op::Cos},   {"exp", Op::Exp},
                                       {"atan", Op::Atan}, {"sqrt", Op::Sqrt}, {"log", Op::Log}};

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Expr parse() {
    Expr e = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, what + " at position " + std::to_string(pos_) + " in \"" + std::string(s_) + "\"");
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr sum() {
    Expr e = product();
    while (true) {
      if (accept('+')) e = e + product();
      else if (accept('-')) e = e - product();
      else return e;
    }
  }
  Expr product() {
    Expr e = unary();
    while (true) {
      if (accept('*')) e = e * unary();
      else if (accept('/')) e = e / unary();
      else return e;
    }
  }
  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }
  Expr power() {
    Expr base = primary();
    if (accept('^')) return pow(base, unary());
    return base;
  }
  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (accept('(')) {
      Expr e = sum();
      if (!accept(')')) fail("missing ')'");
      return e;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t end = pos_;
      while (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) ++end;
      const std::string_view word = s_.substr(pos_, end - pos_);
      pos_ = end;
      if (word == "x") return Expr::variable(0);
      if (word == "y") return Expr::variable(1);
      if (word == "z") return Expr::variable(2);
      if (word == "pi") return Expr::constant(std::numbers::pi);
      for (const auto& f : kFunctions) {
        if (word == f.name) {
          if (!accept('(')) fail("expected '(' after " + std::string(word));
          Expr arg = sum();
          if (!accept(')')) fail("missing ')'");
          return call(word, arg);
        }
      }
      fail("unknown identifier '" + std::string(word) + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
  Expr number() {
    const std::string rest(s_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("bad number");
    }
    pos_ += used;
    return Expr::constant(v);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr::Expr() = default;

Expr Expr::parse(std::string_view text) { return Parser(text).parse(); }
Expr Expr::constant(double v) { return Expr(make(Op::Const, v)); }
Expr Expr::variable(int axis) {
  if (axis < 0 || axis >= kMaxDim) throw Error(ErrorCode::InvalidArgument, "variable axis out of range");
  return Expr(make(Op::Var, 0.0, axis));
}

bool Expr::is_constant(double* value) const {
  if (!node_) {
    if (value) *value = 0.0;
    return true;
  }
  if (node_->op != Op::Const) return false;
  if (value) *value = node_->value;
  return true;
}

namespace {

bool is_value(const Expr& e, double v) {
  double c;
  return e.is_constant(&c) && c == v;
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  double x, y;
  if (a.is_constant(&x) && b.is_constant(&y)) return Expr::constant(x + y);
  if (is_value(a, 0.0)) return b;
  if (is_value(b, 0.0)) return a;
  return node(Op::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  double x, y;
  if (a.is_constant(&x) && b.is_constant(&y)) return Expr::constant(x - y);
  if (is_value(b, 0.0)) return a;
  if (is_value(a, 0.0)) return -b;
  return node(Op::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  double x, y;
  if (a.is_constant(&x) && b.is_constant(&y)) return Expr::constant(x * y);
  if (is_value(a, 0.0) || is_value(b, 0.0)) return Expr::constant(0.0);
  if (is_value(a, 1.0)) return b;
  if (is_value(b, 1.0)) return a;
  return node(Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  double x, y;
  if (a.is_constant(&x) && b.is_constant(&y) && y != 0.0) return Expr::constant(x / y);
  if (is_value(a, 0.0)) return Expr::constant(0.0);
  if (is_value(b, 1.0)) return a;
  return node(Op::Div, a, b);
}

Expr operator-(const Expr& a) {
  double x;
  if (a.is_constant(&x)) return Expr::constant(-x);
  return node(Op::Neg, a);
}

Expr pow(const Expr& a, const Expr& b) {
  double x, y;
  if (a.is_constant(&x) && b.is_constant(&y)) return Expr::constant(std::pow(x, y));
  if (is_value(b, 0.0)) return Expr::constant(1.0);
  if (is_value(b, 1.0)) return a;
  return node(Op::Pow, a, b);
}

Expr call(std::string_view fn, const Expr& a) {
  for (const auto& f : kFunctions) {
    if (fn != f.name) continue;
    double x;
    if (a.is_constant(&x)) {
      switch (f.op) {
        case Op::Sin: return Expr::constant(std::sin(x));
        case Op::Cos: return Expr::constant(std::cos(x));
        case Op::Exp: return Expr::constant(std::exp(x));
        case Op::Atan: return Expr::constant(std::atan(x));
        case Op::Sqrt: return Expr::constant(std::sqrt(x));
        case Op::Log: return Expr::constant(std::log(x));
        default: break;
      }
    }
    return node(f.op, a);
  }
  throw Error(ErrorCode::ParseError, "unknown function " + std::string(fn));
}

double Expr::operator()(const Point& x) const {
  if (!node_) return 0.0;
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return x[n.axis];
    case Op::Add: return n.a(x) + n.b(x);
    case Op::Sub: return n.a(x) - n.b(x);
    case Op::Mul: return n.a(x) * n.b(x);
    case Op::Div: return n.a(x) / n.b(x);
    case Op::Neg: return -n.a(x);
    case Op::Pow: {
      double e;
      if (n.b.is_constant(&e) && e == std::round(e) && std::abs(e) <= 16) {
        const double base = n.a(x);
        double r = 1.0;
        for (int i = 0; i < std::abs(static_cast<int>(e)); ++i) r *= base;
        return e < 0 ? 1.0 / r : r;
      }
      return std::pow(n.a(x), n.b(x));
    }
    case Op::Sin: return std::sin(n.a(x));
    case Op::Cos: return std::cos(n.a(x));
    case Op::Exp: return std::exp(n.a(x));
    case Op::Atan: return std::atan(n.a(x));
    case Op::Sqrt: return std::sqrt(n.a(x));
    case Op::Log: return std::log(n.a(x));
  }
  return 0.0;
}

Expr Expr::diff(int axis) const {
  if (!node_) return {};
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const: return constant(0.0);
    case Op::Var: return constant(n.axis == axis ? 1.0 : 0.0);
    case Op::Add: return n.a.diff(axis) + n.b.diff(axis);
    case Op::Sub: return n.a.diff(axis) - n.b.diff(axis);
    case Op::Mul: return n.a.diff(axis) * n.b + n.a * n.b.diff(axis);
    case Op::Div: return (n.a.diff(axis) * n.b - n.a * n.b.diff(axis)) / (n.b * n.b);
    case Op::Neg: return -n.a.diff(axis);
    case Op::Pow: {
      double e;
      if (n.b.is_constant(&e)) return constant(e) * pow(n.a, constant(e - 1.0)) * n.a.diff(axis);
      // d(u^v) = u^v (v' log u + v u' / u)
      return *this * (n.b.diff(axis) * call("log", n.a) + n.b * n.a.diff(axis) / n.a);
    }
    case Op::Sin: return call("cos", n.a) * n.a.diff(axis);
    case Op::Cos: return -(call("sin", n.a) * n.a.diff(axis));
    case Op::Exp: return *this * n.a.diff(axis);
    case Op::Atan: return n.a.diff(axis) / (constant(1.0) + n.a * n.a);
    case Op::Sqrt: return n.a.diff(axis) / (constant(2.0) * *this);
    case Op::Log: return n.a.diff(axis) / n.a;
  }
  return constant(0.0);
}

Expr Expr::derivative(const Index& alpha) const {
  Expr e = *this;
  for (int i = 0; i < kMaxDim; ++i) {
    for (int r = 0; r < alpha[i]; ++r) e = e.diff(i);
  }
  return e;
}

std::string Expr::to_string() const {
  if (!node_) return "0";
  const Node& n = *node_;
  auto bin = [&](const char* op) { return "(" + n.a.to_string() + op + n.b.to_string() + ")"; };
  switch (n.op) {
    case Op::Const: {
      std::ostringstream os;
      os.precision(17);
      os << n.value;
      return os.str();
    }
    case Op::Var: return std::string(1, "xyz"[n.axis]);
    case Op::Add: return bin(" + ");
    case Op::Sub: return bin(" - ");
    case Op::Mul: return bin(" * ");
    case Op::Div: return bin(" / ");
    case Op::Neg: return "(-" + n.a.to_string() + ")";
    case Op::Pow: return bin("^");
    default: break;
  }
  for (const auto& f : kFunctions) {
    if (f.op == n.op) return std::string(f.name) + "(" + n.a.to_string() + ")";
  }
  return "?";
}

}  // namespace wahm
