#pragma once

// Small expression language for authoring scalar fields over (x, y, t).
// Recursive descent, standard precedence: ^ (right assoc) > unary - > * / > + -.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bandpat/band.hpp"  // detail::mix64 / to_unit

namespace bandpat {

struct ParseError : std::runtime_error {
  std::size_t offset;
  ParseError(std::size_t off, const std::string& msg)
      : std::runtime_error(msg + " (at offset " + std::to_string(off) + ")"), offset(off) {}
};

enum class BinOp { Add, Sub, Mul, Div, Pow };
enum class Func { Sin, Cos, Sqrt, Abs, Exp, Log, Min, Max, Atan2, Hypot, Vnoise };

struct Expr {
  enum class Kind { Number, Variable, Negate, Binary, Call } kind = Kind::Number;
  double number = 0.0;
  int variable = 0;  // 0 = x, 1 = y, 2 = t
  BinOp op = BinOp::Add;
  Func func = Func::Sin;
  std::vector<std::unique_ptr<Expr>> args;
};

using ExprPtr = std::unique_ptr<Expr>;

struct FieldProgram {
  std::shared_ptr<const Expr> root;  // immutable after parse
  bool valid() const { return root != nullptr; }
};

// Seeded value noise: hashed lattice corners in [0,1), bilinear blend.
inline double value_noise(double x, double y, std::int64_t seed) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const std::int64_t ix = static_cast<std::int64_t>(fx);
  const std::int64_t iy = static_cast<std::int64_t>(fy);
  const double tx = x - fx;
  const double ty = y - fy;
  auto corner = [&](std::int64_t cx, std::int64_t cy) {
    std::uint64_t h = detail::mix64(static_cast<std::uint64_t>(seed));
    h = detail::mix64(h ^ static_cast<std::uint64_t>(cx));
    h = detail::mix64(h ^ static_cast<std::uint64_t>(cy));
    return detail::to_unit(h);
  };
  const double c00 = corner(ix, iy);
  const double c10 = corner(ix + 1, iy);
  const double c01 = corner(ix, iy + 1);
  const double c11 = corner(ix + 1, iy + 1);
  const double bottom = c00 + (c10 - c00) * tx;
  const double top = c01 + (c11 - c01) * tx;
  return bottom + (top - bottom) * ty;
}

inline double evaluate(const Expr& node, double x, double y, double t) {
  switch (node.kind) {
    case Expr::Kind::Number:
      return node.number;
    case Expr::Kind::Variable:
      return node.variable == 0 ? x : node.variable == 1 ? y : t;
    case Expr::Kind::Negate:
      return -evaluate(*node.args[0], x, y, t);
    case Expr::Kind::Binary: {
      const double a = evaluate(*node.args[0], x, y, t);
      const double b = evaluate(*node.args[1], x, y, t);
      switch (node.op) {
        case BinOp::Add: return a + b;
        case BinOp::Sub: return a - b;
        case BinOp::Mul: return a * b;
        case BinOp::Div: return a / b;
        case BinOp::Pow: return std::pow(a, b);
      }
      return 0.0;
    }
    case Expr::Kind::Call: {
      switch (node.func) {
        case Func::Sin: return std::sin(evaluate(*node.args[0], x, y, t));
        case Func::Cos: return std::cos(evaluate(*node.args[0], x, y, t));
        case Func::Sqrt: return std::sqrt(evaluate(*node.args[0], x, y, t));
        case Func::Abs: return std::abs(evaluate(*node.args[0], x, y, t));
        case Func::Exp: return std::exp(evaluate(*node.args[0], x, y, t));
        case Func::Log: return std::log(evaluate(*node.args[0], x, y, t));
        case Func::Min:
          return std::fmin(evaluate(*node.args[0], x, y, t), evaluate(*node.args[1], x, y, t));
        case Func::Max:
          return std::fmax(evaluate(*node.args[0], x, y, t), evaluate(*node.args[1], x, y, t));
        case Func::Atan2:
          return std::atan2(evaluate(*node.args[0], x, y, t), evaluate(*node.args[1], x, y, t));
        case Func::Hypot:
          return std::hypot(evaluate(*node.args[0], x, y, t), evaluate(*node.args[1], x, y, t));
        case Func::Vnoise: {
          const double sx = evaluate(*node.args[0], x, y, t);
          const double sy = evaluate(*node.args[1], x, y, t);
          const double seed = evaluate(*node.args[2], x, y, t);
          return value_noise(sx, sy, std::llround(seed));
        }
      }
      return 0.0;
    }
  }
  return 0.0;
}

inline double evaluate(const FieldProgram& prog, double x, double y, double t) {
  return evaluate(*prog.root, x, y, t);
}

namespace detail {

struct FuncInfo {
  std::string_view name;
  Func func;
  int arity;
};

inline constexpr FuncInfo kFuncs[] = {
    {"sin", Func::Sin, 1},     {"cos", Func::Cos, 1},     {"sqrt", Func::Sqrt, 1},
    {"abs", Func::Abs, 1},     {"exp", Func::Exp, 1},     {"log", Func::Log, 1},
    {"min", Func::Min, 2},     {"max", Func::Max, 2},     {"atan2", Func::Atan2, 2},
    {"hypot", Func::Hypot, 2}, {"vnoise", Func::Vnoise, 3},
};

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : text_(text) {}

  ExprPtr parse() {
    skip_space();
    ExprPtr e = parse_sum();
    skip_space();
    if (pos_ != text_.size()) throw ParseError(pos_, "trailing input");
    return e;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }
  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      skip_space();
      return true;
    }
    return false;
  }
  void expect(char c, const char* what) {
    if (!accept(c)) throw ParseError(pos_, std::string("expected ") + what);
  }

  ExprPtr parse_sum() {
    ExprPtr e = parse_product();
    for (;;) {
      if (accept('+'))
        e = make_binary(BinOp::Add, std::move(e), parse_product());
      else if (accept('-'))
        e = make_binary(BinOp::Sub, std::move(e), parse_product());
      else
        return e;
    }
  }

  ExprPtr parse_product() {
    ExprPtr e = parse_factor();
    for (;;) {
      if (accept('*'))
        e = make_binary(BinOp::Mul, std::move(e), parse_factor());
      else if (accept('/'))
        e = make_binary(BinOp::Div, std::move(e), parse_factor());
      else
        return e;
    }
  }

  ExprPtr parse_factor() {
    if (accept('-')) {
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::Negate;
      node->args.push_back(parse_factor());
      return node;
    }
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (accept('^')) return make_binary(BinOp::Pow, std::move(base), parse_factor());
    return base;
  }

  ExprPtr parse_primary() {
    skip_space();
    if (at_end()) throw ParseError(pos_, "unexpected end of expression");
    const char c = peek();
    if (c == '(') {
      ++pos_;
      skip_space();
      ExprPtr e = parse_sum();
      expect(')', "')'");
      return e;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_') return parse_name();
    throw ParseError(pos_, std::string("unexpected character '") + c + "'");
  }

  ExprPtr parse_number() {
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc()) throw ParseError(pos_, "malformed number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    skip_space();
    auto node = std::make_unique<Expr>();
    node->kind = Expr::Kind::Number;
    node->number = value;
    return node;
  }

  ExprPtr parse_name() {
    const std::size_t start = pos_;
    while (!at_end()) {
      const char c = peek();
      if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_')
        ++pos_;
      else
        break;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    skip_space();
    if (name == "x" || name == "y" || name == "t") {
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::Variable;
      node->variable = name == "x" ? 0 : name == "y" ? 1 : 2;
      return node;
    }
    for (const FuncInfo& f : kFuncs) {
      if (name != f.name) continue;
      expect('(', "'(' after function name");
      auto node = std::make_unique<Expr>();
      node->kind = Expr::Kind::Call;
      node->func = f.func;
      node->args.push_back(parse_sum());
      while (accept(',')) node->args.push_back(parse_sum());
      if (static_cast<int>(node->args.size()) != f.arity)
        throw ParseError(start, std::string(f.name) + " expects " + std::to_string(f.arity) +
                                    " argument(s), got " + std::to_string(node->args.size()));
      expect(')', "')'");
      return node;
    }
    throw ParseError(start, "unknown identifier '" + std::string(name) + "'");
  }

  static ExprPtr make_binary(BinOp op, ExprPtr a, ExprPtr b) {
    auto node = std::make_unique<Expr>();
    node->kind = Expr::Kind::Binary;
    node->op = op;
    node->args.push_back(std::move(a));
    node->args.push_back(std::move(b));
    return node;
  }
};

}  // namespace detail

inline FieldProgram parse_expression(std::string_view text) {
  detail::ExprParser parser(text);
  return FieldProgram{std::shared_ptr<const Expr>(parser.parse().release())};
}

// Fully parenthesized form; parse(print(e)) reproduces the structure exactly.
inline void print_expression(const Expr& node, std::string& out) {
  switch (node.kind) {
    case Expr::Kind::Number: {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", node.number);
      out += buf;
      return;
    }
    case Expr::Kind::Variable:
      out += node.variable == 0 ? 'x' : node.variable == 1 ? 'y' : 't';
      return;
    case Expr::Kind::Negate:
      out += "(-";
      print_expression(*node.args[0], out);
      out += ')';
      return;
    case Expr::Kind::Binary: {
      const char* ops[] = {"+", "-", "*", "/", "^"};
      out += '(';
      print_expression(*node.args[0], out);
      out += ops[static_cast<int>(node.op)];
      print_expression(*node.args[1], out);
      out += ')';
      return;
    }
    case Expr::Kind::Call: {
      for (const auto& f : detail::kFuncs)
        if (f.func == node.func) {
          out += f.name;
          break;
        }
      out += '(';
      for (std::size_t i = 0; i < node.args.size(); ++i) {
        if (i) out += ',';
        print_expression(*node.args[i], out);
      }
      out += ')';
      return;
    }
  }
}

inline std::string print_expression(const FieldProgram& prog) {
  std::string out;
  print_expression(*prog.root, out);
  return out;
}

inline bool expr_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::Number: return a.number == b.number;
    case Expr::Kind::Variable: return a.variable == b.variable;
    case Expr::Kind::Negate: return expr_equal(*a.args[0], *b.args[0]);
    case Expr::Kind::Binary:
      return a.op == b.op && expr_equal(*a.args[0], *b.args[0]) && expr_equal(*a.args[1], *b.args[1]);
    case Expr::Kind::Call: {
      if (a.func != b.func || a.args.size() != b.args.size()) return false;
      for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!expr_equal(*a.args[i], *b.args[i])) return false;
      return true;
    }
  }
  return false;
}

inline bool expr_equal(const FieldProgram& a, const FieldProgram& b) {
  if (!a.valid() || !b.valid()) return a.valid() == b.valid();
  return expr_equal(*a.root, *b.root);
}

}  // namespace bandpat
