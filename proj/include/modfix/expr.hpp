#pragma once

// A small expression language for maps, modulars and edge
// predicates in experiment configs.
//
//   expr     := or
//   or       := and (("||" | "or") and)*
//   and      := cmp (("&&" | "and") cmp)*
//   cmp      := sum [("<=" | "<" | "=" | "==" | "!=" | ">=" | ">") sum]
//   sum      := term (("+" | "-") term)*
//   term     := unary (("*" | "/") unary)*
//   unary    := "-" unary | power
//   power    := primary ("^" INTEGER)*
//   primary  := NUMBER | IDENT | "(" expr ")" | piecewise
//   piecewise:= "piecewise" "(" branch ("," branch)* ")"
//   branch   := ("else" | expr) "->" expr
//
// Identifiers are the coordinates of the argument point: `x` (dimension 1)
// or `x1`..`xd`; predicates additionally see `y` / `y1`..`yd`. Numbers are
// decimal literals and evaluate exactly on the rational backend.

#include <cctype>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "modfix/error.hpp"
#include "modfix/point.hpp"
#include "modfix/scalar.hpp"

namespace modfix::expr {

enum class Op { add, sub, mul, div, pow, neg, lt, le, eq, ne, ge, gt, logical_and, logical_or };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Number {
  std::string text;
  Rational value;
};

struct Variable {
  std::string name;
  bool second = false;     // y rather than x
  std::size_t index = 0;   // coordinate, 0-based
};

struct Unary {
  Op op;
  NodePtr operand;
};

struct Binary {
  Op op;
  NodePtr lhs;
  NodePtr rhs;
};

struct Branch {
  NodePtr guard;  // null for `else`
  NodePtr value;
};

struct Piecewise {
  std::vector<Branch> branches;
};

struct Node {
  std::variant<Number, Variable, Unary, Binary, Piecewise> v;
  std::size_t pos = 0;
};

enum class ValueKind { number, boolean };

/// What an expression is for: decides the visible identifiers and the
/// required result kind.
struct Context {
  std::size_t dimension = 1;
  bool two_points = false;  // y / y1..yd visible
  ValueKind result = ValueKind::number;

  /// Coordinate of a map, or a modular: numeric in x.
  static Context function(std::size_t d) { return {d, false, ValueKind::number}; }
  /// Piecewise guard: boolean in x.
  static Context guard(std::size_t d) { return {d, false, ValueKind::boolean}; }
  /// Edge or order predicate: boolean in x and y.
  static Context predicate(std::size_t d) { return {d, true, ValueKind::boolean}; }
};

class Expr {
 public:
  Expr(std::string source, NodePtr root, Context ctx)
      : source_(std::move(source)), root_(std::move(root)), ctx_(ctx) {}

  const std::string& source() const noexcept { return source_; }
  const Node& root() const noexcept { return *root_; }
  const Context& context() const noexcept { return ctx_; }

 private:
  std::string source_;
  NodePtr root_;
  Context ctx_;
};

namespace detail {

inline std::string_view op_name(Op op) {
  switch (op) {
    case Op::add: return "Add";
    case Op::sub: return "Sub";
    case Op::mul: return "Mul";
    case Op::div: return "Div";
    case Op::pow: return "Pow";
    case Op::neg: return "Neg";
    case Op::lt: return "Lt";
    case Op::le: return "Le";
    case Op::eq: return "Eq";
    case Op::ne: return "Ne";
    case Op::ge: return "Ge";
    case Op::gt: return "Gt";
    case Op::logical_and: return "And";
    case Op::logical_or: return "Or";
  }
  return "?";
}

enum class Tok { number, ident, op, lparen, rparen, comma, arrow, end };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_digit = [&](std::size_t j) { return j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])); };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_digit(i) || (c == '.' && is_digit(i + 1))) {
      while (is_digit(i)) ++i;
      if (i < src.size() && src[i] == '.') {
        ++i;
        while (is_digit(i)) ++i;
      }
      if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
        if (is_digit(j)) {
          i = j;
          while (is_digit(i)) ++i;
        }
      }
      out.push_back({Tok::number, std::string(src.substr(start, i - start)), start});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
      out.push_back({Tok::ident, std::string(src.substr(start, i - start)), start});
      continue;
    }
    auto two = src.substr(i, 2);
    if (two == "->") {
      out.push_back({Tok::arrow, "->", start});
      i += 2;
      continue;
    }
    if (two == "<=" || two == ">=" || two == "==" || two == "!=" || two == "&&" || two == "||") {
      out.push_back({Tok::op, std::string(two), start});
      i += 2;
      continue;
    }
    switch (c) {
      case '(': out.push_back({Tok::lparen, "(", start}); break;
      case ')': out.push_back({Tok::rparen, ")", start}); break;
      case ',': out.push_back({Tok::comma, ",", start}); break;
      case '+': case '-': case '*': case '/': case '^': case '<': case '>': case '=':
        out.push_back({Tok::op, std::string(1, c), start});
        break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
    ++i;
  }
  out.push_back({Tok::end, "", src.size()});
  return out;
}

class Parser {
 public:
  Parser(std::string_view src, Context ctx) : tokens_(tokenize(src)), ctx_(ctx) {}

  NodePtr parse() {
    NodePtr root = parse_or();
    if (peek().kind != Tok::end) throw ParseError("unexpected '" + peek().text + "'", peek().pos);
    return root;
  }

 private:
  const Token& peek() const { return tokens_[at_]; }
  Token take() { return tokens_[at_++]; }

  bool accept_op(std::string_view text) {
    if (peek().kind == Tok::op && peek().text == text) {
      ++at_;
      return true;
    }
    return false;
  }

  bool accept_word(std::string_view word) {
    if (peek().kind == Tok::ident && peek().text == word) {
      ++at_;
      return true;
    }
    return false;
  }

  void expect(Tok kind, std::string_view what) {
    if (peek().kind != kind) throw ParseError("expected " + std::string(what), peek().pos);
    ++at_;
  }

  static NodePtr make(std::size_t pos, auto&& value) {
    return std::make_shared<const Node>(Node{std::forward<decltype(value)>(value), pos});
  }

  NodePtr parse_or() {
    NodePtr lhs = parse_and();
    for (;;) {
      std::size_t pos = peek().pos;
      if (!accept_op("||") && !accept_word("or")) return lhs;
      lhs = make(pos, Binary{Op::logical_or, lhs, parse_and()});
    }
  }

  NodePtr parse_and() {
    NodePtr lhs = parse_cmp();
    for (;;) {
      std::size_t pos = peek().pos;
      if (!accept_op("&&") && !accept_word("and")) return lhs;
      lhs = make(pos, Binary{Op::logical_and, lhs, parse_cmp()});
    }
  }

  NodePtr parse_cmp() {
    NodePtr lhs = parse_sum();
    if (peek().kind != Tok::op) return lhs;
    static constexpr std::pair<std::string_view, Op> table[] = {
        {"<=", Op::le}, {"<", Op::lt}, {"=", Op::eq}, {"==", Op::eq},
        {"!=", Op::ne}, {">=", Op::ge}, {">", Op::gt}};
    for (const auto& [text, op] : table) {
      if (peek().text == text) {
        std::size_t pos = take().pos;
        return make(pos, Binary{op, lhs, parse_sum()});
      }
    }
    return lhs;
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_term();
    for (;;) {
      std::size_t pos = peek().pos;
      if (accept_op("+")) lhs = make(pos, Binary{Op::add, lhs, parse_term()});
      else if (accept_op("-")) lhs = make(pos, Binary{Op::sub, lhs, parse_term()});
      else return lhs;
    }
  }

  NodePtr parse_term() {
    NodePtr lhs = parse_unary();
    for (;;) {
      std::size_t pos = peek().pos;
      if (accept_op("*")) lhs = make(pos, Binary{Op::mul, lhs, parse_unary()});
      else if (accept_op("/")) lhs = make(pos, Binary{Op::div, lhs, parse_unary()});
      else return lhs;
    }
  }

  NodePtr parse_unary() {
    std::size_t pos = peek().pos;
    if (accept_op("-")) return make(pos, Unary{Op::neg, parse_unary()});
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    for (;;) {
      std::size_t pos = peek().pos;
      if (!accept_op("^")) return base;
      if (peek().kind != Tok::number) throw ParseError("exponent must be a nonnegative integer literal", peek().pos);
      Token t = take();
      Rational v = parse_rational(t.text);
      if (boost::multiprecision::denominator(v) != 1 || v > 4096)
        throw ParseError("exponent must be a nonnegative integer literal", t.pos);
      base = make(pos, Binary{Op::pow, base, make(t.pos, Number{t.text, v})});
    }
  }

  NodePtr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::number: {
        Token n = take();
        Rational v;
        try {
          v = parse_rational(n.text);
        } catch (const DomainError&) {
          throw ParseError("malformed number '" + n.text + "'", n.pos);
        }
        return make(n.pos, Number{n.text, std::move(v)});
      }
      case Tok::lparen: {
        take();
        NodePtr inner = parse_or();
        expect(Tok::rparen, "')'");
        return inner;
      }
      case Tok::ident: {
        Token id = take();
        if (id.text == "piecewise") return parse_piecewise(id.pos);
        return make(id.pos, resolve(id));
      }
      case Tok::end: throw ParseError("expected expression", t.pos);
      default: throw ParseError("unexpected '" + t.text + "'", t.pos);
    }
  }

  NodePtr parse_piecewise(std::size_t pos) {
    expect(Tok::lparen, "'(' after piecewise");
    Piecewise pw;
    for (;;) {
      NodePtr guard;
      std::size_t branch_pos = peek().pos;
      if (!accept_word("else")) guard = parse_or();
      else if (!pw.branches.empty() && !pw.branches.back().guard)
        throw ParseError("duplicate else branch", branch_pos);
      expect(Tok::arrow, "'->'");
      pw.branches.push_back({guard, parse_or()});
      if (peek().kind == Tok::comma) {
        take();
        continue;
      }
      expect(Tok::rparen, "')' closing piecewise");
      break;
    }
    return make(pos, std::move(pw));
  }

  Variable resolve(const Token& id) const {
    const std::string& s = id.text;
    if (s.empty() || (s[0] != 'x' && s[0] != 'y')) throw ParseError("unknown identifier '" + s + "'", id.pos);
    const bool second = s[0] == 'y';
    if (second && !ctx_.two_points) throw ParseError("unknown identifier '" + s + "'", id.pos);
    if (s.size() == 1) {
      if (ctx_.dimension != 1)
        throw ParseError("use indexed coordinates (" + std::string(1, s[0]) + "1..) in dimension " +
                             std::to_string(ctx_.dimension),
                         id.pos);
      return {s, second, 0};
    }
    std::size_t index = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(s[i]))) throw ParseError("unknown identifier '" + s + "'", id.pos);
      index = index * 10 + static_cast<std::size_t>(s[i] - '0');
      if (index > ctx_.dimension) break;
    }
    if (index < 1 || index > ctx_.dimension) throw ParseError("unknown identifier '" + s + "'", id.pos);
    return {s, second, index - 1};
  }

  std::vector<Token> tokens_;
  std::size_t at_ = 0;
  Context ctx_;
};

inline ValueKind infer(const Node& n) {
  return std::visit(
      [&](const auto& v) -> ValueKind {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Number> || std::is_same_v<V, Variable>) {
          return ValueKind::number;
        } else if constexpr (std::is_same_v<V, Unary>) {
          if (infer(*v.operand) != ValueKind::number) throw ParseError("negation needs a number", n.pos);
          return ValueKind::number;
        } else if constexpr (std::is_same_v<V, Binary>) {
          ValueKind l = infer(*v.lhs);
          ValueKind r = infer(*v.rhs);
          switch (v.op) {
            case Op::logical_and:
            case Op::logical_or:
              if (l != ValueKind::boolean || r != ValueKind::boolean)
                throw ParseError("logical operator needs comparisons", n.pos);
              return ValueKind::boolean;
            case Op::lt: case Op::le: case Op::eq: case Op::ne: case Op::ge: case Op::gt:
              if (l != ValueKind::number || r != ValueKind::number)
                throw ParseError("comparison needs numbers", n.pos);
              return ValueKind::boolean;
            default:
              if (l != ValueKind::number || r != ValueKind::number)
                throw ParseError("arithmetic needs numbers", n.pos);
              return ValueKind::number;
          }
        } else {
          for (const auto& br : v.branches) {
            if (br.guard && infer(*br.guard) != ValueKind::boolean)
              throw ParseError("piecewise guard must be a comparison", br.guard->pos);
            if (infer(*br.value) != ValueKind::number) throw ParseError("piecewise value must be a number", br.value->pos);
          }
          return ValueKind::number;
        }
      },
      n.v);
}

inline void debug(const Node& n, std::string& out) {
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Number>) {
          out += "Num " + v.text;
        } else if constexpr (std::is_same_v<V, Variable>) {
          out += "Var " + v.name;
        } else if constexpr (std::is_same_v<V, Unary>) {
          out += "Neg(";
          debug(*v.operand, out);
          out += ")";
        } else if constexpr (std::is_same_v<V, Binary>) {
          out += std::string(op_name(v.op)) + "(";
          debug(*v.lhs, out);
          out += ", ";
          debug(*v.rhs, out);
          out += ")";
        } else {
          out += "Piecewise[";
          for (std::size_t i = 0; i < v.branches.size(); ++i) {
            if (i) out += "; ";
            if (v.branches[i].guard) debug(*v.branches[i].guard, out);
            else out += "Else";
            out += " -> ";
            debug(*v.branches[i].value, out);
          }
          out += "]";
        }
      },
      n.v);
}

template <Scalar T>
struct Env {
  const Point<T>& x;
  const Point<T>* y = nullptr;
};

template <Scalar T>
bool eval_bool(const Node& n, const Env<T>& env);

template <Scalar T>
T eval_number(const Node& n, const Env<T>& env) {
  return std::visit(
      [&](const auto& v) -> T {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Number>) {
          return from_rational<T>(v.value);
        } else if constexpr (std::is_same_v<V, Variable>) {
          const Point<T>& p = v.second ? *env.y : env.x;
          if (v.index >= p.dimension()) throw DimensionError("expression reads coordinate " + v.name);
          return p[v.index];
        } else if constexpr (std::is_same_v<V, Unary>) {
          return -eval_number<T>(*v.operand, env);
        } else if constexpr (std::is_same_v<V, Binary>) {
          T l = eval_number<T>(*v.lhs, env);
          if (v.op == Op::pow) {
            const auto& e = std::get<Number>(v.rhs->v);
            return pow_int(l, static_cast<unsigned>(boost::multiprecision::numerator(e.value)));
          }
          T r = eval_number<T>(*v.rhs, env);
          switch (v.op) {
            case Op::add: return l + r;
            case Op::sub: return l - r;
            case Op::mul: return l * r;
            case Op::div:
              if (r == T(0)) throw DomainError("division by zero at position " + std::to_string(n.pos));
              return l / r;
            default: throw DomainError("not a numeric operator");
          }
        } else {
          for (const auto& br : v.branches)
            if (!br.guard || eval_bool<T>(*br.guard, env)) return eval_number<T>(*br.value, env);
          throw DomainError("no piecewise branch matched at position " + std::to_string(n.pos));
        }
      },
      n.v);
}

template <Scalar T>
bool eval_bool(const Node& n, const Env<T>& env) {
  const auto* b = std::get_if<Binary>(&n.v);
  if (!b) throw DomainError("not a boolean expression");
  if (b->op == Op::logical_and) return eval_bool<T>(*b->lhs, env) && eval_bool<T>(*b->rhs, env);
  if (b->op == Op::logical_or) return eval_bool<T>(*b->lhs, env) || eval_bool<T>(*b->rhs, env);
  T l = eval_number<T>(*b->lhs, env);
  T r = eval_number<T>(*b->rhs, env);
  switch (b->op) {
    case Op::lt: return l < r;
    case Op::le: return l <= r;
    case Op::eq: return l == r;
    case Op::ne: return l != r;
    case Op::ge: return l >= r;
    case Op::gt: return l > r;
    default: throw DomainError("not a comparison");
  }
}

}  // namespace detail

/// Parses and type-checks `src`. Throws ParseError with a 0-based position.
inline Expr parse_expression(std::string_view src, Context ctx = {}) {
  NodePtr root = detail::Parser(src, ctx).parse();
  ValueKind kind = detail::infer(*root);
  if (kind != ctx.result)
    throw ParseError(ctx.result == ValueKind::boolean ? "expected a comparison" : "expression must be numeric",
                     root->pos);
  return Expr(std::string(src), std::move(root), ctx);
}

/// Structural dump, e.g. "Div(Var x, Num 3)".
inline std::string debug_string(const Expr& e) {
  std::string out;
  detail::debug(e.root(), out);
  return out;
}

template <Scalar T>
T evaluate(const Expr& e, const Point<T>& x) {
  return detail::eval_number<T>(e.root(), {x, nullptr});
}

template <Scalar T>
bool evaluate_guard(const Expr& e, const Point<T>& x) {
  return detail::eval_bool<T>(e.root(), {x, nullptr});
}

template <Scalar T>
bool evaluate_predicate(const Expr& e, const Point<T>& x, const Point<T>& y) {
  return detail::eval_bool<T>(e.root(), {x, &y});
}

}  // namespace modfix::expr
