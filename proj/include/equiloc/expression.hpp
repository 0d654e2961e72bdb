#pragma once

// Small arithmetic expression language for scenario files.
//
//   expr   := term (('+' | '-') term)*
//   term   := unary (('*' | '/') unary)*
//   unary  := ('+' | '-') unary | power
//   power  := primary (('^' | '**') unary)?
//   primary:= number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Names resolve to chart coordinates, scenario parameters, or the constants
// pi, e and i (imaginary unit). Functions: sin cos tan exp log sqrt asin acos
// atan atan2 sinh cosh pow. Constant subtrees are folded at parse time.

#include <cctype>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "equiloc/error.hpp"
#include "equiloc/forms.hpp"
#include "equiloc/jet.hpp"

namespace equiloc {

class Expression {
  enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call };
  enum class Fn { Sin, Cos, Tan, Exp, Log, Sqrt, Asin, Acos, Atan, Atan2, Sinh, Cosh, Pow };

  struct Node {
    Op op = Op::Const;
    complex value{};
    int var = -1;
    Fn fn = Fn::Sin;
    std::vector<std::shared_ptr<const Node>> args;
  };
  using NodePtr = std::shared_ptr<const Node>;

 public:
  Expression() = default;

  static Expression parse(std::string_view text, const std::vector<std::string>& variables,
                          const std::map<std::string, complex>& params = {}) {
    Parser p{text, variables, params};
    Expression e;
    e.text_ = std::string(text);
    e.root_ = p.parse_all();
    return e;
  }

  const std::string& text() const noexcept { return text_; }
  bool is_constant() const noexcept { return root_ && root_->op == Op::Const; }

  complex constant_value() const {
    if (!is_constant()) throw SchemaError("expression '" + text_ + "' is not a constant");
    return root_->value;
  }

  Jet eval(const Seed& s) const { return eval_node(*root_, s); }

 private:
  static Jet eval_node(const Node& n, const Seed& s) {
    switch (n.op) {
      case Op::Const:
        return s.constant(n.value);
      case Op::Var:
        return s.coordinate(n.var);
      case Op::Neg:
        return -eval_node(*n.args[0], s);
      case Op::Add:
        return eval_node(*n.args[0], s) + eval_node(*n.args[1], s);
      case Op::Sub:
        return eval_node(*n.args[0], s) - eval_node(*n.args[1], s);
      case Op::Mul:
        if (n.args[0]->op == Op::Const) return eval_node(*n.args[1], s) * n.args[0]->value;
        if (n.args[1]->op == Op::Const) return eval_node(*n.args[0], s) * n.args[1]->value;
        return eval_node(*n.args[0], s) * eval_node(*n.args[1], s);
      case Op::Div:
        if (n.args[1]->op == Op::Const) return eval_node(*n.args[0], s) / n.args[1]->value;
        return eval_node(*n.args[0], s) / eval_node(*n.args[1], s);
      case Op::Pow:
        return power(eval_node(*n.args[0], s), *n.args[1], s);
      case Op::Call:
        return call(n, s);
    }
    throw SchemaError("corrupt expression node");
  }

  static Jet power(const Jet& base, const Node& ex, const Seed& s) {
    if (ex.op == Op::Const) {
      const complex p = ex.value;
      if (p.imag() == 0.0 && p.real() == std::round(p.real()) && std::abs(p.real()) < 64.0)
        return pow(base, static_cast<int>(p.real()));
      return pow(base, p);
    }
    return pow(base, eval_node(ex, s));
  }

  static Jet call(const Node& n, const Seed& s) {
    const Jet a = eval_node(*n.args[0], s);
    switch (n.fn) {
      case Fn::Sin: return sin(a);
      case Fn::Cos: return cos(a);
      case Fn::Tan: return tan(a);
      case Fn::Exp: return exp(a);
      case Fn::Log: return log(a);
      case Fn::Sqrt: return sqrt(a);
      case Fn::Asin: return asin(a);
      case Fn::Acos: return acos(a);
      case Fn::Atan: return atan(a);
      case Fn::Sinh: return sinh(a);
      case Fn::Cosh: return cosh(a);
      case Fn::Atan2: return atan2(a, eval_node(*n.args[1], s));
      case Fn::Pow: return power(a, *n.args[1], s);
    }
    throw SchemaError("corrupt expression call");
  }

  static complex fold_call(Fn fn, complex a, complex b) {
    switch (fn) {
      case Fn::Sin: return std::sin(a);
      case Fn::Cos: return std::cos(a);
      case Fn::Tan: return std::tan(a);
      case Fn::Exp: return std::exp(a);
      case Fn::Log: return std::log(a);
      case Fn::Sqrt: return std::sqrt(a);
      case Fn::Asin: return std::asin(a);
      case Fn::Acos: return std::acos(a);
      case Fn::Atan: return std::atan(a);
      case Fn::Sinh: return std::sinh(a);
      case Fn::Cosh: return std::cosh(a);
      case Fn::Atan2: return std::atan2(a.real(), b.real());
      case Fn::Pow: return fold_pow(a, b);
    }
    return {};
  }

  static complex fold_pow(complex a, complex b) {
    if (b.imag() == 0.0 && b.real() == std::round(b.real()) && std::abs(b.real()) < 64.0) {
      const int p = static_cast<int>(b.real());
      complex r = 1.0;
      for (int k = 0; k < std::abs(p); ++k) r *= a;
      return p < 0 ? 1.0 / r : r;
    }
    return std::pow(a, b);
  }

  struct Parser {
    std::string_view src;
    const std::vector<std::string>& vars;
    const std::map<std::string, complex>& params;
    std::size_t pos = 0;

    NodePtr parse_all() {
      auto n = expr();
      skip_ws();
      if (pos != src.size()) fail("unexpected trailing input");
      return n;
    }

    [[noreturn]] void fail(const std::string& what) const {
      throw SchemaError("expression '" + std::string(src) + "': " + what + " at offset " + std::to_string(pos));
    }

    void skip_ws() {
      while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
    }
    bool accept(std::string_view tok) {
      skip_ws();
      if (src.substr(pos, tok.size()) == tok) {
        pos += tok.size();
        return true;
      }
      return false;
    }

    static NodePtr make_const(complex v) {
      auto n = std::make_shared<Node>();
      n->op = Op::Const;
      n->value = v;
      return n;
    }

    static NodePtr make(Op op, std::vector<NodePtr> args) {
      bool all_const = true;
      for (const auto& a : args) all_const = all_const && a->op == Op::Const;
      if (all_const) {
        const complex x = args[0]->value;
        const complex y = args.size() > 1 ? args[1]->value : complex{};
        switch (op) {
          case Op::Neg: return make_const(-x);
          case Op::Add: return make_const(x + y);
          case Op::Sub: return make_const(x - y);
          case Op::Mul: return make_const(x * y);
          case Op::Div: return make_const(x / y);
          case Op::Pow: return make_const(fold_pow(x, y));
          default: break;
        }
      }
      auto n = std::make_shared<Node>();
      n->op = op;
      n->args = std::move(args);
      return n;
    }

    NodePtr expr() {
      auto lhs = term();
      for (;;) {
        if (accept("+")) lhs = make(Op::Add, {lhs, term()});
        else if (accept("-")) lhs = make(Op::Sub, {lhs, term()});
        else return lhs;
      }
    }

    NodePtr term() {
      auto lhs = unary();
      for (;;) {
        skip_ws();
        if (src.substr(pos, 2) == "**") return lhs;
        if (accept("*")) lhs = make(Op::Mul, {lhs, unary()});
        else if (accept("/")) lhs = make(Op::Div, {lhs, unary()});
        else return lhs;
      }
    }

    NodePtr unary() {
      if (accept("-")) return make(Op::Neg, {unary()});
      if (accept("+")) return unary();
      return power();
    }

    NodePtr power() {
      auto base = primary();
      if (accept("^") || accept("**")) return make(Op::Pow, {base, unary()});
      return base;
    }

    NodePtr primary() {
      skip_ws();
      if (pos >= src.size()) fail("unexpected end of input");
      const char c = src[pos];
      if (c == '(') {
        ++pos;
        auto n = expr();
        if (!accept(")")) fail("expected ')'");
        return n;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
      fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
      char* end = nullptr;
      const std::string buf(src.substr(pos));
      const double v = std::strtod(buf.c_str(), &end);
      const auto used = static_cast<std::size_t>(end - buf.c_str());
      if (used == 0) fail("malformed number");
      pos += used;
      return make_const(v);
    }

    NodePtr name() {
      const std::size_t start = pos;
      while (pos < src.size() && (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_')) ++pos;
      const std::string id(src.substr(start, pos - start));
      skip_ws();
      if (pos < src.size() && src[pos] == '(') {
        ++pos;
        std::vector<NodePtr> args{expr()};
        while (accept(",")) args.push_back(expr());
        if (!accept(")")) fail("expected ')' after arguments of " + id);
        return make_call(id, std::move(args));
      }
      for (std::size_t k = 0; k < vars.size(); ++k) {
        if (vars[k] == id) {
          auto n = std::make_shared<Node>();
          n->op = Op::Var;
          n->var = static_cast<int>(k);
          return n;
        }
      }
      if (auto it = params.find(id); it != params.end()) return make_const(it->second);
      if (id == "pi") return make_const(std::numbers::pi);
      if (id == "e") return make_const(std::numbers::e);
      if (id == "i") return make_const(complex(0.0, 1.0));
      pos = start;
      fail("unknown name '" + id + "'");
    }

    NodePtr make_call(const std::string& id, std::vector<NodePtr> args) {
      static const std::map<std::string, std::pair<Fn, std::size_t>> table{
          {"sin", {Fn::Sin, 1}},   {"cos", {Fn::Cos, 1}},   {"tan", {Fn::Tan, 1}},     {"exp", {Fn::Exp, 1}},
          {"log", {Fn::Log, 1}},   {"sqrt", {Fn::Sqrt, 1}}, {"asin", {Fn::Asin, 1}},   {"acos", {Fn::Acos, 1}},
          {"atan", {Fn::Atan, 1}}, {"sinh", {Fn::Sinh, 1}}, {"cosh", {Fn::Cosh, 1}},   {"atan2", {Fn::Atan2, 2}},
          {"pow", {Fn::Pow, 2}}};
      const auto it = table.find(id);
      if (it == table.end()) fail("unknown function '" + id + "'");
      if (args.size() != it->second.second) fail("wrong number of arguments to " + id);
      bool all_const = true;
      for (const auto& a : args) all_const = all_const && a->op == Op::Const;
      if (all_const)
        return make_const(fold_call(it->second.first, args[0]->value, args.size() > 1 ? args[1]->value : complex{}));
      auto n = std::make_shared<Node>();
      n->op = Op::Call;
      n->fn = it->second.first;
      n->args = std::move(args);
      return n;
    }
  };

  std::string text_;
  NodePtr root_;
};

/// Scalar field on a chart defined by an expression in the chart coordinates.
inline ScalarField expression_field(const std::string& chart, const Expression& e, int dim) {
  return {chart, dim, 0, [e](const Seed& s) { return e.eval(s); }};
}

}  // namespace equiloc
