#pragma once

#include <cctype>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmc {

/// Error with the 0-based offset of the offending character, so callers can
/// print a caret under the source.
class expr_error : public std::runtime_error {
 public:
  expr_error(const std::string& what, std::size_t pos)
      : std::runtime_error(what), pos_(pos) {}
  std::size_t position() const noexcept { return pos_; }

 private:
  std::size_t pos_;
};

/// A tiny arithmetic grammar over x1..xd:
///   expr   := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := '-' unary | primary
///   primary:= number | 'x'<index> | ('exp'|'cos'|'abs') '(' expr ')' | '(' expr ')'
/// Parsed once into a flat postfix program; evaluation is allocation-free.
class Expression {
 public:
  static Expression parse(const std::string& src, unsigned d) {
    Expression e;
    e.d_ = d;
    e.src_ = src;
    Parser p{src, d, e.ops_, 0};
    p.expr();
    p.skip_ws();
    if (p.pos != src.size()) throw expr_error("unexpected trailing input", p.pos);
    e.max_stack_ = e.compute_stack();
    return e;
  }

  double eval(std::span<const double> x) const {
    if (x.size() < d_) throw std::invalid_argument("expression: point dimension too small");
    std::vector<double> stack;
    stack.reserve(max_stack_);
    for (const Op& op : ops_) {
      switch (op.code) {
        case OpCode::push: stack.push_back(op.value); break;
        case OpCode::var: stack.push_back(x[op.index]); break;
        case OpCode::neg: stack.back() = -stack.back(); break;
        case OpCode::fn_exp: stack.back() = std::exp(stack.back()); break;
        case OpCode::fn_cos: stack.back() = std::cos(stack.back()); break;
        case OpCode::fn_abs: stack.back() = std::abs(stack.back()); break;
        default: {
          double b = stack.back();
          stack.pop_back();
          double& a = stack.back();
          if (op.code == OpCode::add) a += b;
          else if (op.code == OpCode::sub) a -= b;
          else if (op.code == OpCode::mul) a *= b;
          else a /= b;
        }
      }
    }
    return stack.back();
  }

  unsigned dimension() const noexcept { return d_; }
  const std::string& source() const noexcept { return src_; }

 private:
  enum class OpCode { push, var, neg, add, sub, mul, div, fn_exp, fn_cos, fn_abs };
  struct Op {
    OpCode code;
    double value = 0.0;
    unsigned index = 0;
  };

  struct Parser {
    const std::string& s;
    unsigned d;
    std::vector<Op>& out;
    std::size_t pos;

    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char c) {
      skip_ws();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    void expr() {
      term();
      for (;;) {
        skip_ws();
        if (eat('+')) {
          term();
          out.push_back({OpCode::add});
        } else if (eat('-')) {
          term();
          out.push_back({OpCode::sub});
        } else {
          return;
        }
      }
    }

    void term() {
      unary();
      for (;;) {
        skip_ws();
        if (eat('*')) {
          unary();
          out.push_back({OpCode::mul});
        } else if (eat('/')) {
          unary();
          out.push_back({OpCode::div});
        } else {
          return;
        }
      }
    }

    void unary() {
      skip_ws();
      if (eat('-')) {
        unary();
        out.push_back({OpCode::neg});
        return;
      }
      primary();
    }

    void primary() {
      skip_ws();
      if (pos >= s.size()) throw expr_error("unexpected end of expression", pos);
      const char c = s[pos];
      if (c == '(') {
        ++pos;
        expr();
        if (!eat(')')) throw expr_error("expected ')'", pos);
        return;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        number();
        return;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        identifier();
        return;
      }
      throw expr_error(std::string("unexpected character '") + c + "'", pos);
    }

    void number() {
      std::size_t start = pos;
      std::size_t used = 0;
      double v;
      try {
        v = std::stod(s.substr(start), &used);
      } catch (const std::exception&) {
        throw expr_error("malformed number", start);
      }
      pos = start + used;
      out.push_back({OpCode::push, v});
    }

    void identifier() {
      std::size_t start = pos;
      while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
      const std::string id = s.substr(start, pos - start);
      if (id.size() >= 2 && id[0] == 'x') {
        unsigned idx = 0;
        for (std::size_t q = 1; q < id.size(); ++q) {
          if (!std::isdigit(static_cast<unsigned char>(id[q])))
            throw expr_error("bad variable '" + id + "'", start);
          idx = idx * 10 + static_cast<unsigned>(id[q] - '0');
        }
        if (idx < 1 || idx > d)
          throw expr_error("variable '" + id + "' out of range for d=" + std::to_string(d), start);
        out.push_back({OpCode::var, 0.0, idx - 1});
        return;
      }
      if (id == "exp" || id == "cos" || id == "abs") {
        if (!eat('(')) throw expr_error("expected '(' after '" + id + "'", pos);
        expr();
        if (!eat(')')) throw expr_error("expected ')'", pos);
        out.push_back({id == "exp" ? OpCode::fn_exp : id == "cos" ? OpCode::fn_cos : OpCode::fn_abs});
        return;
      }
      throw expr_error("unknown identifier '" + id + "'", start);
    }
  };

  std::size_t compute_stack() const {
    std::size_t depth = 0, mx = 1;
    for (const Op& op : ops_) {
      if (op.code == OpCode::push || op.code == OpCode::var) ++depth;
      else if (op.code == OpCode::add || op.code == OpCode::sub || op.code == OpCode::mul ||
               op.code == OpCode::div)
        --depth;
      mx = std::max(mx, depth);
    }
    return mx;
  }

  unsigned d_ = 0;
  std::string src_;
  std::vector<Op> ops_;
  std::size_t max_stack_ = 1;
};

}  // namespace qmc
