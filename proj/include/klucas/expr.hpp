#pragma once

// Small real-expression language evaluated on intervals at any precision:
//   numbers (exact: 12, 0.3, 1.6e230), + - * /, unary -, x^n (integer n),
//   parentheses, log(x), exp(x), sqrt(x), alpha(k), fk(k).
// Example: "log(10)/log(2)", "(1 - 2^-3)/log(2)", "log(alpha(3))/log(10)".

#include <gmpxx.h>

#include <cctype>
#include <memory>
#include <string>
#include <vector>

#include "klucas/algebraic.hpp"
#include "klucas/cfrac.hpp"
#include "klucas/error.hpp"
#include "klucas/mp.hpp"

namespace klucas {

class RealExpr {
 public:
  explicit RealExpr(std::string text) : text_(std::move(text)) {
    pos_ = 0;
    root_ = parse_sum();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
  }

  const std::string& text() const { return text_; }

  Interval eval(Bits bits) const { return eval_node(*root_, bits); }

  RealFn fn() const {
    auto self = std::make_shared<RealExpr>(*this);
    return [self](Bits bits) { return self->eval(bits); };
  }

 private:
  enum class Op { kNum, kAdd, kSub, kMul, kDiv, kNeg, kPow, kLog, kExp, kSqrt, kAlpha, kFk };

  struct Node {
    Op op = Op::kNum;
    mpq_class value;
    long exponent = 0;  // kPow; order k for kAlpha / kFk
    std::shared_ptr<Node> a, b;
  };
  using NodePtr = std::shared_ptr<Node>;

  static NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
  }

  [[noreturn]] void fail(const std::string& why) const {
    throw UsageError("expression '" + text_ + "': " + why + " at offset " + std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr parse_sum() {
    NodePtr lhs = parse_product();
    for (;;) {
      if (accept('+')) {
        lhs = make(Op::kAdd, lhs, parse_product());
      } else if (accept('-')) {
        lhs = make(Op::kSub, lhs, parse_product());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_product() {
    NodePtr lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        lhs = make(Op::kMul, lhs, parse_unary());
      } else if (accept('/')) {
        lhs = make(Op::kDiv, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  NodePtr parse_unary() {
    if (accept('-')) return make(Op::kNeg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  NodePtr parse_power() {
    NodePtr base = parse_primary();
    if (accept('^')) {
      bool negative = false;
      if (accept('-')) {
        negative = true;
      } else {
        accept('+');
      }
      skip_space();
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      if (start == pos_) fail("integer exponent expected");
      auto n = make(Op::kPow, base);
      n->exponent = std::stol(text_.substr(start, pos_ - start));
      if (negative) n->exponent = -n->exponent;
      return n;
    }
    return base;
  }

  long parse_order() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("integer order expected");
    return std::stol(text_.substr(start, pos_ - start));
  }

  NodePtr parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
        ++pos_;
      }
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        std::size_t save = pos_++;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        } else {
          pos_ = save;
        }
      }
      auto n = make(Op::kNum);
      try {
        n->value = parse_rational(text_.substr(start, pos_ - start));
      } catch (const DomainError& e) {
        fail(e.what());
      }
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string name = text_.substr(start, pos_ - start);
      expect('(');
      NodePtr n;
      if (name == "alpha" || name == "fk") {
        n = make(name == "alpha" ? Op::kAlpha : Op::kFk);
        n->exponent = parse_order();
        if (n->exponent < 2) fail("order must be at least 2");
      } else if (name == "log") {
        n = make(Op::kLog, parse_sum());
      } else if (name == "exp") {
        n = make(Op::kExp, parse_sum());
      } else if (name == "sqrt") {
        n = make(Op::kSqrt, parse_sum());
      } else {
        fail("unknown function '" + name + "'");
      }
      expect(')');
      return n;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  static Interval eval_node(const Node& n, Bits bits) {
    switch (n.op) {
      case Op::kNum:
        return Interval::from_q(n.value, bits);
      case Op::kAdd:
        return eval_node(*n.a, bits) + eval_node(*n.b, bits);
      case Op::kSub:
        return eval_node(*n.a, bits) - eval_node(*n.b, bits);
      case Op::kMul:
        return eval_node(*n.a, bits) * eval_node(*n.b, bits);
      case Op::kDiv:
        return eval_node(*n.a, bits) / eval_node(*n.b, bits);
      case Op::kNeg:
        return -eval_node(*n.a, bits);
      case Op::kPow:
        return pow(eval_node(*n.a, bits), n.exponent);
      case Op::kLog:
        return log(eval_node(*n.a, bits));
      case Op::kExp:
        return exp(eval_node(*n.a, bits));
      case Op::kSqrt:
        return sqrt(eval_node(*n.a, bits));
      case Op::kAlpha:
      case Op::kFk: {
        auto rc = make_root_context(static_cast<int>(n.exponent),
                                    std::max<long>(kMinPrecision, bits_to_digits(bits) + 10));
        const Interval& v = n.op == Op::kAlpha ? rc.alpha : rc.fk_alpha;
        return v.with_prec(bits);
      }
    }
    throw DomainError("bad expression node");
  }

  std::string text_;
  std::size_t pos_ = 0;
  NodePtr root_;
};

}  // namespace klucas
