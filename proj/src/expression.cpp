#include "ctunnel/expression.hpp"

#include <cctype>
#include <cstdlib>
#include <numbers>
#include <variant>
#include <vector>

#include "ctunnel/errors.hpp"

namespace ctunnel {

struct Expression::Node {
  enum class Op { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Exp, Sqrt };
  Op op = Op::Constant;
  double constant = 0.0;
  std::shared_ptr<const Node> lhs, rhs;

  Taylor<double> eval(const Taylor<double>& x) const {
    switch (op) {
      case Op::Constant:
        return Taylor<double>(x.order(), constant);
      case Op::Variable:
        return x;
      case Op::Add:
        return lhs->eval(x) + rhs->eval(x);
      case Op::Sub:
        return lhs->eval(x) - rhs->eval(x);
      case Op::Mul:
        return lhs->eval(x) * rhs->eval(x);
      case Op::Div:
        return lhs->eval(x) / rhs->eval(x);
      case Op::Neg:
        return -lhs->eval(x);
      case Op::Exp:
        return exp(lhs->eval(x));
      case Op::Sqrt:
        return sqrt(lhs->eval(x));
      case Op::Pow: {
        if (rhs->op == Op::Constant) return pow(lhs->eval(x), rhs->constant);
        return exp(rhs->eval(x) * log(lhs->eval(x)));
      }
    }
    return Taylor<double>(x.order());
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double c = 0.0) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->constant = c;
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("potential expression '" + s_ + "': " + what + " at column " +
                      std::to_string(pos_ + 1));
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

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make(Op::Add, lhs, term());
      else if (accept('-'))
        lhs = make(Op::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make(Op::Mul, lhs, unary());
      else if (accept('/'))
        lhs = make(Op::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (accept('^')) {
      NodePtr ex = unary();
      // Fold constant exponents so integer powers stay polynomial.
      if (ex->op == Op::Neg && ex->lhs->op == Op::Constant)
        ex = make(Op::Constant, nullptr, nullptr, -ex->lhs->constant);
      return make(Op::Pow, base, ex);
    }
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos_ += static_cast<std::size_t>(end - begin);
      return make(Op::Constant, nullptr, nullptr, v);
    }
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "x") return make(Op::Variable);
      if (name == "pi") return make(Op::Constant, nullptr, nullptr, std::numbers::pi);
      Op fn;
      if (name == "exp")
        fn = Op::Exp;
      else if (name == "sqrt")
        fn = Op::Sqrt;
      else {
        pos_ = start;
        fail("unknown identifier '" + name + "'");
      }
      if (!accept('(')) fail("expected '(' after " + name);
      NodePtr arg = expr();
      if (!accept(')')) fail("expected ')'");
      return make(fn, arg);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Parser p(text);
  return Expression(text, p.parse());
}

Taylor<double> Expression::operator()(const Taylor<double>& x) const { return root_->eval(x); }

double Expression::operator()(double x) const {
  return root_->eval(Taylor<double>(0, x)).value();
}

}  // namespace ctunnel
