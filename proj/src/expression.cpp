#include "qcmean/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace qcmean {

struct Expression::Node {
  enum class Op {
    Number, Var, Radius,
    Add, Sub, Mul, Div, Pow, Neg,
    Abs, Sqrt, Exp, Log, Sin, Cos, Min, Max
  };
  Op op = Op::Number;
  double value = 0.0;
  int var_index = 0;
  std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_num(double v) {
  auto n = std::make_shared<Node>();
  n->op = Node::Op::Number;
  n->value = v;
  return n;
}

NodePtr make_unary(Node::Op op, NodePtr a) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  return n;
}

NodePtr make_binary(Node::Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  Parser(const std::string& s, int dim) : s_(s), dim_(dim) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("expression \"" + s_ + "\": " + msg + " at position " +
                                std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool consume(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (consume('+')) {
        lhs = make_binary(Node::Op::Add, lhs, term());
      } else if (consume('-')) {
        lhs = make_binary(Node::Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    NodePtr lhs = factor();
    for (;;) {
      if (consume('*')) {
        lhs = make_binary(Node::Op::Mul, lhs, factor());
      } else if (consume('/')) {
        lhs = make_binary(Node::Op::Div, lhs, factor());
      } else {
        return lhs;
      }
    }
  }

  // exponentiation binds tighter than the unary sign: -2^2 = -(2^2)
  NodePtr factor() {
    if (consume('-')) return make_unary(Node::Op::Neg, factor());
    if (consume('+')) return factor();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (consume('^')) {
      return make_binary(Node::Op::Pow, base, factor());  // right associative
    }
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!consume(')')) fail("missing ')'");
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    fail("unexpected character");
  }

  NodePtr number() {
    std::size_t end = pos_;
    while (end < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
            s_[end] == 'e' || s_[end] == 'E' ||
            ((s_[end] == '+' || s_[end] == '-') && end > pos_ &&
             (s_[end - 1] == 'e' || s_[end - 1] == 'E')))) {
      ++end;
    }
    const std::string tok = s_.substr(pos_, end - pos_);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (...) {
      fail("bad number");
    }
    if (used != tok.size()) fail("bad number");
    pos_ = end;
    return make_num(v);
  }

  NodePtr identifier() {
    std::size_t end = pos_;
    while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) ++end;
    const std::string name = s_.substr(pos_, end - pos_);
    pos_ = end;

    if (name == "pi") return make_num(std::numbers::pi);
    if (name == "e") return make_num(std::numbers::e);
    if (name == "r") {
      auto n = std::make_shared<Node>();
      n->op = Node::Op::Radius;
      return n;
    }
    if (name.size() >= 2 && name[0] == 'x') {
      bool digits = true;
      for (std::size_t i = 1; i < name.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) digits = false;
      }
      if (digits) {
        const int idx = std::stoi(name.substr(1));
        if (idx < 1 || idx > dim_) fail("coordinate " + name + " out of range for dim " +
                                        std::to_string(dim_));
        auto n = std::make_shared<Node>();
        n->op = Node::Op::Var;
        n->var_index = idx - 1;
        return n;
      }
    }

    static const std::vector<std::pair<std::string, Node::Op>> fns = {
        {"abs", Node::Op::Abs}, {"sqrt", Node::Op::Sqrt}, {"exp", Node::Op::Exp},
        {"log", Node::Op::Log}, {"sin", Node::Op::Sin},   {"cos", Node::Op::Cos},
        {"pow", Node::Op::Pow}, {"min", Node::Op::Min},   {"max", Node::Op::Max}};
    for (const auto& [fname, op] : fns) {
      if (name != fname) continue;
      if (!consume('(')) fail("expected '(' after " + fname);
      NodePtr a = expr();
      NodePtr b;
      if (op == Node::Op::Pow || op == Node::Op::Min || op == Node::Op::Max) {
        if (!consume(',')) fail(fname + " takes two arguments");
        b = expr();
      }
      if (!consume(')')) fail("missing ')'");
      if (b) return make_binary(op, a, b);
      return make_unary(op, a);
    }
    fail("unknown identifier '" + name + "'");
  }

  const std::string& s_;
  int dim_;
  std::size_t pos_ = 0;
};

struct EvalContext {
  const Point* point = nullptr;
  double radius = 0.0;
  bool allow_coords = true;
};

double eval_node(const Node& n, const EvalContext& ctx) {
  switch (n.op) {
    case Node::Op::Number: return n.value;
    case Node::Op::Var:
      if (!ctx.allow_coords || ctx.point == nullptr) {
        throw std::invalid_argument("expression uses coordinates in a radial-only context");
      }
      return (*ctx.point)[static_cast<std::size_t>(n.var_index)];
    case Node::Op::Radius:
      return ctx.point != nullptr ? ctx.point->norm() : ctx.radius;
    case Node::Op::Add: return eval_node(*n.a, ctx) + eval_node(*n.b, ctx);
    case Node::Op::Sub: return eval_node(*n.a, ctx) - eval_node(*n.b, ctx);
    case Node::Op::Mul: return eval_node(*n.a, ctx) * eval_node(*n.b, ctx);
    case Node::Op::Div: return eval_node(*n.a, ctx) / eval_node(*n.b, ctx);
    case Node::Op::Pow: return std::pow(eval_node(*n.a, ctx), eval_node(*n.b, ctx));
    case Node::Op::Neg: return -eval_node(*n.a, ctx);
    case Node::Op::Abs: return std::abs(eval_node(*n.a, ctx));
    case Node::Op::Sqrt: return std::sqrt(eval_node(*n.a, ctx));
    case Node::Op::Exp: return std::exp(eval_node(*n.a, ctx));
    case Node::Op::Log: return std::log(eval_node(*n.a, ctx));
    case Node::Op::Sin: return std::sin(eval_node(*n.a, ctx));
    case Node::Op::Cos: return std::cos(eval_node(*n.a, ctx));
    case Node::Op::Min: return std::min(eval_node(*n.a, ctx), eval_node(*n.b, ctx));
    case Node::Op::Max: return std::max(eval_node(*n.a, ctx), eval_node(*n.b, ctx));
  }
  return 0.0;
}

bool node_uses_coords(const Node& n) {
  if (n.op == Node::Op::Var) return true;
  if (n.a && node_uses_coords(*n.a)) return true;
  if (n.b && node_uses_coords(*n.b)) return true;
  return false;
}

}  // namespace

Expression Expression::parse(const std::string& text, int dim) {
  Expression e;
  e.text_ = text;
  e.dim_ = dim;
  e.root_ = Parser(text, dim).parse();
  return e;
}

double Expression::eval(const Point& x) const {
  EvalContext ctx;
  ctx.point = &x;
  return eval_node(*root_, ctx);
}

double Expression::eval_radial(double r) const {
  EvalContext ctx;
  ctx.radius = r;
  ctx.allow_coords = false;
  return eval_node(*root_, ctx);
}

bool Expression::uses_coordinates() const { return node_uses_coords(*root_); }

}  // namespace qcmean
