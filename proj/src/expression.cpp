#include "kflow/expression.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

namespace kflow {

struct Expression::Node {
  enum class Kind { constant, coord, add, sub, mul, neg, exp, sin, cos };
  Kind kind;
  double value = 0.0;
  Axis axis = 0;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

void collect_axes(const Node& node, std::set<Axis>& out) {
  if (node.kind == Node::Kind::coord) out.insert(node.axis);
  if (node.lhs) collect_axes(*node.lhs, out);
  if (node.rhs) collect_axes(*node.rhs, out);
}

class Parser {
public:
  Parser(std::string_view src, int n) : src_(src), n_(n) {}

  NodePtr parse() {
    auto e = expr();
    skip();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& what) const { throw ExpressionError(what, pos_); }

  void skip() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = make(Node::Kind::add, lhs, term());
      } else if (accept('-')) {
        lhs = make(Node::Kind::sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  NodePtr term() {
    auto lhs = unary();
    while (accept('*')) lhs = make(Node::Kind::mul, lhs, unary());
    return lhs;
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::neg, unary());
    return atom();
  }

  NodePtr atom() {
    skip();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return word();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* first = src_.data() + pos_;
    const char* last = src_.data() + src_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || !std::isfinite(v)) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::constant;
    n->value = v;
    return n;
  }

  NodePtr word() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string_view w = src_.substr(start, pos_ - start);
    if (w == "exp" || w == "sin" || w == "cos") {
      if (!accept('(')) fail("expected '(' after " + std::string(w));
      const std::size_t arg_start = pos_;
      auto arg = expr();
      if (!accept(')')) fail("expected ')'");
      const auto kind = w == "exp" ? Node::Kind::exp : w == "sin" ? Node::Kind::sin : Node::Kind::cos;
      if (kind != Node::Kind::exp) {
        std::set<Axis> axes;
        collect_axes(*arg, axes);
        if (axes.size() > 1) throw ExpressionError(std::string(w) + " of more than one coordinate", arg_start);
      }
      return make(kind, arg);
    }
    try {
      auto n = std::make_shared<Node>();
      n->kind = Node::Kind::coord;
      n->axis = PeriodicGrid::parse_axis(w, n_);
      return n;
    } catch (const std::invalid_argument& e) {
      throw ExpressionError(e.what(), start);
    }
  }

  std::string_view src_;
  int n_;
  std::size_t pos_ = 0;
};

double eval(const Node& node, std::span<const double> x) {
  switch (node.kind) {
    case Node::Kind::constant: return node.value;
    case Node::Kind::coord: return x[static_cast<std::size_t>(node.axis)];
    case Node::Kind::add: return eval(*node.lhs, x) + eval(*node.rhs, x);
    case Node::Kind::sub: return eval(*node.lhs, x) - eval(*node.rhs, x);
    case Node::Kind::mul: return eval(*node.lhs, x) * eval(*node.rhs, x);
    case Node::Kind::neg: return -eval(*node.lhs, x);
    case Node::Kind::exp: return std::exp(eval(*node.lhs, x));
    case Node::Kind::sin: return std::sin(eval(*node.lhs, x));
    case Node::Kind::cos: return std::cos(eval(*node.lhs, x));
  }
  return 0.0;
}

// Shortest round-trip decimal form; negatives print as a negation so the
// canonical text re-parses to the same text.
std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, std::abs(v));
  std::string s(buf, ptr);
  return std::signbit(v) ? "(-" + s + ")" : s;
}

std::string print(const Node& node, int n) {
  switch (node.kind) {
    case Node::Kind::constant: return format_number(node.value);
    case Node::Kind::coord:
      return (node.axis < n ? "x" : "y") + std::to_string(node.axis % n + 1);
    case Node::Kind::add: return "(" + print(*node.lhs, n) + " + " + print(*node.rhs, n) + ")";
    case Node::Kind::sub: return "(" + print(*node.lhs, n) + " - " + print(*node.rhs, n) + ")";
    case Node::Kind::mul: return "(" + print(*node.lhs, n) + " * " + print(*node.rhs, n) + ")";
    case Node::Kind::neg: return "(-" + print(*node.lhs, n) + ")";
    case Node::Kind::exp: return "exp(" + print(*node.lhs, n) + ")";
    case Node::Kind::sin: return "sin(" + print(*node.lhs, n) + ")";
    case Node::Kind::cos: return "cos(" + print(*node.lhs, n) + ")";
  }
  return {};
}

}  // namespace

Expression Expression::parse(std::string_view source, int n) {
  Expression e;
  e.root_ = Parser(source, n).parse();
  e.n_ = n;
  return e;
}

Expression Expression::constant(double c) {
  Expression e;
  auto node = std::make_shared<Node>();
  node->kind = Node::Kind::constant;
  node->value = c;
  e.root_ = node;
  return e;
}

double Expression::operator()(std::span<const double> coords) const {
  return eval(*root_, coords);
}

std::string Expression::to_string() const { return print(*root_, n_); }

std::vector<Axis> Expression::axes() const {
  std::set<Axis> s;
  collect_axes(*root_, s);
  return {s.begin(), s.end()};
}

ScalarField Expression::sample(const PeriodicGrid& grid) const {
  for (Axis a : axes())
    if (!grid.is_active(a))
      throw std::invalid_argument("expression depends on inactive axis " + grid.axis_name(a));
  return ScalarField::sample(grid, [this](std::span<const double> x) { return (*this)(x); });
}

}  // namespace kflow
