#include "ehgo/signal.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <variant>

namespace ehgo {

namespace {

struct Const { double value; };
struct Time {};
struct Sum { std::shared_ptr<const Signal::Node> a, b; };
struct Product { std::shared_ptr<const Signal::Node> a, b; };
struct Sin { std::shared_ptr<const Signal::Node> arg; };
struct Cos { std::shared_ptr<const Signal::Node> arg; };
struct Pow { std::shared_ptr<const Signal::Node> base; int exponent; };

}  // namespace

struct Signal::Node {
  std::variant<Const, Time, Sum, Product, Sin, Cos, Pow> op;
};

namespace {

using NodePtr = std::shared_ptr<const Signal::Node>;

NodePtr make(auto op) { return std::make_shared<const Signal::Node>(Signal::Node{op}); }

bool const_value(const NodePtr& n, double& out) {
  if (const auto* c = std::get_if<Const>(&n->op)) {
    out = c->value;
    return true;
  }
  return false;
}

// Light simplification keeps derivative trees from growing with zeros.
NodePtr add(NodePtr a, NodePtr b) {
  double ca = 0.0, cb = 0.0;
  const bool ka = const_value(a, ca), kb = const_value(b, cb);
  if (ka && kb) return make(Const{ca + cb});
  if (ka && ca == 0.0) return b;
  if (kb && cb == 0.0) return a;
  return make(Sum{std::move(a), std::move(b)});
}

NodePtr mul(NodePtr a, NodePtr b) {
  double ca = 0.0, cb = 0.0;
  const bool ka = const_value(a, ca), kb = const_value(b, cb);
  if (ka && kb) return make(Const{ca * cb});
  if ((ka && ca == 0.0) || (kb && cb == 0.0)) return make(Const{0.0});
  if (ka && ca == 1.0) return b;
  if (kb && cb == 1.0) return a;
  return make(Product{std::move(a), std::move(b)});
}

NodePtr power(NodePtr base, int e) {
  if (e == 0) return make(Const{1.0});
  if (e == 1) return base;
  double c = 0.0;
  if (const_value(base, c)) return make(Const{std::pow(c, e)});
  return make(Pow{std::move(base), e});
}

double eval(const NodePtr& n, double t) {
  return std::visit(
      [t](const auto& op) -> double {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, Const>) return op.value;
        else if constexpr (std::is_same_v<T, Time>) return t;
        else if constexpr (std::is_same_v<T, Sum>) return eval(op.a, t) + eval(op.b, t);
        else if constexpr (std::is_same_v<T, Product>) return eval(op.a, t) * eval(op.b, t);
        else if constexpr (std::is_same_v<T, Sin>) return std::sin(eval(op.arg, t));
        else if constexpr (std::is_same_v<T, Cos>) return std::cos(eval(op.arg, t));
        else return std::pow(eval(op.base, t), op.exponent);
      },
      n->op);
}

NodePtr diff(const NodePtr& n) {
  return std::visit(
      [&n](const auto& op) -> NodePtr {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, Const>) {
          return make(Const{0.0});
        } else if constexpr (std::is_same_v<T, Time>) {
          return make(Const{1.0});
        } else if constexpr (std::is_same_v<T, Sum>) {
          return add(diff(op.a), diff(op.b));
        } else if constexpr (std::is_same_v<T, Product>) {
          return add(mul(diff(op.a), op.b), mul(op.a, diff(op.b)));
        } else if constexpr (std::is_same_v<T, Sin>) {
          return mul(make(Cos{op.arg}), diff(op.arg));
        } else if constexpr (std::is_same_v<T, Cos>) {
          return mul(mul(make(Const{-1.0}), make(Sin{op.arg})), diff(op.arg));
        } else {
          (void)n;
          return mul(mul(make(Const{static_cast<double>(op.exponent)}),
                         power(op.base, op.exponent - 1)),
                     diff(op.base));
        }
      },
      n->op);
}

std::string show(const NodePtr& n) {
  return std::visit(
      [](const auto& op) -> std::string {
        using T = std::decay_t<decltype(op)>;
        std::ostringstream os;
        os.precision(17);
        if constexpr (std::is_same_v<T, Const>) {
          if (op.value < 0) os << "(" << op.value << ")";
          else os << op.value;
        } else if constexpr (std::is_same_v<T, Time>) {
          os << "t";
        } else if constexpr (std::is_same_v<T, Sum>) {
          os << "(" << show(op.a) << " + " << show(op.b) << ")";
        } else if constexpr (std::is_same_v<T, Product>) {
          os << show(op.a) << "*" << show(op.b);
        } else if constexpr (std::is_same_v<T, Sin>) {
          os << "sin(" << show(op.arg) << ")";
        } else if constexpr (std::is_same_v<T, Cos>) {
          os << "cos(" << show(op.arg) << ")";
        } else {
          os << "(" << show(op.base) << ")^" << op.exponent;
        }
        return os.str();
      },
      n->op);
}

// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := unary ('*' unary)*
//   unary  := '-' unary | factor
//   factor := atom ('^' integer)?
//   atom   := number | 't' | ('sin'|'cos') '(' expr ')' | '(' expr ')'
class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw std::invalid_argument("signal expression '" + std::string(s_) + "' at column " +
                                std::to_string(pos_ + 1) + ": " + why);
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
      if (accept('+')) lhs = add(lhs, term());
      else if (accept('-')) lhs = add(lhs, mul(make(Const{-1.0}), term()));
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (accept('*')) lhs = mul(lhs, unary());
    return lhs;
  }

  NodePtr unary() {
    if (accept('-')) return mul(make(Const{-1.0}), unary());
    return factor();
  }

  NodePtr factor() {
    NodePtr base = atom();
    if (accept('^')) {
      skip();
      std::size_t used = 0;
      int e = 0;
      try {
        e = std::stoi(std::string(s_.substr(pos_)), &used);
      } catch (const std::exception&) {
        fail("expected integer exponent");
      }
      if (e < 0) fail("negative exponents are not supported");
      pos_ += used;
      return power(base, e);
    }
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(std::string(s_.substr(pos_)), &used);
      } catch (const std::exception&) {
        fail("malformed number");
      }
      pos_ += used;
      return make(Const{v});
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string_view name = s_.substr(start, pos_ - start);
      if (name == "t") return make(Time{});
      if (name == "pi") return make(Const{M_PI});
      if (name == "sin" || name == "cos") {
        if (!accept('(')) fail("expected '(' after " + std::string(name));
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        if (name == "sin") return make(Sin{arg});
        return make(Cos{arg});
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(name) + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Signal::Signal() : node_(make(Const{0.0})) {}

Signal Signal::constant(double c) { return Signal(make(Const{c})); }
Signal Signal::time() { return Signal(make(Time{})); }
Signal Signal::sin(const Signal& arg) { return Signal(make(Sin{arg.node_})); }
Signal Signal::cos(const Signal& arg) { return Signal(make(Cos{arg.node_})); }
Signal Signal::pow(const Signal& base, int exponent) {
  if (exponent < 0) throw std::invalid_argument("Signal::pow requires a nonnegative exponent");
  return Signal(power(base.node_, exponent));
}

Signal Signal::parse(std::string_view text) { return Signal(Parser(text).parse()); }

double Signal::operator()(double t) const { return eval(node_, t); }
Signal Signal::derivative() const { return Signal(diff(node_)); }
std::string Signal::to_string() const { return show(node_); }

bool Signal::is_zero() const {
  double c = 1.0;
  return const_value(node_, c) && c == 0.0;
}

Signal operator+(const Signal& a, const Signal& b) { return Signal(add(a.node_, b.node_)); }
Signal operator-(const Signal& a, const Signal& b) {
  return Signal(add(a.node_, mul(make(Const{-1.0}), b.node_)));
}
Signal operator*(const Signal& a, const Signal& b) { return Signal(mul(a.node_, b.node_)); }
Signal operator-(const Signal& a) { return Signal(mul(make(Const{-1.0}), a.node_)); }

Eigen::Vector3d VectorSignal::operator()(double t) const {
  return {axes_[0](t), axes_[1](t), axes_[2](t)};
}

VectorSignal VectorSignal::derivative() const {
  return {axes_[0].derivative(), axes_[1].derivative(), axes_[2].derivative()};
}

std::string VectorSignal::to_string() const {
  return axes_[0].to_string() + ", " + axes_[1].to_string() + ", " + axes_[2].to_string();
}

Disturbance Disturbance::paper_sinusoids() {
  const Signal t = Signal::time();
  Disturbance d;
  d.sigma_xi = {Signal::sin(t), Signal::cos(t), Signal::sin(t)};
  d.sigma_rho = {Signal::cos(t), Signal::sin(t), Signal::cos(t)};
  return d;
}

}  // namespace ehgo
