#include "geode/expr.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>

namespace geode {

const char* var_name(Var v) {
  switch (v) {
    case Var::X: return "x";
    case Var::Y: return "y";
    case Var::Z: return "z";
    case Var::V: return "v";
    case Var::W: return "w";
  }
  return "?";
}

std::optional<Var> var_from_name(std::string_view name) {
  if (name == "x") return Var::X;
  if (name == "y") return Var::Y;
  if (name == "z") return Var::Z;
  if (name == "v") return Var::V;
  if (name == "w" || name == "omega") return Var::W;
  return std::nullopt;
}

namespace {

std::optional<UnaryOp> function_from_name(std::string_view name) {
  if (name == "sin") return UnaryOp::Sin;
  if (name == "cos") return UnaryOp::Cos;
  if (name == "tan") return UnaryOp::Tan;
  if (name == "sqrt") return UnaryOp::Sqrt;
  if (name == "exp") return UnaryOp::Exp;
  if (name == "ln") return UnaryOp::Ln;
  if (name == "atan") return UnaryOp::Atan;
  return std::nullopt;
}

const char* function_name(UnaryOp op) {
  switch (op) {
    case UnaryOp::Neg: return "-";
    case UnaryOp::Sin: return "sin";
    case UnaryOp::Cos: return "cos";
    case UnaryOp::Tan: return "tan";
    case UnaryOp::Sqrt: return "sqrt";
    case UnaryOp::Exp: return "exp";
    case UnaryOp::Ln: return "ln";
    case UnaryOp::Atan: return "atan";
  }
  return "?";
}

}  // namespace

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

struct Parser {
  std::string_view text;
  std::size_t pos = 0;
  Expression out;

  explicit Parser(std::string_view t) : text(t) {}

  [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, at);
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  std::uint32_t add(Expression::Node n) {
    out.nodes_.push_back(n);
    return static_cast<std::uint32_t>(out.nodes_.size() - 1);
  }

  std::uint32_t parse_expr() {
    std::uint32_t lhs = parse_term();
    for (;;) {
      skip_ws();
      const std::size_t at = pos;
      if (eat('+')) {
        std::uint32_t rhs = parse_term();
        lhs = add({Expression::Kind::Binary, 0, Var::X, {}, BinaryOp::Add, lhs, rhs,
                   static_cast<std::uint32_t>(at)});
      } else if (eat('-')) {
        std::uint32_t rhs = parse_term();
        lhs = add({Expression::Kind::Binary, 0, Var::X, {}, BinaryOp::Sub, lhs, rhs,
                   static_cast<std::uint32_t>(at)});
      } else {
        return lhs;
      }
    }
  }

  std::uint32_t parse_term() {
    std::uint32_t lhs = parse_unary();
    for (;;) {
      skip_ws();
      const std::size_t at = pos;
      if (eat('*')) {
        std::uint32_t rhs = parse_unary();
        lhs = add({Expression::Kind::Binary, 0, Var::X, {}, BinaryOp::Mul, lhs, rhs,
                   static_cast<std::uint32_t>(at)});
      } else if (eat('/')) {
        std::uint32_t rhs = parse_unary();
        lhs = add({Expression::Kind::Binary, 0, Var::X, {}, BinaryOp::Div, lhs, rhs,
                   static_cast<std::uint32_t>(at)});
      } else {
        return lhs;
      }
    }
  }

  std::uint32_t parse_unary() {
    skip_ws();
    const std::size_t at = pos;
    if (eat('-')) {
      std::uint32_t child = parse_unary();
      return add({Expression::Kind::Unary, 0, Var::X, UnaryOp::Neg, {}, child, 0,
                  static_cast<std::uint32_t>(at)});
    }
    return parse_power();
  }

  std::uint32_t parse_power() {
    std::uint32_t base = parse_atom();
    skip_ws();
    const std::size_t at = pos;
    if (eat('^')) {
      // Right-associative; the exponent may carry a unary minus (x^-2).
      std::uint32_t expo = parse_unary();
      return add({Expression::Kind::Binary, 0, Var::X, {}, BinaryOp::Pow, base, expo,
                  static_cast<std::uint32_t>(at)});
    }
    return base;
  }

  std::uint32_t parse_atom() {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input", pos);
    const std::size_t at = pos;
    const char c = text[pos];

    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos;
      while (end < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[end])) || text[end] == '_'))
        ++end;
      const std::string_view name = text.substr(pos, end - pos);
      pos = end;
      if (auto fn = function_from_name(name)) {
        if (!eat('(')) fail("expected '(' after function name", pos);
        std::uint32_t arg = parse_expr();
        if (!eat(')')) fail("expected ')'", pos);
        return add({Expression::Kind::Unary, 0, Var::X, *fn, {}, arg, 0,
                    static_cast<std::uint32_t>(at)});
      }
      if (auto var = var_from_name(name)) {
        return add({Expression::Kind::Variable, 0, *var, {}, {}, 0, 0,
                    static_cast<std::uint32_t>(at)});
      }
      fail("unknown identifier '" + std::string(name) + "'", at);
    }

    if (eat('(')) {
      std::uint32_t inner = parse_expr();
      if (!eat(')')) fail("expected ')'", pos);
      return inner;
    }

    fail(std::string("unexpected character '") + c + "'", at);
  }

  std::uint32_t parse_number() {
    const std::size_t at = pos;
    std::size_t end = pos;
    while (end < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[end])) || text[end] == '.'))
      ++end;
    if (end < text.size() && (text[end] == 'e' || text[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < text.size() && (text[e] == '+' || text[e] == '-')) ++e;
      if (e < text.size() && std::isdigit(static_cast<unsigned char>(text[e]))) {
        ++e;
        while (e < text.size() && std::isdigit(static_cast<unsigned char>(text[e]))) ++e;
        end = e;
      }
    }
    double value = 0.0;
    const auto res = std::from_chars(text.data() + at, text.data() + end, value);
    if (res.ec != std::errc() || res.ptr != text.data() + end)
      fail("malformed number", at);
    pos = end;
    return add({Expression::Kind::Constant, value, Var::X, {}, {}, 0, 0,
                static_cast<std::uint32_t>(at)});
  }
};

Expression Expression::parse(std::string_view text) {
  Parser p(text);
  p.out.root_ = p.parse_expr();
  p.skip_ws();
  if (p.pos != text.size())
    throw ParseError("trailing input after expression", p.pos);
  return std::move(p.out);
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

// Precedence levels used both for parsing intent and minimal-paren printing.
int precedence(const Expression::Node& n) {
  switch (n.kind) {
    case Expression::Kind::Constant:
    case Expression::Kind::Variable:
      return 5;
    case Expression::Kind::Unary:
      return n.unary == UnaryOp::Neg ? 3 : 5;
    case Expression::Kind::Binary:
      switch (n.binary) {
        case BinaryOp::Add:
        case BinaryOp::Sub: return 1;
        case BinaryOp::Mul:
        case BinaryOp::Div: return 2;
        case BinaryOp::Pow: return 4;
      }
  }
  return 5;
}

void print_node(const std::vector<Expression::Node>& nodes, std::uint32_t idx,
                std::string& outs) {
  const auto& n = nodes[idx];
  auto child = [&](std::uint32_t c, bool parens) {
    if (parens) outs += '(';
    print_node(nodes, c, outs);
    if (parens) outs += ')';
  };
  switch (n.kind) {
    case Expression::Kind::Constant:
      outs += format_double(n.number);
      return;
    case Expression::Kind::Variable:
      outs += var_name(n.var);
      return;
    case Expression::Kind::Unary:
      if (n.unary == UnaryOp::Neg) {
        outs += '-';
        child(n.a, precedence(nodes[n.a]) < 3);
      } else {
        outs += function_name(n.unary);
        outs += '(';
        print_node(nodes, n.a, outs);
        outs += ')';
      }
      return;
    case Expression::Kind::Binary: {
      const int prec = precedence(n);
      const char* op = nullptr;
      bool lp = false, rp = false;
      switch (n.binary) {
        case BinaryOp::Add:
          op = "+";
          lp = precedence(nodes[n.a]) < prec;
          rp = precedence(nodes[n.b]) < prec;
          break;
        case BinaryOp::Sub:
          op = "-";
          lp = precedence(nodes[n.a]) < prec;
          rp = precedence(nodes[n.b]) <= prec;
          break;
        case BinaryOp::Mul:
          op = "*";
          lp = precedence(nodes[n.a]) < prec;
          rp = precedence(nodes[n.b]) < prec;
          break;
        case BinaryOp::Div:
          op = "/";
          lp = precedence(nodes[n.a]) < prec;
          rp = precedence(nodes[n.b]) <= prec;
          break;
        case BinaryOp::Pow:
          // '^' is right-associative and binds tighter than unary minus, so
          // any non-atomic base needs parentheses.
          op = "^";
          lp = precedence(nodes[n.a]) < 5;
          rp = false;
          break;
      }
      // A leading unary minus on the right of '+'/'-' prints parenthesized
      // for readability ("x-(-y)" rather than "x--y").
      if ((n.binary == BinaryOp::Add || n.binary == BinaryOp::Sub) &&
          nodes[n.b].kind == Expression::Kind::Unary && nodes[n.b].unary == UnaryOp::Neg)
        rp = true;
      child(n.a, lp);
      outs += op;
      child(n.b, rp);
      return;
    }
  }
}

}  // namespace

std::string Expression::str() const { return str(root_); }

std::string Expression::str(std::uint32_t node) const {
  std::string s;
  print_node(nodes_, node, s);
  return s;
}

namespace {

bool nodes_equal(const Expression& ea, std::uint32_t a, const Expression& eb,
                 std::uint32_t b) {
  const auto& na = ea.nodes()[a];
  const auto& nb = eb.nodes()[b];
  if (na.kind != nb.kind) return false;
  switch (na.kind) {
    case Expression::Kind::Constant:
      return na.number == nb.number;
    case Expression::Kind::Variable:
      return na.var == nb.var;
    case Expression::Kind::Unary:
      return na.unary == nb.unary && nodes_equal(ea, na.a, eb, nb.a);
    case Expression::Kind::Binary:
      return na.binary == nb.binary && nodes_equal(ea, na.a, eb, nb.a) &&
             nodes_equal(ea, na.b, eb, nb.b);
  }
  return false;
}

}  // namespace

bool Expression::equals(const Expression& other) const {
  return nodes_equal(*this, root_, other, other.root_);
}

std::uint8_t Expression::used_vars() const {
  std::uint8_t mask = 0;
  for (const auto& n : nodes_)
    if (n.kind == Kind::Variable) mask |= static_cast<std::uint8_t>(1u << static_cast<int>(n.var));
  return mask;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

using std::atan;
using std::cos;
using std::exp;
using std::log;
using std::sin;
using std::sqrt;
using std::tan;

template <class S>
S make_constant(double c) {
  return S::constant(c);
}
template <>
double make_constant<double>(double c) {
  return c;
}

template <class S>
struct Env {
  std::array<S, kVarCount> value{};
  std::uint8_t bound = 0;
};

/// True when the exponent subtree is a constant with an exactly integral
/// value of modest size, possibly under unary minus.
std::optional<long> integral_exponent(const std::vector<Expression::Node>& nodes,
                                      std::uint32_t idx) {
  const auto& n = nodes[idx];
  if (n.kind == Expression::Kind::Unary && n.unary == UnaryOp::Neg) {
    if (auto inner = integral_exponent(nodes, n.a)) return -*inner;
    return std::nullopt;
  }
  if (n.kind != Expression::Kind::Constant) return std::nullopt;
  const double v = n.number;
  if (v != std::nearbyint(v) || std::abs(v) > 64.0) return std::nullopt;
  return static_cast<long>(v);
}

template <class S>
S eval_node(const Expression& e, std::uint32_t idx, const Env<S>& env) {
  const auto& nodes = e.nodes();
  const auto& n = nodes[idx];
  auto domain_fail = [&](const char* what) -> S {
    throw DomainError(std::string(what) + " in sub-expression '" + e.str(idx) + "'");
  };
  S result = make_constant<S>(0.0);
  switch (n.kind) {
    case Expression::Kind::Constant:
      result = make_constant<S>(n.number);
      break;
    case Expression::Kind::Variable: {
      const int i = static_cast<int>(n.var);
      if (!((env.bound >> i) & 1))
        throw DomainError(std::string("variable '") + var_name(n.var) +
                          "' is not bound in this context");
      result = env.value[i];
      break;
    }
    case Expression::Kind::Unary: {
      const S a = eval_node(e, n.a, env);
      switch (n.unary) {
        case UnaryOp::Neg: result = -a; break;
        case UnaryOp::Sin: result = sin(a); break;
        case UnaryOp::Cos: result = cos(a); break;
        case UnaryOp::Tan: result = tan(a); break;
        case UnaryOp::Sqrt:
          if (value_of(a) < 0.0) return domain_fail("sqrt of a negative value");
          result = sqrt(a);
          break;
        case UnaryOp::Exp: result = exp(a); break;
        case UnaryOp::Ln:
          if (value_of(a) <= 0.0) return domain_fail("ln of a non-positive value");
          result = log(a);
          break;
        case UnaryOp::Atan: result = atan(a); break;
      }
      break;
    }
    case Expression::Kind::Binary: {
      const S a = eval_node(e, n.a, env);
      switch (n.binary) {
        case BinaryOp::Add: result = a + eval_node(e, n.b, env); break;
        case BinaryOp::Sub: result = a - eval_node(e, n.b, env); break;
        case BinaryOp::Mul: result = a * eval_node(e, n.b, env); break;
        case BinaryOp::Div: {
          const S b = eval_node(e, n.b, env);
          if (value_of(b) == 0.0) return domain_fail("division by zero");
          result = a / b;
          break;
        }
        case BinaryOp::Pow: {
          if (auto k = integral_exponent(nodes, n.b)) {
            if (*k < 0 && value_of(a) == 0.0)
              return domain_fail("zero base with negative exponent");
            result = pow_int(a, *k);
          } else {
            const S b = eval_node(e, n.b, env);
            if (value_of(a) <= 0.0)
              return domain_fail("power with non-integer exponent requires a positive base");
            result = exp(b * log(a));
          }
          break;
        }
      }
      break;
    }
  }
  if (!all_finite(result)) domain_fail("non-finite result");
  return result;
}

}  // namespace

Jet2 eval_jet2(const Expression& e, const Vec3& point) {
  Env<Jet2> env;
  env.value[0] = Jet2::variable(point.x(), 0);
  env.value[1] = Jet2::variable(point.y(), 1);
  env.value[2] = Jet2::variable(point.z(), 2);
  env.bound = 0b00111;
  return eval_node(e, e.root(), env);
}

Jet1 eval_jet1(const Expression& e, Var var, double t) {
  Env<Jet1> env;
  env.value[static_cast<int>(var)] = Jet1::variable(t);
  env.bound = static_cast<std::uint8_t>(1u << static_cast<int>(var));
  return eval_node(e, e.root(), env);
}

double eval_value(const Expression& e, const Vec3& point) {
  Env<double> env;
  env.value = {point.x(), point.y(), point.z(), 0.0, 0.0};
  env.bound = 0b00111;
  return eval_node(e, e.root(), env);
}

double eval_value1(const Expression& e, Var var, double t) {
  Env<double> env;
  env.value[static_cast<int>(var)] = t;
  env.bound = static_cast<std::uint8_t>(1u << static_cast<int>(var));
  return eval_node(e, e.root(), env);
}

}  // namespace geode
