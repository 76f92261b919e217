#pragma once

#include "geode/jets.hpp"
#include "geode/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace geode {

/// Variables recognized by the formula grammar. `W` is the ruled-family
/// parameter (spelled `w` or `omega` in input, printed as `w`).
enum class Var : std::uint8_t { X = 0, Y = 1, Z = 2, V = 3, W = 4 };
inline constexpr int kVarCount = 5;

const char* var_name(Var v);
std::optional<Var> var_from_name(std::string_view name);

enum class UnaryOp : std::uint8_t { Neg, Sin, Cos, Tan, Sqrt, Exp, Ln, Atan };
enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Pow };

/// Immutable parsed formula over the variables x, y, z, v, w.
///
/// Grammar (left-associative `+ - * /`, right-associative `^`, `^` binding
/// tighter than unary minus):
///
///   expr   := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := '-' unary | power
///   power  := atom ('^' unary)?
///   atom   := number | variable | function '(' expr ')' | '(' expr ')'
///
/// Functions: sin cos tan sqrt exp ln atan.
class Expression {
 public:
  enum class Kind : std::uint8_t { Constant, Variable, Unary, Binary };

  struct Node {
    Kind kind;
    double number = 0.0;      // Constant
    Var var = Var::X;         // Variable
    UnaryOp unary{};          // Unary
    BinaryOp binary{};        // Binary
    std::uint32_t a = 0;      // first child
    std::uint32_t b = 0;      // second child (Binary)
    std::uint32_t offset = 0; // byte offset in the source text
  };

  /// Parse `text`; throws ParseError with a byte offset on failure.
  static Expression parse(std::string_view text);

  /// Canonical text form; re-parsing it yields a structurally equal tree.
  std::string str() const;

  /// Text of the subtree rooted at `node` (used in error messages).
  std::string str(std::uint32_t node) const;

  bool equals(const Expression& other) const;

  /// Bitmask of variables appearing in the formula, indexed by Var.
  std::uint8_t used_vars() const;
  bool uses(Var v) const { return (used_vars() >> static_cast<int>(v)) & 1; }

  const std::vector<Node>& nodes() const { return nodes_; }
  std::uint32_t root() const { return root_; }

 private:
  std::vector<Node> nodes_;
  std::uint32_t root_ = 0;
  friend struct Parser;
};

/// Value with exact gradient and Hessian over (x, y, z) at `point`.
/// Throws DomainError on domain violations, naming the offending
/// sub-expression; never returns non-finite components.
Jet2 eval_jet2(const Expression& e, const Vec3& point);

/// Plain value with x, y, z bound to `point` (v, w unbound).
double eval_value(const Expression& e, const Vec3& point);

/// One-variable restriction: value and first/second derivative with `var`
/// bound to `t` and every other variable unbound.
Jet1 eval_jet1(const Expression& e, Var var, double t);
double eval_value1(const Expression& e, Var var, double t);

}  // namespace geode
