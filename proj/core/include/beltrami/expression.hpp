#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace beltrami {

using cplx = std::complex<double>;

/// Immutable expression tree over complex numbers.
///
/// Grammar (lowest to highest precedence):
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?          right associative
///   primary := number | 'i' | variable | func '(' expr ')' | '(' expr ')'
///
/// Variables are resolved to slots at parse time against a caller-supplied
/// name list, so evaluation takes a plain span of values in the same order.
class Expression {
 public:
  enum class Op : std::uint8_t {
    kConst,
    kVar,
    kAdd,
    kSub,
    kMul,
    kDiv,
    kPow,
    kNeg,
    kExp,
    kConj,
    kAbs,
    kRe,
    kIm,
    kArg,
    kSqrt,
    kLog,
  };

  struct Node {
    Op op;
    cplx value{};      // kConst
    int slot = -1;     // kVar
    int lhs = -1;      // unary operand / left child
    int rhs = -1;      // right child
  };

  /// Parses `text`; identifiers other than `i`, the function names and
  /// `variables` raise UnknownIdentifier.
  static Expression parse(std::string_view text, std::vector<std::string> variables);

  /// Constant expression (no variables referenced).
  static Expression constant(cplx value, std::vector<std::string> variables = {});

  cplx evaluate(std::span<const cplx> values) const;

  /// Canonical text form; parse(to_string()) evaluates identically.
  std::string to_string() const;

  bool is_zero_constant() const;
  bool references(std::string_view variable) const;
  const std::vector<std::string>& variables() const noexcept { return variables_; }
  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  Expression() = default;

  cplx eval_node(int index, std::span<const cplx> values) const;
  std::string print_node(int index, int parent_precedence, bool right_side) const;

  std::vector<Node> nodes_;
  int root_ = -1;
  std::vector<std::string> variables_;

  friend class ExpressionParser;
};

/// Variables available in coefficient expressions: z, w, r = |z|, theta = arg z in [0, 2pi).
inline const std::vector<std::string>& coefficient_variables() {
  static const std::vector<std::string> names{"z", "w", "r", "theta"};
  return names;
}

/// Variables available in majorant expressions (Q, Q1); z0 is the probe centre.
inline const std::vector<std::string>& majorant_variables() {
  static const std::vector<std::string> names{"z", "w", "r", "theta", "z0"};
  return names;
}

/// Argument in [0, 2pi); arg(0) = 0.
double arg_0_2pi(cplx z);

}  // namespace beltrami
