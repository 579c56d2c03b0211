#include "beltrami/expression.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include "beltrami/errors.hpp"

namespace beltrami {

double arg_0_2pi(cplx z) {
  if (z == cplx{}) return 0.0;
  double a = std::atan2(z.imag(), z.real());
  if (a < 0.0) a += 2.0 * std::numbers::pi;
  // atan2 can round -tiny up to 2pi exactly.
  if (a >= 2.0 * std::numbers::pi) a = 0.0;
  return a;
}

namespace {

enum class Tok { kNumber, kIdent, kPlus, kMinus, kStar, kSlash, kCaret, kLParen, kRParen, kEnd };

struct Token {
  Tok kind;
  std::size_t offset;
  std::string_view text;
  double number = 0.0;
};

const std::unordered_map<std::string_view, Expression::Op>& function_table() {
  static const std::unordered_map<std::string_view, Expression::Op> table{
      {"exp", Expression::Op::kExp},   {"conj", Expression::Op::kConj},
      {"abs", Expression::Op::kAbs},   {"re", Expression::Op::kRe},
      {"im", Expression::Op::kIm},     {"arg", Expression::Op::kArg},
      {"sqrt", Expression::Op::kSqrt}, {"log", Expression::Op::kLog},
  };
  return table;
}

std::string_view function_name(Expression::Op op) {
  for (const auto& [name, fop] : function_table())
    if (fop == op) return name;
  return "?";
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    char c = text[pos];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
      continue;
    }
    std::size_t start = pos;
    if (is_digit(c) || (c == '.' && pos + 1 < text.size() && is_digit(text[pos + 1]))) {
      while (pos < text.size() && is_digit(text[pos])) ++pos;
      if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && is_digit(text[pos])) ++pos;
      }
      if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
        std::size_t save = pos++;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
        if (pos < text.size() && is_digit(text[pos])) {
          while (pos < text.size() && is_digit(text[pos])) ++pos;
        } else {
          pos = save;  // 'e' belongs to a following identifier
        }
      }
      Token t{Tok::kNumber, start, text.substr(start, pos - start)};
      auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (ec != std::errc{} || ptr != t.text.data() + t.text.size())
        throw SyntaxError(start, {"number"}, "malformed number at offset " + std::to_string(start));
      out.push_back(t);
      continue;
    }
    if (is_ident_start(c)) {
      while (pos < text.size() && is_ident_char(text[pos])) ++pos;
      out.push_back({Tok::kIdent, start, text.substr(start, pos - start)});
      continue;
    }
    Tok kind;
    switch (c) {
      case '+': kind = Tok::kPlus; break;
      case '-': kind = Tok::kMinus; break;
      case '*': kind = Tok::kStar; break;
      case '/': kind = Tok::kSlash; break;
      case '^': kind = Tok::kCaret; break;
      case '(': kind = Tok::kLParen; break;
      case ')': kind = Tok::kRParen; break;
      default:
        throw SyntaxError(start, {"operand", "operator"},
                          std::string("unexpected character '") + c + "' at offset " +
                              std::to_string(start));
    }
    out.push_back({kind, start, text.substr(start, 1)});
    ++pos;
  }
  out.push_back({Tok::kEnd, text.size(), {}});
  return out;
}

const std::vector<std::string> kOperandExpected{"number", "identifier", "'('", "'-'"};

}  // namespace

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, std::vector<std::string> variables)
      : tokens_(tokenize(text)) {
    expr_.variables_ = std::move(variables);
  }

  Expression run() {
    if (tokens_.size() == 1)
      throw SyntaxError(0, kOperandExpected, "empty expression");
    expr_.root_ = parse_expr();
    if (peek().kind != Tok::kEnd)
      throw SyntaxError(peek().offset, {"operator", "end of input"},
                        "unexpected token '" + std::string(peek().text) + "' at offset " +
                            std::to_string(peek().offset));
    return std::move(expr_);
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }

  int add(Expression::Node node) {
    expr_.nodes_.push_back(node);
    return static_cast<int>(expr_.nodes_.size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    while (peek().kind == Tok::kPlus || peek().kind == Tok::kMinus) {
      auto op = next().kind == Tok::kPlus ? Expression::Op::kAdd : Expression::Op::kSub;
      int rhs = parse_term();
      lhs = add({op, {}, -1, lhs, rhs});
    }
    return lhs;
  }

  int parse_term() {
    int lhs = parse_unary();
    while (peek().kind == Tok::kStar || peek().kind == Tok::kSlash) {
      auto op = next().kind == Tok::kStar ? Expression::Op::kMul : Expression::Op::kDiv;
      int rhs = parse_unary();
      lhs = add({op, {}, -1, lhs, rhs});
    }
    return lhs;
  }

  int parse_unary() {
    if (peek().kind == Tok::kMinus) {
      next();
      int operand = parse_unary();
      return add({Expression::Op::kNeg, {}, -1, operand, -1});
    }
    if (peek().kind == Tok::kPlus) {
      next();
      return parse_unary();
    }
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    if (peek().kind == Tok::kCaret) {
      next();
      int exponent = parse_unary();
      return add({Expression::Op::kPow, {}, -1, base, exponent});
    }
    return base;
  }

  int parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kNumber:
        next();
        return add({Expression::Op::kConst, cplx{t.number, 0.0}});
      case Tok::kLParen: {
        next();
        int inner = parse_expr();
        expect_rparen();
        return inner;
      }
      case Tok::kIdent: {
        next();
        if (t.text == "i") return add({Expression::Op::kConst, cplx{0.0, 1.0}});
        const auto& funcs = function_table();
        if (auto it = funcs.find(t.text); it != funcs.end()) {
          if (peek().kind != Tok::kLParen)
            throw SyntaxError(peek().offset, {"'('"},
                              "expected '(' after function '" + std::string(t.text) +
                                  "' at offset " + std::to_string(peek().offset));
          next();
          int arg = parse_expr();
          expect_rparen();
          return add({it->second, {}, -1, arg, -1});
        }
        const auto& vars = expr_.variables_;
        auto vit = std::find(vars.begin(), vars.end(), t.text);
        if (vit == vars.end()) throw UnknownIdentifier(t.offset, std::string(t.text));
        return add({Expression::Op::kVar, {}, static_cast<int>(vit - vars.begin())});
      }
      default:
        throw SyntaxError(t.offset, kOperandExpected,
                          "expected operand at offset " + std::to_string(t.offset));
    }
  }

  void expect_rparen() {
    if (peek().kind != Tok::kRParen)
      throw SyntaxError(peek().offset, {"')'", "operator"},
                        "expected ')' at offset " + std::to_string(peek().offset));
    next();
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  Expression expr_;
};

Expression Expression::parse(std::string_view text, std::vector<std::string> variables) {
  return ExpressionParser(text, std::move(variables)).run();
}

Expression Expression::constant(cplx value, std::vector<std::string> variables) {
  Expression e;
  e.variables_ = std::move(variables);
  e.nodes_.push_back({Op::kConst, value});
  e.root_ = 0;
  return e;
}

namespace {

cplx int_pow(cplx base, long long exponent) {
  bool invert = exponent < 0;
  unsigned long long e = invert ? static_cast<unsigned long long>(-exponent)
                                : static_cast<unsigned long long>(exponent);
  cplx result{1.0, 0.0};
  while (e) {
    if (e & 1ULL) result *= base;
    base *= base;
    e >>= 1;
  }
  return invert ? 1.0 / result : result;
}

cplx power(cplx base, cplx exponent) {
  if (exponent.imag() == 0.0) {
    double e = exponent.real();
    if (e == std::round(e) && std::abs(e) <= 1024.0) {
      if (base == cplx{} && e < 0.0) throw EvalError("zero raised to a negative power");
      return int_pow(base, static_cast<long long>(e));
    }
    if (base.imag() == 0.0 && base.real() > 0.0) return {std::pow(base.real(), e), 0.0};
  }
  if (base == cplx{}) {
    if (exponent.real() > 0.0) return {};
    throw EvalError("zero raised to a non-positive power");
  }
  return std::pow(base, exponent);
}

}  // namespace

cplx Expression::eval_node(int index, std::span<const cplx> values) const {
  const Node& n = nodes_[static_cast<std::size_t>(index)];
  switch (n.op) {
    case Op::kConst: return n.value;
    case Op::kVar: return values[static_cast<std::size_t>(n.slot)];
    case Op::kAdd: return eval_node(n.lhs, values) + eval_node(n.rhs, values);
    case Op::kSub: return eval_node(n.lhs, values) - eval_node(n.rhs, values);
    case Op::kMul: return eval_node(n.lhs, values) * eval_node(n.rhs, values);
    case Op::kDiv: {
      cplx num = eval_node(n.lhs, values);
      cplx den = eval_node(n.rhs, values);
      if (den == cplx{}) throw EvalError("division by zero");
      return num / den;
    }
    case Op::kPow: return power(eval_node(n.lhs, values), eval_node(n.rhs, values));
    case Op::kNeg: return -eval_node(n.lhs, values);
    case Op::kExp: return std::exp(eval_node(n.lhs, values));
    case Op::kConj: return std::conj(eval_node(n.lhs, values));
    case Op::kAbs: return {std::abs(eval_node(n.lhs, values)), 0.0};
    case Op::kRe: return {eval_node(n.lhs, values).real(), 0.0};
    case Op::kIm: return {eval_node(n.lhs, values).imag(), 0.0};
    case Op::kArg: return {arg_0_2pi(eval_node(n.lhs, values)), 0.0};
    case Op::kSqrt: return std::sqrt(eval_node(n.lhs, values));
    case Op::kLog: {
      cplx a = eval_node(n.lhs, values);
      if (a == cplx{}) throw EvalError("log of zero");
      return std::log(a);
    }
  }
  return {};
}

cplx Expression::evaluate(std::span<const cplx> values) const {
  if (values.size() < variables_.size())
    throw EvalError("expression expects " + std::to_string(variables_.size()) + " variables");
  cplx v = eval_node(root_, values);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw EvalError("non-finite result");
  return v;
}

namespace {

constexpr int kPrecAdd = 1;
constexpr int kPrecMul = 2;
constexpr int kPrecNeg = 3;
constexpr int kPrecPow = 4;
constexpr int kPrecAtom = 5;

int precedence(Expression::Op op) {
  using Op = Expression::Op;
  switch (op) {
    case Op::kAdd:
    case Op::kSub: return kPrecAdd;
    case Op::kMul:
    case Op::kDiv: return kPrecMul;
    case Op::kNeg: return kPrecNeg;
    case Op::kPow: return kPrecPow;
    default: return kPrecAtom;
  }
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_const(cplx v) {
  if (v.imag() == 0.0) {
    if (std::signbit(v.real())) return "(-" + format_real(-v.real()) + ")";
    return format_real(v.real());
  }
  if (v.real() == 0.0 && v.imag() == 1.0) return "i";
  std::string im = format_real(std::abs(v.imag())) + "*i";
  if (v.real() == 0.0) return std::signbit(v.imag()) ? "(-" + im + ")" : "(" + im + ")";
  return "(" + format_real(v.real()) + (std::signbit(v.imag()) ? "-" : "+") + im + ")";
}

}  // namespace

std::string Expression::print_node(int index, int parent_precedence, bool right_side) const {
  const Node& n = nodes_[static_cast<std::size_t>(index)];
  int prec = precedence(n.op);
  std::string s;
  switch (n.op) {
    case Op::kConst: return format_const(n.value);
    case Op::kVar: return variables_[static_cast<std::size_t>(n.slot)];
    case Op::kAdd:
    case Op::kSub:
    case Op::kMul:
    case Op::kDiv: {
      const char* sym = n.op == Op::kAdd ? " + " : n.op == Op::kSub ? " - "
                      : n.op == Op::kMul ? "*" : "/";
      s = print_node(n.lhs, prec, false) + sym + print_node(n.rhs, prec, true);
      break;
    }
    case Op::kPow:
      // Left operand binds tighter than '^' only if it is an atom.
      s = print_node(n.lhs, kPrecAtom, false) + "^" + print_node(n.rhs, kPrecNeg, false);
      break;
    case Op::kNeg: s = "-" + print_node(n.lhs, kPrecNeg, false); break;
    default:
      return std::string(function_name(n.op)) + "(" + print_node(n.lhs, 0, false) + ")";
  }
  bool parens = prec < parent_precedence || (right_side && prec == parent_precedence);
  return parens ? "(" + s + ")" : s;
}

std::string Expression::to_string() const { return print_node(root_, 0, false); }

bool Expression::is_zero_constant() const {
  const Node& n = nodes_[static_cast<std::size_t>(root_)];
  return n.op == Op::kConst && n.value == cplx{};
}

bool Expression::references(std::string_view variable) const {
  auto it = std::find(variables_.begin(), variables_.end(), variable);
  if (it == variables_.end()) return false;
  int slot = static_cast<int>(it - variables_.begin());
  return std::any_of(nodes_.begin(), nodes_.end(),
                     [slot](const Node& n) { return n.op == Op::kVar && n.slot == slot; });
}

}  // namespace beltrami
