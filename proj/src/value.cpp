#include "greycone/value.hpp"

#include <array>

namespace greycone {

namespace {

struct OpInfo {
  Op op;
  std::string_view symbol;
  std::string_view mnemonic;
};

constexpr std::array<OpInfo, 21> kOps{{
    {Op::Add, "+", "add"},     {Op::Sub, "-", "sub"},
    {Op::Mul, "*", "mul"},     {Op::Div, "/", "div"},
    {Op::Rem, "%", "rem"},     {Op::BitAnd, "&", "and"},
    {Op::BitOr, "|", "or"},    {Op::BitXor, "^", "xor"},
    {Op::Shl, "<<", "shl"},    {Op::Shr, ">>", "shr"},
    {Op::Eq, "==", "eq"},      {Op::Ne, "!=", "ne"},
    {Op::Lt, "<", "lt"},       {Op::Le, "<=", "le"},
    {Op::Gt, ">", "gt"},       {Op::Ge, ">=", "ge"},
    {Op::LAnd, "&&", "land"},  {Op::LOr, "||", "lor"},
    {Op::Neg, "-", "neg"},     {Op::BitNot, "~", "not"},
    {Op::LNot, "!", "lnot"},
}};

}  // namespace

std::string type_name(IntType t) {
  if (t.is_bool()) return "bool";
  return std::string(t.is_signed ? "i" : "u") + std::to_string(t.width);
}

std::optional<IntType> parse_type_name(std::string_view s) {
  for (IntType t : {kBool, kU8, kI8, kU16, kI16, kU32, kI32}) {
    if (type_name(t) == s) return t;
  }
  return std::nullopt;
}

std::string_view op_symbol(Op op) {
  return kOps[static_cast<std::size_t>(op)].symbol;
}

std::string_view op_mnemonic(Op op) {
  return kOps[static_cast<std::size_t>(op)].mnemonic;
}

std::optional<Op> parse_op_mnemonic(std::string_view s) {
  for (const auto& info : kOps) {
    if (info.mnemonic == s) return info.op;
  }
  return std::nullopt;
}

Op swap_compare(Op op) {
  switch (op) {
    case Op::Lt: return Op::Gt;
    case Op::Le: return Op::Ge;
    case Op::Gt: return Op::Lt;
    case Op::Ge: return Op::Le;
    default: return op;
  }
}

Op negate_compare(Op op) {
  switch (op) {
    case Op::Eq: return Op::Ne;
    case Op::Ne: return Op::Eq;
    case Op::Lt: return Op::Ge;
    case Op::Le: return Op::Gt;
    case Op::Gt: return Op::Le;
    case Op::Ge: return Op::Lt;
    default: return op;
  }
}

std::optional<std::uint32_t> apply_binary(Op op, IntType t, std::uint32_t a,
                                          std::uint32_t b) {
  const std::uint32_t m = width_mask(t.width);
  a &= m;
  b &= m;
  switch (op) {
    case Op::Add: return (a + b) & m;
    case Op::Sub: return (a - b) & m;
    case Op::Mul:
      return static_cast<std::uint32_t>(std::uint64_t{a} * b) & m;
    case Op::Div:
    case Op::Rem: {
      if (b == 0) return std::nullopt;
      if (!t.is_signed) return op == Op::Div ? a / b : a % b;
      // int64 keeps MIN / -1 well defined; truncation wraps it back to MIN.
      const std::int64_t x = to_numeric(a, t);
      const std::int64_t y = to_numeric(b, t);
      const std::int64_t r = op == Op::Div ? x / y : x % y;
      return truncate(static_cast<std::uint64_t>(r), t);
    }
    case Op::BitAnd: return a & b;
    case Op::BitOr: return a | b;
    case Op::BitXor: return a ^ b;
    case Op::Shl:
      if (b >= t.width) return 0u;
      return static_cast<std::uint32_t>(std::uint64_t{a} << b) & m;
    case Op::Shr:
      if (t.is_signed) {
        const std::int64_t x = to_numeric(a, t);
        const std::int64_t r = b >= t.width ? (x < 0 ? -1 : 0) : (x >> b);
        return truncate(static_cast<std::uint64_t>(r), t);
      }
      return b >= t.width ? 0u : a >> b;
    case Op::Eq: return a == b ? 1u : 0u;
    case Op::Ne: return a != b ? 1u : 0u;
    case Op::Lt: return to_numeric(a, t) < to_numeric(b, t) ? 1u : 0u;
    case Op::Le: return to_numeric(a, t) <= to_numeric(b, t) ? 1u : 0u;
    case Op::Gt: return to_numeric(a, t) > to_numeric(b, t) ? 1u : 0u;
    case Op::Ge: return to_numeric(a, t) >= to_numeric(b, t) ? 1u : 0u;
    case Op::LAnd: return (a && b) ? 1u : 0u;
    case Op::LOr: return (a || b) ? 1u : 0u;
    default: break;
  }
  return std::nullopt;
}

std::uint32_t apply_unary(Op op, IntType t, std::uint32_t a) {
  const std::uint32_t m = width_mask(t.width);
  switch (op) {
    case Op::Neg: return (0u - a) & m;
    case Op::BitNot: return ~a & m;
    case Op::LNot: return (a & 1u) ? 0u : 1u;
    default: return a & m;
  }
}

}  // namespace greycone
