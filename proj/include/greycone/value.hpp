#pragma once

// Fixed-width integer semantics shared by the interpreter, the symbolic
// tracer and the solver. Values are carried as raw bit patterns in a
// uint32_t, masked to their width; signedness only matters for division,
// shifts, comparisons and numeric interpretation.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace greycone {

struct IntType {
  std::uint8_t width = 32;  // 1 (bool), 8, 16 or 32
  bool is_signed = false;

  constexpr bool is_bool() const { return width == 1; }
  friend constexpr bool operator==(IntType, IntType) = default;
};

inline constexpr IntType kBool{1, false};
inline constexpr IntType kU8{8, false};
inline constexpr IntType kI8{8, true};
inline constexpr IntType kU16{16, false};
inline constexpr IntType kI16{16, true};
inline constexpr IntType kU32{32, false};
inline constexpr IntType kI32{32, true};

std::string type_name(IntType t);
std::optional<IntType> parse_type_name(std::string_view s);

constexpr std::uint32_t width_mask(unsigned width) {
  return width >= 32 ? 0xFFFFFFFFu : ((1u << width) - 1u);
}

constexpr std::uint32_t truncate(std::uint64_t v, IntType t) {
  return static_cast<std::uint32_t>(v) & width_mask(t.width);
}

/// Numeric value of a bit pattern under the type's signedness.
constexpr std::int64_t to_numeric(std::uint32_t bits, IntType t) {
  bits &= width_mask(t.width);
  if (t.is_signed && t.width > 1 && (bits >> (t.width - 1)) & 1u) {
    return static_cast<std::int64_t>(bits) - (std::int64_t{1} << t.width);
  }
  return static_cast<std::int64_t>(bits);
}

constexpr std::int64_t type_min(IntType t) {
  return t.is_signed ? -(std::int64_t{1} << (t.width - 1)) : 0;
}

constexpr std::int64_t type_max(IntType t) {
  return t.is_signed ? (std::int64_t{1} << (t.width - 1)) - 1
                     : (std::int64_t{1} << t.width) - 1;
}

enum class Op : std::uint8_t {
  // arithmetic / bitwise, int x int -> int
  Add, Sub, Mul, Div, Rem, BitAnd, BitOr, BitXor, Shl, Shr,
  // comparisons, int x int -> bool
  Eq, Ne, Lt, Le, Gt, Ge,
  // logic, bool x bool -> bool
  LAnd, LOr,
  // unary
  Neg, BitNot, LNot,
};

constexpr bool is_compare(Op op) { return op >= Op::Eq && op <= Op::Ge; }
constexpr bool is_logic(Op op) { return op == Op::LAnd || op == Op::LOr; }
constexpr bool is_unary(Op op) { return op >= Op::Neg; }
constexpr bool is_arith(Op op) { return op <= Op::Shr; }

std::string_view op_symbol(Op op);    // C-like spelling, e.g. "+"
std::string_view op_mnemonic(Op op);  // s-expression spelling, e.g. "add"
std::optional<Op> parse_op_mnemonic(std::string_view s);

/// Comparison with the operands swapped: a op b  <=>  b swap(op) a.
Op swap_compare(Op op);
/// Logical negation of a comparison: !(a op b)  <=>  a negate(op) b.
Op negate_compare(Op op);

/// Applies a binary operator. `t` is the operand type (both operands share
/// it). Returns nullopt when the operation traps (division by zero).
std::optional<std::uint32_t> apply_binary(Op op, IntType t, std::uint32_t a,
                                          std::uint32_t b);

/// Applies a unary operator to an operand of type `t`.
std::uint32_t apply_unary(Op op, IntType t, std::uint32_t a);

}  // namespace greycone
