#pragma once

#include <optional>

#include "bcpar/opcodes.hpp"
#include "bcpar/value.hpp"

namespace bcpar {

/// Arithmetic faults the JVM raises as exceptions.
enum class ArithFault { None, DivideByZero };

/// JVM semantics of the binary arithmetic/logic opcodes (iadd .. lxor).
Value apply_binary(Opcode op, Value lhs, Value rhs, ArithFault& fault);
/// neg and the primitive conversions (i2l .. i2s).
Value apply_unary(Opcode op, Value v);
/// lcmp, fcmpl, fcmpg, dcmpl, dcmpg.
Value apply_compare(Opcode op, Value lhs, Value rhs);
/// Branch decision of a conditional branch opcode given its popped operands.
bool branch_taken(Opcode op, Value lhs, Value rhs);

bool is_binary_arith(Opcode op);
bool is_unary_arith(Opcode op);  // negations and conversions
bool is_compare(Opcode op);
/// Result kind of a binary / unary / compare opcode.
Kind result_kind(Opcode op);

/// Value after storing into an element of the given kind (truncation for
/// byte/char/short) and after loading it back (sign/zero extension).
Value narrow_for_store(ElemKind e, Value v);

}  // namespace bcpar

#include <vector>

namespace bcpar {

/// Writes a local slot with JVM slot rules: long/double take two slots and
/// overwriting half of a wide value invalidates it.
void store_local(std::vector<Value>& locals, int slot, Value v);

}  // namespace bcpar

#include <span>
#include <string_view>

namespace bcpar {

/// java.lang.Math methods the interpreter models. nullopt when not modeled.
std::optional<Value> eval_math(std::string_view name, std::string_view desc, std::span<const Value> args);
/// Java's Math.min/max semantics (NaN and signed zero).
double java_min(double a, double b);
double java_max(double a, double b);
float java_min(float a, float b);
float java_max(float a, float b);

}  // namespace bcpar
