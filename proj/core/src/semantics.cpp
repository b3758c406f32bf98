#include "bcpar/semantics.hpp"

#include <cmath>
#include <algorithm>
#include <limits>

namespace bcpar {

namespace {

using O = Opcode;

template <typename I, typename F>
I java_f2i(F x) {
  if (std::isnan(x)) return 0;
  if (x >= static_cast<F>(std::numeric_limits<I>::max())) return std::numeric_limits<I>::max();
  if (x <= static_cast<F>(std::numeric_limits<I>::min())) return std::numeric_limits<I>::min();
  return static_cast<I>(x);
}

template <typename F>
std::int32_t fcmp(F a, F b, int nan_result) {
  if (std::isnan(a) || std::isnan(b)) return nan_result;
  return a < b ? -1 : (a > b ? 1 : 0);
}

}  // namespace

bool is_binary_arith(Opcode op) {
  auto v = static_cast<unsigned>(op);
  return (v >= 0x60 && v <= 0x73) || (v >= 0x78 && v <= 0x83);
}

bool is_unary_arith(Opcode op) {
  auto v = static_cast<unsigned>(op);
  return (v >= 0x74 && v <= 0x77) || (v >= 0x85 && v <= 0x93);
}

bool is_compare(Opcode op) {
  auto v = static_cast<unsigned>(op);
  return v >= 0x94 && v <= 0x98;
}

Kind result_kind(Opcode op) {
  switch (op) {
    case O::i2l: case O::f2l: case O::d2l: return Kind::Long;
    case O::i2f: case O::l2f: case O::d2f: return Kind::Float;
    case O::i2d: case O::l2d: case O::f2d: return Kind::Double;
    case O::l2i: case O::f2i: case O::d2i: case O::i2b: case O::i2c: case O::i2s: return Kind::Int;
    default: break;
  }
  if (is_compare(op)) return Kind::Int;
  auto v = static_cast<unsigned>(op);
  if ((v >= 0x60 && v <= 0x77)) {
    static constexpr Kind order[] = {Kind::Int, Kind::Long, Kind::Float, Kind::Double};
    return order[(v - 0x60) % 4];
  }
  if (v >= 0x78 && v <= 0x83) return (v - 0x78) % 2 == 0 ? Kind::Int : Kind::Long;
  return Kind::Void;
}

Value apply_binary(Opcode op, Value a, Value b, ArithFault& fault) {
  fault = ArithFault::None;
  auto ui = [](std::int32_t x) { return static_cast<std::uint32_t>(x); };
  auto ul = [](std::int64_t x) { return static_cast<std::uint64_t>(x); };
  auto I = [](std::uint32_t x) { return Value::of_int(static_cast<std::int32_t>(x)); };
  auto L = [](std::uint64_t x) { return Value::of_long(static_cast<std::int64_t>(x)); };
  switch (op) {
    case O::iadd: return I(ui(a.i()) + ui(b.i()));
    case O::ladd: return L(ul(a.l()) + ul(b.l()));
    case O::fadd: return Value::of_float(a.f() + b.f());
    case O::dadd: return Value::of_double(a.d() + b.d());
    case O::isub: return I(ui(a.i()) - ui(b.i()));
    case O::lsub: return L(ul(a.l()) - ul(b.l()));
    case O::fsub: return Value::of_float(a.f() - b.f());
    case O::dsub: return Value::of_double(a.d() - b.d());
    case O::imul: return I(ui(a.i()) * ui(b.i()));
    case O::lmul: return L(ul(a.l()) * ul(b.l()));
    case O::fmul: return Value::of_float(a.f() * b.f());
    case O::dmul: return Value::of_double(a.d() * b.d());
    case O::idiv:
      if (b.i() == 0) { fault = ArithFault::DivideByZero; return Value::of_int(0); }
      if (a.i() == std::numeric_limits<std::int32_t>::min() && b.i() == -1) return a;
      return Value::of_int(a.i() / b.i());
    case O::ldiv:
      if (b.l() == 0) { fault = ArithFault::DivideByZero; return Value::of_long(0); }
      if (a.l() == std::numeric_limits<std::int64_t>::min() && b.l() == -1) return a;
      return Value::of_long(a.l() / b.l());
    case O::fdiv: return Value::of_float(a.f() / b.f());
    case O::ddiv: return Value::of_double(a.d() / b.d());
    case O::irem:
      if (b.i() == 0) { fault = ArithFault::DivideByZero; return Value::of_int(0); }
      if (b.i() == -1) return Value::of_int(0);
      return Value::of_int(a.i() % b.i());
    case O::lrem:
      if (b.l() == 0) { fault = ArithFault::DivideByZero; return Value::of_long(0); }
      if (b.l() == -1) return Value::of_long(0);
      return Value::of_long(a.l() % b.l());
    case O::frem: return Value::of_float(std::fmod(a.f(), b.f()));
    case O::drem: return Value::of_double(std::fmod(a.d(), b.d()));
    case O::ishl: return I(ui(a.i()) << (b.i() & 31));
    case O::lshl: return L(ul(a.l()) << (b.i() & 63));
    case O::ishr: return Value::of_int(a.i() >> (b.i() & 31));
    case O::lshr: return Value::of_long(a.l() >> (b.i() & 63));
    case O::iushr: return I(ui(a.i()) >> (b.i() & 31));
    case O::lushr: return L(ul(a.l()) >> (b.i() & 63));
    case O::iand: return Value::of_int(a.i() & b.i());
    case O::land: return Value::of_long(a.l() & b.l());
    case O::ior: return Value::of_int(a.i() | b.i());
    case O::lor: return Value::of_long(a.l() | b.l());
    case O::ixor: return Value::of_int(a.i() ^ b.i());
    case O::lxor: return Value::of_long(a.l() ^ b.l());
    default: break;
  }
  return Value::top();
}

Value apply_unary(Opcode op, Value v) {
  switch (op) {
    case O::ineg: return Value::of_int(static_cast<std::int32_t>(0u - static_cast<std::uint32_t>(v.i())));
    case O::lneg: return Value::of_long(static_cast<std::int64_t>(0ull - static_cast<std::uint64_t>(v.l())));
    case O::fneg: return Value::of_float(-v.f());
    case O::dneg: return Value::of_double(-v.d());
    case O::i2l: return Value::of_long(v.i());
    case O::i2f: return Value::of_float(static_cast<float>(v.i()));
    case O::i2d: return Value::of_double(v.i());
    case O::l2i: return Value::of_int(static_cast<std::int32_t>(static_cast<std::uint32_t>(v.l())));
    case O::l2f: return Value::of_float(static_cast<float>(v.l()));
    case O::l2d: return Value::of_double(static_cast<double>(v.l()));
    case O::f2i: return Value::of_int(java_f2i<std::int32_t>(v.f()));
    case O::f2l: return Value::of_long(java_f2i<std::int64_t>(v.f()));
    case O::f2d: return Value::of_double(v.f());
    case O::d2i: return Value::of_int(java_f2i<std::int32_t>(v.d()));
    case O::d2l: return Value::of_long(java_f2i<std::int64_t>(v.d()));
    case O::d2f: return Value::of_float(static_cast<float>(v.d()));
    case O::i2b: return Value::of_int(static_cast<std::int8_t>(v.i()));
    case O::i2c: return Value::of_int(static_cast<std::uint16_t>(v.i()));
    case O::i2s: return Value::of_int(static_cast<std::int16_t>(v.i()));
    default: break;
  }
  return Value::top();
}

Value apply_compare(Opcode op, Value a, Value b) {
  switch (op) {
    case O::lcmp: return Value::of_int(a.l() < b.l() ? -1 : (a.l() > b.l() ? 1 : 0));
    case O::fcmpl: return Value::of_int(fcmp(a.f(), b.f(), -1));
    case O::fcmpg: return Value::of_int(fcmp(a.f(), b.f(), 1));
    case O::dcmpl: return Value::of_int(fcmp(a.d(), b.d(), -1));
    case O::dcmpg: return Value::of_int(fcmp(a.d(), b.d(), 1));
    default: break;
  }
  return Value::top();
}

bool branch_taken(Opcode op, Value a, Value b) {
  switch (op) {
    case O::ifeq: return a.i() == 0;
    case O::ifne: return a.i() != 0;
    case O::iflt: return a.i() < 0;
    case O::ifge: return a.i() >= 0;
    case O::ifgt: return a.i() > 0;
    case O::ifle: return a.i() <= 0;
    case O::if_icmpeq: return a.i() == b.i();
    case O::if_icmpne: return a.i() != b.i();
    case O::if_icmplt: return a.i() < b.i();
    case O::if_icmpge: return a.i() >= b.i();
    case O::if_icmpgt: return a.i() > b.i();
    case O::if_icmple: return a.i() <= b.i();
    case O::if_acmpeq: return a.ref() == b.ref();
    case O::if_acmpne: return a.ref() != b.ref();
    case O::ifnull: return a.ref() == 0;
    case O::ifnonnull: return a.ref() != 0;
    case O::goto_: return true;
    default: break;
  }
  return false;
}

Value narrow_for_store(ElemKind e, Value v) {
  switch (e) {
    case ElemKind::Byte: return Value::of_int(static_cast<std::int8_t>(v.i()));
    case ElemKind::Char: return Value::of_int(static_cast<std::uint16_t>(v.i()));
    case ElemKind::Short: return Value::of_int(static_cast<std::int16_t>(v.i()));
    default: return v;
  }
}

}  // namespace bcpar

namespace bcpar {

void store_local(std::vector<Value>& locals, int slot, Value v) {
  auto need = static_cast<std::size_t>(slot + (v.wide() ? 2 : 1));
  if (locals.size() < need) locals.resize(need);
  if (slot > 0 && locals[static_cast<std::size_t>(slot - 1)].wide()) locals[static_cast<std::size_t>(slot - 1)] = Value::top();
  locals[static_cast<std::size_t>(slot)] = v;
  if (v.wide()) locals[static_cast<std::size_t>(slot + 1)] = Value::top();
}

}  // namespace bcpar

namespace bcpar {

double java_min(double a, double b) {
  if (a != a) return a;
  if (a == 0.0 && b == 0.0 && std::signbit(b)) return b;
  return a <= b ? a : b;
}

double java_max(double a, double b) {
  if (a != a) return a;
  if (a == 0.0 && b == 0.0 && std::signbit(a)) return b;
  return a >= b ? a : b;
}

float java_min(float a, float b) {
  if (a != a) return a;
  if (a == 0.0f && b == 0.0f && std::signbit(b)) return b;
  return a <= b ? a : b;
}

float java_max(float a, float b) {
  if (a != a) return a;
  if (a == 0.0f && b == 0.0f && std::signbit(a)) return b;
  return a >= b ? a : b;
}

std::optional<Value> eval_math(std::string_view n, std::string_view d, std::span<const Value> a) {
  if (d == "(D)D") {
    double x = a[0].d();
    if (n == "sqrt") return Value::of_double(std::sqrt(x));
    if (n == "sin") return Value::of_double(std::sin(x));
    if (n == "cos") return Value::of_double(std::cos(x));
    if (n == "tan") return Value::of_double(std::tan(x));
    if (n == "abs") return Value::of_double(std::fabs(x));
    if (n == "exp") return Value::of_double(std::exp(x));
    if (n == "log") return Value::of_double(std::log(x));
    if (n == "floor") return Value::of_double(std::floor(x));
    if (n == "ceil") return Value::of_double(std::ceil(x));
    return std::nullopt;
  }
  if (d == "(DD)D") {
    double x = a[0].d(), y = a[1].d();
    if (n == "min") return Value::of_double(java_min(x, y));
    if (n == "max") return Value::of_double(java_max(x, y));
    if (n == "pow") return Value::of_double(std::pow(x, y));
    if (n == "atan2") return Value::of_double(std::atan2(x, y));
    if (n == "hypot") return Value::of_double(std::hypot(x, y));
    return std::nullopt;
  }
  if (d == "(FF)F") {
    if (n == "min") return Value::of_float(java_min(a[0].f(), a[1].f()));
    if (n == "max") return Value::of_float(java_max(a[0].f(), a[1].f()));
    return std::nullopt;
  }
  if (d == "(F)F" && n == "abs") return Value::of_float(std::fabs(a[0].f()));
  if (d == "(II)I") {
    if (n == "min") return Value::of_int(std::min(a[0].i(), a[1].i()));
    if (n == "max") return Value::of_int(std::max(a[0].i(), a[1].i()));
    return std::nullopt;
  }
  if (d == "(JJ)J") {
    if (n == "min") return Value::of_long(std::min(a[0].l(), a[1].l()));
    if (n == "max") return Value::of_long(std::max(a[0].l(), a[1].l()));
    return std::nullopt;
  }
  if (d == "(I)I" && n == "abs") {
    std::int32_t x = a[0].i();
    return Value::of_int(x < 0 ? static_cast<std::int32_t>(0u - static_cast<std::uint32_t>(x)) : x);
  }
  if (d == "(J)J" && n == "abs") {
    std::int64_t x = a[0].l();
    return Value::of_long(x < 0 ? static_cast<std::int64_t>(0ull - static_cast<std::uint64_t>(x)) : x);
  }
  return std::nullopt;
}

}  // namespace bcpar
