#include "bcpar/value.hpp"

#include <cstdio>

namespace bcpar {

Value Value::zero_of(Kind k) {
  switch (k) {
    case Kind::Int: return of_int(0);
    case Kind::Long: return of_long(0);
    case Kind::Float: return of_float(0.0f);
    case Kind::Double: return of_double(0.0);
    case Kind::Ref: return null();
    case Kind::Void: break;
  }
  return top();
}

Kind Value::kind() const {
  switch (tag) {
    case Tag::Int: return Kind::Int;
    case Tag::Long: return Kind::Long;
    case Tag::Float: return Kind::Float;
    case Tag::Double: return Kind::Double;
    case Tag::Ref: return Kind::Ref;
    case Tag::Top: break;
  }
  return Kind::Void;
}

std::string to_string(const Value& v) {
  char buf[64];
  switch (v.tag) {
    case Value::Tag::Top: return "top";
    case Value::Tag::Int: return std::to_string(v.i());
    case Value::Tag::Long: return std::to_string(v.l()) + "L";
    case Value::Tag::Float:
      std::snprintf(buf, sizeof buf, "%.9gf", static_cast<double>(v.f()));
      return buf;
    case Value::Tag::Double:
      std::snprintf(buf, sizeof buf, "%.17g", v.d());
      return buf;
    case Value::Tag::Ref:
      return v.ref() == 0 ? "null" : "@" + std::to_string(v.ref());
  }
  return "?";
}

}  // namespace bcpar
