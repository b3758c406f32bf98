#pragma once

#include <bit>
#include <cstdint>
#include <string>

#include "bcpar/opcodes.hpp"

namespace bcpar {

/// One JVM value. References are heap handles (0 is null). `Top` marks the
/// upper half of a long/double in local and stack slot arrays.
struct Value {
  enum class Tag : std::uint8_t { Top, Int, Long, Float, Double, Ref };

  Tag tag = Tag::Top;
  std::uint64_t bits = 0;

  static Value top() { return {}; }
  static Value of_int(std::int32_t v) { return {Tag::Int, static_cast<std::uint32_t>(v)}; }
  static Value of_long(std::int64_t v) { return {Tag::Long, static_cast<std::uint64_t>(v)}; }
  static Value of_float(float v) { return {Tag::Float, std::bit_cast<std::uint32_t>(v)}; }
  static Value of_double(double v) { return {Tag::Double, std::bit_cast<std::uint64_t>(v)}; }
  static Value of_ref(std::uint32_t handle) { return {Tag::Ref, handle}; }
  static Value null() { return of_ref(0); }
  static Value zero_of(Kind k);

  std::int32_t i() const { return static_cast<std::int32_t>(static_cast<std::uint32_t>(bits)); }
  std::int64_t l() const { return static_cast<std::int64_t>(bits); }
  float f() const { return std::bit_cast<float>(static_cast<std::uint32_t>(bits)); }
  double d() const { return std::bit_cast<double>(bits); }
  std::uint32_t ref() const { return static_cast<std::uint32_t>(bits); }

  Kind kind() const;
  bool wide() const { return tag == Tag::Long || tag == Tag::Double; }

  /// Bitwise identity (NaN payloads included).
  friend bool operator==(const Value&, const Value&) = default;
};

std::string to_string(const Value& v);

}  // namespace bcpar
