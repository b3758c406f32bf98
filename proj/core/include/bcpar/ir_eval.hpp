#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bcpar/interp.hpp"
#include "bcpar/ir.hpp"

namespace bcpar {

/// A concrete storage location touched while evaluating IR.
struct Location {
  enum class Kind { Local, Static, Field, Element } kind = Kind::Local;
  int slot = -1;
  std::uint32_t object = 0;  // Field/Element
  std::int32_t index = 0;    // Element
  std::string name;          // Static: owner.name, Field: name

  static Location local(int slot) { return {Kind::Local, slot, 0, 0, {}}; }
  static Location element(std::uint32_t obj, std::int32_t idx) { return {Kind::Element, -1, obj, idx, {}}; }
  static Location field(std::uint32_t obj, std::string n) { return {Kind::Field, -1, obj, 0, std::move(n)}; }
  static Location static_field(std::string n) { return {Kind::Static, -1, 0, 0, std::move(n)}; }
  friend bool operator==(const Location&, const Location&) = default;
};

struct IrEvalOptions {
  std::uint64_t statement_budget = 100'000'000;
  ExecConfig exec;  // used for calls into bytecode methods
  std::function<void(int stmt, const Location&, Value)> on_read;
  std::function<void(int stmt, const Location&, Value)> on_write;
};

struct IrEvalResult {
  std::optional<Value> ret;
  Trap trap;
  std::vector<Value> locals;
  std::uint64_t statements = 0;
};

/// Evaluates decompiled statements from the given initial locals. Branch
/// targets resolve to the statement whose span contains them.
IrEvalResult eval_ir(const std::vector<Stmt>& stmts, std::vector<Value> locals, Heap& heap,
                     const ClassPath& classes, const IrEvalOptions& options = {});

}  // namespace bcpar
