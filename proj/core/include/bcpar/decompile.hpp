#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bcpar/classfile.hpp"
#include "bcpar/ir.hpp"

namespace bcpar {

struct DecompileContext {
  const ConstantPool* pool = nullptr;
  std::string owner;       // internal name of the declaring class
  std::string descriptor;  // method descriptor
  bool is_static = true;
};

/// Symbolic operand stack. Entries are values; long/double entries count as
/// two slots for the dup family.
struct StackState {
  std::vector<ExprPtr> entries;
  int depth_slots() const;
};

/// Operand-stack simulator producing three-address statements.
class Decompiler {
 public:
  explicit Decompiler(DecompileContext ctx);

  /// Feeds one instruction. Returns a statement when the instruction ends one
  /// at depth 0. Throws StackUnderflow, UnsupportedOpcode or
  /// NonEmptyStackAtBoundary.
  std::optional<Stmt> step(const Instr& in);
  const StackState& state() const { return stack_; }
  /// Marks the offset as a branch target (stack must be empty there).
  void add_branch_target(std::int32_t offset);

 private:
  ExprPtr pop();
  void push(ExprPtr e);
  std::vector<ExprPtr> pop_slots(int slots);
  void require_empty(const Instr& in, const char* what) const;
  std::string local_type(int slot, Kind k) const;
  ExprPtr constant_from_pool(int index) const;
  Stmt make(StmtKind kind, const Instr& in);

  DecompileContext ctx_;
  StackState stack_;
  std::map<int, std::string> slot_types_;
  std::vector<std::int32_t> targets_;
  std::optional<std::uint32_t> span_first_;
};

/// Decompiles a whole method body. Spans of the returned statements tile the
/// code; leading nops belong to the following statement.
std::vector<Stmt> decompile_method(const std::vector<Instr>& code, const DecompileContext& ctx);
std::vector<Stmt> decompile_method(const ClassModel& model, const MethodEntry& method);

/// Index of the statement whose span contains `offset`, or -1.
int stmt_at(const std::vector<Stmt>& stmts, std::int32_t offset);

}  // namespace bcpar
