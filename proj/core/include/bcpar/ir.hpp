#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bcpar/classfile.hpp"
#include "bcpar/opcodes.hpp"
#include "bcpar/value.hpp"

namespace bcpar {

enum class ExprKind : std::uint8_t {
  Const,
  Local,
  ArrayElem,      // args: array, index
  ArrayLength,    // args: array
  Field,          // args: object (instance) or none (static)
  Binary,         // args: lhs, rhs; op = iadd .. lxor
  Unary,          // args: x; op = neg or conversion
  Compare,        // args: lhs, rhs; op = lcmp .. dcmpg
  Call,           // args: receiver (non-static), arguments
  NewArray,       // args: length
  MultiNewArray,  // args: dimension lengths
  NewObject,      // uninitialized `new C`; replaced by Construct at <init>
  Construct,      // args: constructor arguments
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Symbolic value. Nodes are immutable and may be shared (dup).
struct Expr {
  ExprKind kind = ExprKind::Const;
  /// Field descriptor of the value: "I", "D", "[[D", "Ljava/lang/Object;".
  /// Calls returning void use "V".
  std::string type;
  Opcode op = Opcode::nop;  // Binary/Unary/Compare; invoke opcode for Call
  Value constant;           // Const
  int slot = -1;            // Local
  MemberRef member;         // Field, Call, Construct (owner = class)
  std::vector<ExprPtr> args;

  Kind kind_of() const { return descriptor_kind(type); }
  bool is_static_member() const { return (kind == ExprKind::Field && args.empty()) ||
                                         (kind == ExprKind::Call && op == Opcode::invokestatic); }
};

ExprPtr make_const(Value v, std::string type);
ExprPtr make_int(std::int32_t v);
ExprPtr make_local(int slot, std::string type);
ExprPtr make_array_elem(ExprPtr array, ExprPtr index, std::string elem_type);
ExprPtr make_array_length(ExprPtr array);
ExprPtr make_binary(Opcode op, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_unary(Opcode op, ExprPtr x);
ExprPtr make_call(Opcode op, MemberRef m, std::vector<ExprPtr> args);

/// Element descriptor of an array descriptor ("[[D" -> "[D").
std::string element_type(const std::string& array_type);

enum class StmtKind : std::uint8_t { Assign, ArrayStore, FieldStore, CallStmt, CondBranch, Goto, Return, Inc };

std::string_view stmt_kind_name(StmtKind k);

/// One three-address statement. `first`/`last` are the offsets of the first
/// and last instruction consumed; `end` is the offset just past `last`.
struct Stmt {
  StmtKind kind = StmtKind::Goto;
  ExprPtr target;  // Assign: Local; ArrayStore: ArrayElem; FieldStore: Field
  ExprPtr value;   // stored value, call expression, return value, branch lhs
  ExprPtr rhs;     // CondBranch right operand (null constant / 0 for one-operand forms)
  Opcode op = Opcode::nop;  // CondBranch / Goto opcode, Return opcode
  std::int32_t branch_target = -1;
  int slot = -1;   // Inc
  int delta = 0;   // Inc
  std::uint32_t first = 0, last = 0, end = 0;
};

/// Structural text used by dumps, golden files and equality of subscripts.
std::string to_string(const Expr& e);
std::string to_string(const Stmt& s);
/// `first-last: text`, one line per statement.
std::string dump_ir(const std::vector<Stmt>& stmts);

/// Visits every node reachable from `e` (shared nodes once per path).
void visit(const ExprPtr& e, const std::function<void(const Expr&)>& fn);
/// Expressions of a statement in evaluation order.
std::vector<ExprPtr> stmt_exprs(const Stmt& s);
bool contains_call(const ExprPtr& e);
bool reads_local(const ExprPtr& e, int slot);
/// Local slots read by the statement (array/index operands of the target count).
std::vector<int> locals_read(const Stmt& s);
/// Local slot written (Assign target or Inc), -1 otherwise.
int local_written(const Stmt& s);
bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

}  // namespace bcpar
