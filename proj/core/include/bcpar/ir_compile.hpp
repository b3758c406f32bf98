#pragma once

#include <cstdint>
#include <functional>

#include "bcpar/assembler.hpp"
#include "bcpar/ir.hpp"
#include "bcpar/loopx.hpp"

namespace bcpar {

/// Maps an original bytecode offset (a branch target) to a label.
using Resolver = std::function<Label(std::int32_t offset)>;

/// Compiles IR back to stack code. Statements whose value reuses the
/// target's array and index nodes (what `dup2` produced) are emitted with
/// `dup2` again, so `a[f()] += x` evaluates f once.
class IrCompiler {
 public:
  explicit IrCompiler(CodeBuilder& cb) : cb_(&cb) {}

  /// Called for every loop before it is compiled serially. Returning true
  /// means the hook emitted the loop itself.
  std::function<bool(const NormalizedLoop&, const Resolver&)> loop_hook;

  void expr(const ExprPtr& e);
  void stmt(const Stmt& s, const Resolver& resolve);
  void loop(const NormalizedLoop& l, const Resolver& outer);
  /// Body items of `owner` (continue targets jump to `cont`), or top-level
  /// items when `owner` is null.
  void items(const std::vector<BodyItem>& items, const NormalizedLoop* owner, Label cont, const Resolver& outer);

  CodeBuilder& builder() { return *cb_; }

 private:
  CodeBuilder* cb_;
};

/// Pushes the given int-typed loop bound/init comparison opcode for `rel`.
Opcode loop_branch_op(Rel rel);

}  // namespace bcpar
