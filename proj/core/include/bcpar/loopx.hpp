#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bcpar/classfile.hpp"
#include "bcpar/ir.hpp"

namespace bcpar {

enum class LoopLayout { BottomTest, TopTest };
std::string_view layout_name(LoopLayout l);

/// A goto/conditional-branch cycle found in bytecode.
///  BottomTest: goto C; B: body; C: cond; if(..) goto B; X:
///  TopTest:    C: cond; if(..) goto X; body; goto C; X:
struct LoopCandidate {
  std::uint32_t goto_offset = 0;
  std::uint32_t cond_offset = 0;    // first instruction of the condition block
  std::uint32_t branch_offset = 0;  // the conditional branch closing the condition
  std::uint32_t body_begin = 0;     // [body_begin, body_end): body without control
  std::uint32_t body_end = 0;       //   instructions and without the update
  std::optional<std::uint32_t> update_offset;  // trailing iinc, when present
  std::uint32_t region_begin = 0;   // min(goto, cond)
  std::uint32_t region_end = 0;     // first instruction after the loop
  LoopLayout layout = LoopLayout::BottomTest;
  std::vector<LoopCandidate> children;
};

/// Finds loops in `code` (which may be a sub-range of a method) and returns
/// them as a forest in offset order. Throws IrregularControlFlow for a
/// backward branch matching neither layout.
std::vector<LoopCandidate> extract_loops(const std::vector<Instr>& code);

enum class Rel { Lt, Le, Gt, Ge };
std::string_view rel_name(Rel r);

struct NormalizedLoop;

/// Element of a loop body or of a method's top level.
struct BodyItem {
  Stmt stmt;
  std::shared_ptr<const NormalizedLoop> loop;
  bool is_loop() const { return loop != nullptr; }
};

struct LoopHeader {
  int id = -1;     // preorder number within the method
  int ivar = -1;   // local slot
  ExprPtr init;
  ExprPtr bound;
  Rel rel = Rel::Lt;
  int step = 1;
};

/// Canonical counted loop: for (ivar = init; ivar REL bound; ivar += step).
struct NormalizedLoop {
  LoopHeader header;
  std::vector<BodyItem> body;
  /// Branch targets inside `body` meaning "next iteration".
  std::vector<std::int32_t> continue_targets;
  bool tile_loop = false;  // created by tiling; not present in the original code

  // provenance in the original bytecode
  LoopLayout layout = LoopLayout::BottomTest;
  std::uint32_t init_offset = 0;  // first instruction of the init store
  std::uint32_t region_end = 0;
  std::uint32_t body_begin = 0, body_end = 0;

  std::vector<std::shared_ptr<const NormalizedLoop>> children() const;
  /// Number of iterations for concrete init/bound values.
  std::int64_t trip_count(std::int64_t init, std::int64_t bound) const;
  std::string trip_count_expr() const;
};

std::int64_t trip_count(Rel rel, int step, std::int64_t init, std::int64_t bound);

/// Loops of one method with the straight-line statements around them.
struct LoopForest {
  std::vector<BodyItem> items;  // top-level sequence
  std::vector<std::shared_ptr<const NormalizedLoop>> roots;
  std::vector<std::string> rejected;  // candidates that failed normalization
};

/// Normalizes one candidate against the method's statements. Children are
/// normalized recursively. Throws NonCanonicalLoop.
std::shared_ptr<NormalizedLoop> normalize_loop(const LoopCandidate& cand, const std::vector<Stmt>& stmts);

/// extract + normalize for a whole method. Non-canonical loops are recorded
/// in `rejected` and their inner loops are tried as roots instead.
LoopForest build_forest(const std::vector<Instr>& code, const std::vector<Stmt>& stmts);

/// Preorder walk over a nest.
void for_each_loop(const NormalizedLoop& root, const std::function<void(const NormalizedLoop&, int depth)>& fn);
const NormalizedLoop* find_loop(const NormalizedLoop& root, int id);
/// Statements of the nest (loop headers excluded) in textual order.
std::vector<const Stmt*> nest_statements(const NormalizedLoop& root);

}  // namespace bcpar
