#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bcpar/dfg.hpp"
#include "bcpar/fm.hpp"
#include "bcpar/loopx.hpp"

namespace bcpar {

/// Σ coeffs[k]·ivar_k + Σ params + constant, ivars ordered outer to inner.
struct AffineExpr {
  std::vector<std::int64_t> coeffs;
  std::map<std::string, std::int64_t> params;
  std::int64_t constant = 0;
};

enum class AccessKind { Read, Write };

/// Affine bounds of one loop level: ivar >= each lower, ivar <= each upper.
/// Missing entries are bounds that are not affine.
struct AffineBound {
  std::vector<AffineExpr> lower, upper;
};

struct AffineAccess {
  /// `local3`, `Owner.f`, `local0.f`; `?` plus element type for arrays held
  /// in locals the nest itself writes.
  std::string array;
  std::string elem_type;
  AccessKind kind = AccessKind::Read;
  std::vector<AffineExpr> dims;  // subscripts, outermost first
  const Stmt* stmt = nullptr;
  int order = 0;                 // textual position of `stmt` in the nest
  std::vector<const NormalizedLoop*> loops;  // enclosing, outermost first
  std::vector<AffineBound> bounds;          // per entry of `loops`
  bool non_affine = false;
  bool unknown_base = false;

  const std::vector<std::int64_t>& coeffs(std::size_t dim) const { return dims[dim].coeffs; }
  std::int64_t consts(std::size_t dim) const { return dims[dim].constant; }
  std::string to_string() const;
};

/// Every array read and write in the nest body. Reading `c[i][j]` also reads
/// the row `c[i]`; rows are separate accesses of depth 1.
std::vector<AffineAccess> extract_affine(const NormalizedLoop& nest);

/// Affine form of an int expression in terms of the given ivar slots.
/// `is_param(slot)` tells which other locals are loop invariant.
std::optional<AffineExpr> to_affine(const ExprPtr& e, const std::vector<int>& ivars,
                                    const std::function<bool(int)>& is_param);

/// Relative order of a source and sink iteration at one loop level, in
/// execution order (a negative step reverses the ivar comparison).
enum class Dir { Before, Same, After };

struct DirConstraint {
  int loop_id = -1;
  Dir dir = Dir::Same;
};

/// Can an instance of `src` and an instance of `sink` touch the same element
/// with the given per-level ordering? Rational FM after a GCD test.
bool may_conflict(const AffineAccess& src, const AffineAccess& sink, const std::vector<DirConstraint>& dirs,
                  const FmOptions& fm = {});

enum class DepExists { No, Maybe };

struct DependenceResult {
  int source = -1, sink = -1;  // indices into the access list
  DepExists exists = DepExists::No;
  std::set<int> carried_by;    // loop ids
  bool loop_independent = false;
  std::set<DepKind> classes;
  std::vector<std::string> assumptions;
};

/// Tests one access pair in both orders. Distinct array locals are assumed
/// not to alias; rows of multi-dimensional arrays are assumed distinct.
DependenceResult test_dependence(const std::vector<AffineAccess>& accesses, int a, int b, const FmOptions& fm = {});
/// All pairs with at least one write on the same array.
std::vector<DependenceResult> all_dependences(const std::vector<AffineAccess>& accesses, const FmOptions& fm = {});

enum class Verdict { IP, DP, Serial };
std::string_view verdict_name(Verdict v);

enum class ReductionOp { Add, Mul, Min, Max };
std::string_view reduction_op_name(ReductionOp op);

struct Reduction {
  ReductionOp op = ReductionOp::Add;
  bool array = false;  // 1-D array accumulator instead of a scalar local
  int slot = -1;
  std::string type;    // scalar type or element type
  std::string lvalue() const;
};

struct LevelVerdict {
  int loop_id = -1;
  int ivar = -1;
  int depth = 0;
  Verdict verdict = Verdict::Serial;
  std::vector<Reduction> reductions;
  std::vector<int> private_scalars;
  std::vector<std::string> reasons;  // why a level is serial
};

struct ParallelismType {
  std::vector<LevelVerdict> levels;  // preorder
  std::vector<std::string> assumptions;
  const LevelVerdict* level(int loop_id) const;
  /// "fully parallelised", "partially parallelised" or "unable to run in parallel"
  std::string summary() const;
};

struct ClassifyOptions {
  /// Liveness of a local right after the nest. Defaults to "live".
  std::function<bool(int slot)> live_after_nest;
  FmOptions fm;
};

ParallelismType classify(const NormalizedLoop& nest, const std::vector<AffineAccess>& accesses,
                         const std::vector<DependenceResult>& results, const DepGraph& dfg,
                         const ClassifyOptions& opts = {});

/// extract_affine + all_dependences + build_dfg + classify.
struct NestAnalysis {
  std::vector<AffineAccess> accesses;
  std::vector<DependenceResult> deps;
  ParallelismType pt;
};
NestAnalysis analyze_nest(const NormalizedLoop& nest, const ClassifyOptions& opts = {});

// Scalar helpers shared with xform and parcodegen.

/// Locals written anywhere in `items`, loop ivars included.
std::set<int> locals_written_in(const std::vector<BodyItem>& items);
/// Is `slot` read in `items` before a definite write on some path?
bool upward_exposed(const std::vector<BodyItem>& items, int slot);
/// Is `slot` possibly read after `loop` finishes, before being rewritten?
/// Walks the enclosing bodies inside `nest`, then asks `live_after_nest`.
bool live_after(const NormalizedLoop& nest, const NormalizedLoop& loop, int slot,
                const std::function<bool(int)>& live_after_nest);
/// Is `s` of the form `v = v op e` (or `v += c`, `v = Math.min(v, e)`) for local v?
std::optional<ReductionOp> scalar_reduction_op(const Stmt& s, int slot);
/// Is `s` of the form `a[x] = a[x] op e` for array local `a`?
std::optional<ReductionOp> array_reduction_op(const Stmt& s, int array_slot);

}  // namespace bcpar
