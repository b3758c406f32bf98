#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bcpar/classfile.hpp"
#include "bcpar/interp.hpp"
#include "bcpar/loopx.hpp"

namespace bcpar::testkit {

// ----------------------------------------------------------- straight line

/// `static int run(int[] I, long[] J, float[] F, double[] D)` without
/// branches: random arithmetic over all four kinds, conversions, compares,
/// array loads and stores, dup/dup_x1/dup2/dup2_x2/swap/pop forms and iinc.
/// Every statement leaves the stack empty. The scalars are copied to
/// elements 8.. of the arrays before returning.
struct StraightLine {
  ClassModel model;
  std::string owner, method = "run", desc = "([I[J[F[D)I";
};

StraightLine random_straight_line(std::uint64_t seed);
/// Four arrays of length 16, filled from `seed`.
std::vector<Value> straight_line_args(Heap& heap, std::uint64_t seed);

// ------------------------------------------------------------ affine nests

/// Loop `for (i = lo; i < hi [+ parent ivar]; i += step)`; step -1 runs
/// from hi-1 down to lo.
struct LoopSpec {
  int id = 0;
  int parent = -1;
  int depth = 0;
  int lo = 0, hi = 8;
  bool triangular = false;  // hi is added to the parent's ivar
  int step = 1;
};

/// One subscript list; each dimension holds a coefficient per enclosing
/// loop (outermost first) followed by the constant.
struct RefSpec {
  int array = 0;  // local slot: 0 int[] a, 1 int[] b, 2 int[][] c
  std::vector<std::vector<int>> dims;
  bool write = false;
};

struct StmtSpec {
  std::vector<int> loops;  // enclosing loop ids, outermost first
  RefSpec target;
  std::vector<RefSpec> reads;
};

struct AffineNest {
  ClassModel model;
  std::string owner, method = "nest", desc = "([I[I[[I)V";
  std::vector<LoopSpec> loops;  // preorder, index == id
  std::vector<StmtSpec> stmts;  // textual order
};

/// Depth <= 3, constant bounds <= 8, coefficients in [-3, 3].
AffineNest random_affine_nest(std::uint64_t seed);

/// Every iteration vector of the given loops (outer first).
std::vector<std::vector<int>> iterations(const AffineNest& nest, const std::vector<int>& loops);
/// Element subscripts of `ref` at iteration `it`.
std::vector<int> subscripts(const RefSpec& ref, const std::vector<int>& it);

// ---------------------------------------------------------------- rewrite

/// Copy of `model` whose `method` runs `transformed` serially in place of
/// the nest that starts at the same offset.
ClassModel rewrite_serial(const ClassModel& model, const std::string& method, const std::string& desc,
                          const NormalizedLoop& transformed);

}  // namespace bcpar::testkit
