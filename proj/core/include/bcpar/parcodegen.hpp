#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bcpar/classfile.hpp"
#include "bcpar/depcheck.hpp"
#include "bcpar/loopx.hpp"
#include "bcpar/xform.hpp"

namespace bcpar {

enum class ChunkStrategy { Block, Cyclic };
std::string_view chunk_strategy_name(ChunkStrategy s);

/// Iteration indices (0-based, in units of the loop step) per worker.
/// Block: chunk c = [c·⌈T/N⌉, min((c+1)·⌈T/N⌉, T)). Cyclic: worker c runs
/// c, c+N, c+2N, ... below T; `chunks` then holds (c, T) with stride N.
struct ChunkSpec {
  int n_workers = 1;
  ChunkStrategy strategy = ChunkStrategy::Block;
  std::vector<std::pair<std::int64_t, std::int64_t>> chunks;
  std::int64_t stride = 1;
  /// Iteration indices of worker c.
  std::vector<std::int64_t> iterations(int c) const;
};

/// Throws std::invalid_argument for trip_count < 0 or n_workers < 1.
ChunkSpec make_chunks(std::int64_t trip_count, int n_workers, ChunkStrategy strategy = ChunkStrategy::Block);

struct CodegenOptions {
  int n_workers = 4;
  /// Emit Runtime.availableProcessors() instead of the baked constant.
  bool runtime_workers = false;
  ChunkStrategy strategy = ChunkStrategy::Block;
  /// First k used in `<Owner>$JPTask<k>`.
  int first_task_index = 0;
};

/// One nest of one method to rewrite.
struct NestPlan {
  std::shared_ptr<const NormalizedLoop> nest;  // transformed
  TransformCandidate candidate;
};

struct ParallelVariant {
  ClassModel driver;
  std::vector<ClassModel> tasks;
  std::string method, descriptor;
  std::string serial_name;  // `<method>$serial`
  std::vector<NestPlan> plans;
  int n_workers = 0;
  bool runtime_workers = false;
  ChunkStrategy strategy = ChunkStrategy::Block;
  std::vector<int> captures;        // captured local slots (first plan)
  std::string merge;                // reduction merge description
  std::vector<std::string> warnings;

  /// Internal class name -> serialized bytes.
  std::map<std::string, std::vector<std::uint8_t>> emit() const;
};

/// Rewrites `method` so each plan's parallel loop runs as tasks. The
/// original code is kept as `<method>$serial`. Throws CaptureFailure,
/// UnsupportedReduction or IllegalTransform.
ParallelVariant parallelize(const ClassModel& model, const std::string& method, const std::string& desc,
                            const std::vector<NestPlan>& plans, const CodegenOptions& opts = {});

/// Single-nest forms; check that the candidate's verdict is IP / DP.
ParallelVariant parallelize_ip(const ClassModel& model, const std::string& method, const std::string& desc,
                               const NestPlan& plan, const CodegenOptions& opts = {});
ParallelVariant parallelize_dp(const ClassModel& model, const std::string& method, const std::string& desc,
                               const NestPlan& plan, const CodegenOptions& opts = {});

/// Identity element of a reduction for the given descriptor, as an IR constant.
ExprPtr reduction_identity(ReductionOp op, const std::string& type);

}  // namespace bcpar
