#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "bcpar/depcheck.hpp"
#include "bcpar/loopx.hpp"

namespace bcpar {

/// Tile loops get id kTileIdBase + id of the tiled loop.
inline constexpr int kTileIdBase = 1000;

enum class TransformKind { Identity, Interchange, Tile };
std::string_view transform_kind_name(TransformKind k);

struct TransformCandidate {
  TransformKind kind = TransformKind::Identity;
  int nest = -1;        // id of the nest's root loop
  int level_a = -1;     // interchange: outer loop id; tile: tiled loop id
  int level_b = -1;     // interchange: inner loop id
  int tile_size = 0;
  int tile_slot = -1;   // local slot of the new tile ivar
  int parallel_level = -1;  // loop id in the transformed nest
  Verdict parallel_verdict = Verdict::IP;
  std::vector<Reduction> reductions;

  bool certified = false;
  std::string certificate;

  std::string describe() const;
};

struct XformOptions {
  std::vector<int> tile_sizes{32, 64, 128};
  int free_slot = 0;  // first local slot the method does not use
  std::function<bool(int)> live_after_nest;
  FmOptions fm;
};

/// Identity at every IP/DP level, then legal interchanges inside perfect
/// chains (parallel level = the new outer loop), then tilings of each IP/DP
/// level. Every returned candidate is certified.
std::vector<TransformCandidate> enumerate(const NormalizedLoop& nest, const NestAnalysis& analysis,
                                          const XformOptions& opts = {});

/// Checks the candidate and attaches the certificate on success.
bool legality(TransformCandidate& cand, const NormalizedLoop& nest, const NestAnalysis& analysis,
              const XformOptions& opts = {});

/// Throws IllegalTransform for an uncertified candidate.
std::shared_ptr<NormalizedLoop> apply(const TransformCandidate& cand, const NormalizedLoop& nest);

/// Deep copy of a nest.
std::shared_ptr<NormalizedLoop> clone_nest(const NormalizedLoop& nest);

}  // namespace bcpar
