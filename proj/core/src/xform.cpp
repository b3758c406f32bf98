#include "bcpar/xform.hpp"

#include <algorithm>
#include <map>

#include "bcpar/error.hpp"

namespace bcpar {

std::string_view transform_kind_name(TransformKind k) {
  switch (k) {
    case TransformKind::Identity: return "identity";
    case TransformKind::Interchange: return "interchange";
    case TransformKind::Tile: return "tile";
  }
  return "?";
}

std::string TransformCandidate::describe() const {
  std::string s(transform_kind_name(kind));
  if (kind == TransformKind::Interchange) s += "(" + std::to_string(level_a) + "," + std::to_string(level_b) + ")";
  if (kind == TransformKind::Tile) s += "(" + std::to_string(level_a) + "," + std::to_string(tile_size) + ")";
  return s + "@" + std::to_string(parallel_level);
}

std::shared_ptr<NormalizedLoop> clone_nest(const NormalizedLoop& nest) {
  auto out = std::make_shared<NormalizedLoop>(nest);
  for (auto& it : out->body)
    if (it.is_loop()) it.loop = clone_nest(*it.loop);
  return out;
}

namespace {

NormalizedLoop* find_mut(NormalizedLoop& root, int id) {
  if (root.header.id == id) return &root;
  for (auto& it : root.body) {
    if (!it.is_loop()) continue;
    // clone_nest gives each node a unique owner, so the cast is safe
    if (auto* f = find_mut(const_cast<NormalizedLoop&>(*it.loop), id)) return f;
  }
  return nullptr;
}

/// Loops from `outer` down to `inner` when each one in between has exactly
/// one body item, the next loop. Empty when not a perfect chain.
std::vector<const NormalizedLoop*> perfect_chain(const NormalizedLoop& outer, int inner_id) {
  std::vector<const NormalizedLoop*> chain{&outer};
  const NormalizedLoop* cur = &outer;
  while (cur->header.id != inner_id) {
    if (cur->body.size() != 1 || !cur->body[0].is_loop()) return {};
    cur = cur->body[0].loop.get();
    chain.push_back(cur);
  }
  return chain;
}

bool merge_dirs(std::map<int, Dir>& into, const std::vector<DirConstraint>& add) {
  for (const auto& d : add) {
    auto [it, fresh] = into.emplace(d.loop_id, d.dir);
    if (!fresh && it->second != d.dir) return false;
  }
  return true;
}

/// The order a dependence is checked in after swapping two levels.
bool interchange_breaks(const AffineAccess& src, const AffineAccess& sink, int a_id, int b_id, const FmOptions& fm) {
  std::vector<int> orig;
  for (std::size_t k = 0; k < src.loops.size() && k < sink.loops.size() && src.loops[k] == sink.loops[k]; ++k)
    orig.push_back(src.loops[k]->header.id);
  auto pa = std::find(orig.begin(), orig.end(), a_id);
  auto pb = std::find(orig.begin(), orig.end(), b_id);
  if (pa == orig.end() || pb == orig.end()) return false;
  std::vector<int> swapped = orig;
  std::iter_swap(swapped.begin() + (pa - orig.begin()), swapped.begin() + (pb - orig.begin()));
  for (std::size_t a = 0; a < orig.size(); ++a) {
    std::vector<DirConstraint> before;
    for (std::size_t i = 0; i < a; ++i) before.push_back({orig[i], Dir::Same});
    before.push_back({orig[a], Dir::Before});
    for (std::size_t k = 0; k < swapped.size(); ++k) {
      std::vector<DirConstraint> after;
      for (std::size_t i = 0; i < k; ++i) after.push_back({swapped[i], Dir::Same});
      after.push_back({swapped[k], Dir::After});
      std::map<int, Dir> merged;
      if (!merge_dirs(merged, before) || !merge_dirs(merged, after)) continue;
      std::vector<DirConstraint> dirs;
      for (auto [id, d] : merged) dirs.push_back({id, d});
      if (may_conflict(src, sink, dirs, fm)) return true;
    }
  }
  return false;
}

bool reads_any(const ExprPtr& e, const std::vector<int>& slots) {
  return std::any_of(slots.begin(), slots.end(), [&](int s) { return reads_local(e, s); });
}

}  // namespace

bool legality(TransformCandidate& cand, const NormalizedLoop& nest, const NestAnalysis& analysis,
              const XformOptions& opts) {
  cand.certified = false;
  cand.certificate.clear();
  auto level_ok = [&](const ParallelismType& pt, int id, std::string& why) {
    const auto* lv = pt.level(id);
    if (!lv) {
      why = "no loop " + std::to_string(id);
      return false;
    }
    if (lv->verdict == Verdict::Serial) {
      why = "loop " + std::to_string(id) + " is serial";
      return false;
    }
    cand.parallel_verdict = lv->verdict;
    cand.reductions = lv->reductions;
    return true;
  };
  std::string why;

  switch (cand.kind) {
    case TransformKind::Identity:
      if (!level_ok(analysis.pt, cand.parallel_level, why)) return false;
      cand.certificate = "identity; loop " + std::to_string(cand.parallel_level) + " is " +
                         std::string(verdict_name(cand.parallel_verdict));
      break;

    case TransformKind::Interchange: {
      const NormalizedLoop* outer = find_loop(nest, cand.level_a);
      if (!outer) return false;
      auto chain = perfect_chain(*outer, cand.level_b);
      if (chain.size() < 2) return false;
      std::vector<int> ivars;
      for (const auto* l : chain) ivars.push_back(l->header.ivar);
      for (const auto* l : chain)
        if (reads_any(l->header.init, ivars) || reads_any(l->header.bound, ivars)) return false;
      const NormalizedLoop& inner = *chain.back();
      std::set<int> scalars = locals_written_in(inner.body);
      for (int v : scalars) {
        if (std::find(ivars.begin(), ivars.end(), v) != ivars.end()) continue;
        if (upward_exposed(inner.body, v) || live_after(nest, inner, v, opts.live_after_nest)) return false;
      }
      for (int v : {chain.front()->header.ivar, inner.header.ivar})
        if (live_after(nest, *chain.front(), v, opts.live_after_nest)) return false;
      const auto& acc = analysis.accesses;
      for (const auto& d : analysis.deps) {
        const auto& a = acc[static_cast<std::size_t>(d.source)];
        const auto& b = acc[static_cast<std::size_t>(d.sink)];
        if (interchange_breaks(a, b, cand.level_a, cand.level_b, opts.fm)) return false;
        if (d.source != d.sink && interchange_breaks(b, a, cand.level_a, cand.level_b, opts.fm)) return false;
      }
      cand.certified = true;  // needed by apply below
      auto moved = apply(cand, nest);
      cand.certified = false;
      ClassifyOptions co{opts.live_after_nest, opts.fm};
      auto re = analyze_nest(*moved, co);
      if (!level_ok(re.pt, cand.parallel_level, why)) return false;
      cand.certificate = "interchange; no dependence direction turns lexicographically negative; loop " +
                         std::to_string(cand.parallel_level) + " is " +
                         std::string(verdict_name(cand.parallel_verdict)) + " after the swap";
      break;
    }

    case TransformKind::Tile: {
      const NormalizedLoop* l = find_loop(nest, cand.level_a);
      if (!l || l->header.rel != Rel::Lt || l->header.step <= 0 || cand.tile_size < 1 || cand.tile_slot < 0) return false;
      if (!level_ok(analysis.pt, cand.level_a, why)) return false;
      if (live_after(nest, *l, l->header.ivar, opts.live_after_nest)) return false;
      cand.certified = true;
      auto tiled = apply(cand, nest);
      cand.certified = false;
      ClassifyOptions co{opts.live_after_nest, opts.fm};
      auto re = analyze_nest(*tiled, co);
      if (!level_ok(re.pt, cand.parallel_level, why)) return false;
      cand.certificate = "tile; loop " + std::to_string(cand.level_a) + " carries no dependence other than " +
                         "recognized reductions; tile loop is " + std::string(verdict_name(cand.parallel_verdict));
      break;
    }
  }
  cand.certified = true;
  return true;
}

std::shared_ptr<NormalizedLoop> apply(const TransformCandidate& cand, const NormalizedLoop& nest) {
  if (!cand.certified) throw IllegalTransform("candidate " + cand.describe() + " has no legality certificate");
  auto out = clone_nest(nest);
  switch (cand.kind) {
    case TransformKind::Identity:
      break;
    case TransformKind::Interchange: {
      NormalizedLoop* a = find_mut(*out, cand.level_a);
      NormalizedLoop* b = find_mut(*out, cand.level_b);
      if (!a || !b) throw IllegalTransform("interchange levels not found");
      std::swap(a->header, b->header);
      std::swap(a->tile_loop, b->tile_loop);
      break;
    }
    case TransformKind::Tile: {
      NormalizedLoop* l = find_mut(*out, cand.level_a);
      if (!l) throw IllegalTransform("tile level not found");
      auto inner = std::make_shared<NormalizedLoop>(*l);
      const LoopHeader h = l->header;
      auto t = make_local(cand.tile_slot, "I");
      inner->header.init = t;
      auto end = make_binary(Opcode::iadd, t, make_int(cand.tile_size * h.step));
      inner->header.bound = make_call(Opcode::invokestatic, MemberRef{"java/lang/Math", "min", "(II)I"}, {end, h.bound});
      inner->header.rel = Rel::Lt;

      l->header.id = kTileIdBase + h.id;
      l->header.ivar = cand.tile_slot;
      l->header.init = h.init;
      l->header.bound = h.bound;
      l->header.rel = Rel::Lt;
      l->header.step = cand.tile_size * h.step;
      l->tile_loop = true;
      l->continue_targets.clear();
      l->body.clear();
      BodyItem item;
      item.loop = inner;
      l->body.push_back(std::move(item));
      break;
    }
  }
  return out;
}

std::vector<TransformCandidate> enumerate(const NormalizedLoop& nest, const NestAnalysis& analysis,
                                          const XformOptions& opts) {
  std::vector<TransformCandidate> out;
  auto keep = [&](TransformCandidate c) {
    c.nest = nest.header.id;
    if (legality(c, nest, analysis, opts)) out.push_back(std::move(c));
  };
  for (const auto& lv : analysis.pt.levels) {
    if (lv.verdict == Verdict::Serial) continue;
    TransformCandidate c;
    c.parallel_level = lv.loop_id;
    keep(c);
  }
  for_each_loop(nest, [&](const NormalizedLoop& outer, int) {
    const NormalizedLoop* cur = &outer;
    while (cur->body.size() == 1 && cur->body[0].is_loop()) {
      cur = cur->body[0].loop.get();
      TransformCandidate c;
      c.kind = TransformKind::Interchange;
      c.level_a = outer.header.id;
      c.level_b = cur->header.id;
      c.parallel_level = cur->header.id;  // lands at the outer position
      keep(c);
    }
  });
  for (const auto& lv : analysis.pt.levels) {
    if (lv.verdict == Verdict::Serial) continue;
    for (int size : opts.tile_sizes) {
      TransformCandidate c;
      c.kind = TransformKind::Tile;
      c.level_a = lv.loop_id;
      c.tile_size = size;
      c.tile_slot = opts.free_slot;
      c.parallel_level = kTileIdBase + lv.loop_id;
      keep(c);
    }
  }
  return out;
}

}  // namespace bcpar
