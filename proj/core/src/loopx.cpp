#include "bcpar/loopx.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "bcpar/decompile.hpp"
#include "bcpar/error.hpp"
#include "bcpar/semantics.hpp"

namespace bcpar {

std::string_view layout_name(LoopLayout l) { return l == LoopLayout::BottomTest ? "bottom_test" : "top_test"; }

std::string_view rel_name(Rel r) {
  switch (r) {
    case Rel::Lt: return "<";
    case Rel::Le: return "<=";
    case Rel::Gt: return ">";
    case Rel::Ge: return ">=";
  }
  return "?";
}

namespace {

/// Instructions allowed inside a loop condition block.
bool pure(const Instr& in) {
  using O = Opcode;
  if (load_kind(in.op) || array_load_kind(in.op) || is_binary_arith(in.op) || is_unary_arith(in.op) ||
      is_compare(in.op))
    return true;
  switch (in.op) {
    case O::nop: case O::aconst_null: case O::iconst_m1: case O::iconst_0: case O::iconst_1:
    case O::iconst_2: case O::iconst_3: case O::iconst_4: case O::iconst_5: case O::lconst_0:
    case O::lconst_1: case O::fconst_0: case O::fconst_1: case O::fconst_2: case O::dconst_0:
    case O::dconst_1: case O::bipush: case O::sipush: case O::ldc: case O::ldc_w: case O::ldc2_w:
    case O::arraylength: case O::getfield: case O::getstatic:
      return true;
    default:
      return false;
  }
}

std::string where(std::uint32_t off) { return " at offset " + std::to_string(off); }

}  // namespace

std::vector<LoopCandidate> extract_loops(const std::vector<Instr>& code) {
  std::vector<LoopCandidate> flat;
  auto idx = [&](std::int32_t off) -> long {
    auto it = std::lower_bound(code.begin(), code.end(), off,
                               [](const Instr& in, std::int32_t o) { return static_cast<std::int32_t>(in.offset) < o; });
    if (it == code.end() || static_cast<std::int32_t>(it->offset) != off) return -1;
    return it - code.begin();
  };
  std::set<std::size_t> closers;
  std::vector<std::size_t> stray_gotos;

  for (std::size_t i = 0; i < code.size(); ++i) {
    const Instr& g = code[i];
    if (g.op != Opcode::goto_) continue;
    std::uint32_t next = g.offset + g.size();
    long j = idx(g.target);
    if (g.target > static_cast<std::int32_t>(g.offset)) {
      if (j < 0) continue;
      for (auto k = static_cast<std::size_t>(j); k < code.size(); ++k) {
        if (pure(code[k])) continue;
        if (is_conditional_branch(code[k].op) && code[k].target == static_cast<std::int32_t>(next)) {
          LoopCandidate c;
          c.layout = LoopLayout::BottomTest;
          c.goto_offset = g.offset;
          c.cond_offset = static_cast<std::uint32_t>(g.target);
          c.branch_offset = code[k].offset;
          c.region_begin = g.offset;
          c.region_end = code[k].offset + code[k].size();
          c.body_begin = next;
          c.body_end = c.cond_offset;
          auto u = static_cast<std::size_t>(j) - 1;
          if (u > i && code[u].op == Opcode::iinc) {
            bool read = false;
            for (std::size_t q = static_cast<std::size_t>(j); q < k; ++q)
              if (load_kind(code[q].op) && code[q].local_slot() == code[u].a) read = true;
            if (read) {
              c.update_offset = code[u].offset;
              c.body_end = code[u].offset;
            }
          }
          closers.insert(k);
          flat.push_back(c);
        }
        break;
      }
    } else {
      if (j < 0) throw IrregularControlFlow("backward goto to unknown offset" + where(g.offset));
      bool found = false;
      for (auto k = static_cast<std::size_t>(j); k < i; ++k) {
        if (pure(code[k])) continue;
        if (is_conditional_branch(code[k].op) && code[k].target == static_cast<std::int32_t>(next)) {
          LoopCandidate c;
          c.layout = LoopLayout::TopTest;
          c.goto_offset = g.offset;
          c.cond_offset = static_cast<std::uint32_t>(g.target);
          c.branch_offset = code[k].offset;
          c.region_begin = c.cond_offset;
          c.region_end = next;
          c.body_begin = code[k].offset + code[k].size();
          c.body_end = g.offset;
          if (i > k + 1 && code[i - 1].op == Opcode::iinc) {
            bool read = false;
            for (auto q = static_cast<std::size_t>(j); q < k; ++q)
              if (load_kind(code[q].op) && code[q].local_slot() == code[i - 1].a) read = true;
            if (read) {
              c.update_offset = code[i - 1].offset;
              c.body_end = code[i - 1].offset;
            }
          }
          flat.push_back(c);
          found = true;
        }
        break;
      }
      if (!found) stray_gotos.push_back(i);
    }
  }

  for (std::size_t k = 0; k < code.size(); ++k) {
    const Instr& b = code[k];
    if (is_conditional_branch(b.op) && b.target <= static_cast<std::int32_t>(b.offset) && !closers.count(k))
      throw IrregularControlFlow("backward conditional branch outside a loop pattern" + where(b.offset));
  }
  for (auto i : stray_gotos) {
    const Instr& g = code[i];
    bool is_continue = std::any_of(flat.begin(), flat.end(), [&](const LoopCandidate& c) {
      return c.layout == LoopLayout::TopTest && static_cast<std::int32_t>(c.cond_offset) == g.target &&
             g.offset >= c.body_begin && g.offset < c.goto_offset;
    });
    if (!is_continue) throw IrregularControlFlow("backward goto matches no loop layout" + where(g.offset));
  }

  std::sort(flat.begin(), flat.end(), [](const LoopCandidate& a, const LoopCandidate& b) {
    if (a.region_begin != b.region_begin) return a.region_begin < b.region_begin;
    return a.region_end > b.region_end;
  });
  std::function<std::vector<LoopCandidate>(std::size_t&, std::uint32_t)> build =
      [&](std::size_t& pos, std::uint32_t limit) {
        std::vector<LoopCandidate> level;
        while (pos < flat.size() && flat[pos].region_begin < limit) {
          LoopCandidate c = flat[pos++];
          if (c.region_end > limit)
            throw IrregularControlFlow("loops overlap without nesting" + where(c.region_begin));
          c.children = build(pos, c.region_end);
          level.push_back(std::move(c));
        }
        return level;
      };
  std::size_t pos = 0;
  return build(pos, UINT32_MAX);
}

// ---------------------------------------------------------------- normalize

std::int64_t trip_count(Rel rel, int step, std::int64_t init, std::int64_t bound) {
  std::int64_t s = step < 0 ? -static_cast<std::int64_t>(step) : step;
  switch (rel) {
    case Rel::Lt:
      if (step <= 0) return 0;
      return bound <= init ? 0 : (bound - init + s - 1) / s;
    case Rel::Le:
      if (step <= 0) return 0;
      return bound < init ? 0 : (bound - init) / s + 1;
    case Rel::Gt:
      if (step >= 0) return 0;
      return bound >= init ? 0 : (init - bound + s - 1) / s;
    case Rel::Ge:
      if (step >= 0) return 0;
      return bound > init ? 0 : (init - bound) / s + 1;
  }
  return 0;
}

std::int64_t NormalizedLoop::trip_count(std::int64_t init, std::int64_t bound) const {
  return bcpar::trip_count(header.rel, header.step, init, bound);
}

std::string NormalizedLoop::trip_count_expr() const {
  std::string b = to_string(*header.bound);
  std::string i = to_string(*header.init);
  int s = header.step < 0 ? -header.step : header.step;
  bool up = header.rel == Rel::Lt || header.rel == Rel::Le;
  std::string diff;
  if (up) diff = (i == "0") ? b : "(" + b + " - " + i + ")";
  else diff = (b == "0") ? i : "(" + i + " - " + b + ")";
  bool inclusive = header.rel == Rel::Le || header.rel == Rel::Ge;
  std::string out;
  if (inclusive) out = (s == 1 ? diff : "floor(" + diff + " / " + std::to_string(s) + ")") + " + 1";
  else out = s == 1 ? diff : "ceil(" + diff + " / " + std::to_string(s) + ")";
  return "max(0, " + out + ")";
}

std::vector<std::shared_ptr<const NormalizedLoop>> NormalizedLoop::children() const {
  std::vector<std::shared_ptr<const NormalizedLoop>> out;
  for (const auto& it : body)
    if (it.is_loop()) out.push_back(it.loop);
  return out;
}

namespace {

Rel rel_of(Opcode op, bool& ok) {
  ok = true;
  switch (op) {
    case Opcode::iflt: case Opcode::if_icmplt: return Rel::Lt;
    case Opcode::ifle: case Opcode::if_icmple: return Rel::Le;
    case Opcode::ifgt: case Opcode::if_icmpgt: return Rel::Gt;
    case Opcode::ifge: case Opcode::if_icmpge: return Rel::Ge;
    default: ok = false; return Rel::Lt;
  }
}

Opcode negate(Opcode op) {
  switch (op) {
    case Opcode::iflt: return Opcode::ifge;
    case Opcode::ifge: return Opcode::iflt;
    case Opcode::ifle: return Opcode::ifgt;
    case Opcode::ifgt: return Opcode::ifle;
    case Opcode::ifeq: return Opcode::ifne;
    case Opcode::ifne: return Opcode::ifeq;
    case Opcode::if_icmplt: return Opcode::if_icmpge;
    case Opcode::if_icmpge: return Opcode::if_icmplt;
    case Opcode::if_icmple: return Opcode::if_icmpgt;
    case Opcode::if_icmpgt: return Opcode::if_icmple;
    case Opcode::if_icmpeq: return Opcode::if_icmpne;
    case Opcode::if_icmpne: return Opcode::if_icmpeq;
    default: return op;
  }
}

Rel mirror(Rel r) {
  switch (r) {
    case Rel::Lt: return Rel::Gt;
    case Rel::Gt: return Rel::Lt;
    case Rel::Le: return Rel::Ge;
    case Rel::Ge: return Rel::Le;
  }
  return r;
}

void walk_stmts(const std::vector<BodyItem>& items, const std::function<void(const Stmt&)>& fn) {
  for (const auto& it : items) {
    if (it.is_loop()) {
      // the nested loop's own init and update write its ivar
      Stmt init;
      init.kind = StmtKind::Assign;
      init.target = make_local(it.loop->header.ivar, "I");
      init.value = it.loop->header.init;
      fn(init);
      Stmt upd;
      upd.kind = StmtKind::Inc;
      upd.slot = it.loop->header.ivar;
      upd.delta = it.loop->header.step;
      fn(upd);
      walk_stmts(it.loop->body, fn);
    } else {
      fn(it.stmt);
    }
  }
}

void check_bound(const ExprPtr& bound, int ivar, const std::set<int>& written, bool body_stores_arrays,
                 bool body_stores_refs, bool body_stores_fields) {
  visit(bound, [&](const Expr& e) {
    switch (e.kind) {
      case ExprKind::Local:
        if (e.slot == ivar) throw NonCanonicalLoop("bound refers to the iteration variable");
        if (written.count(e.slot)) throw NonCanonicalLoop("bound reads local" + std::to_string(e.slot) + " written in body");
        break;
      case ExprKind::ArrayElem:
        if (descriptor_kind(e.type) == Kind::Ref ? body_stores_refs : body_stores_arrays)
          throw NonCanonicalLoop("bound reads an array element the body may write");
        break;
      case ExprKind::Field:
        if (body_stores_fields) throw NonCanonicalLoop("bound reads a field the body may write");
        break;
      case ExprKind::Const: case ExprKind::ArrayLength: case ExprKind::Binary: case ExprKind::Unary:
        break;
      default:
        throw NonCanonicalLoop("bound is not a simple expression");
    }
  });
}

}  // namespace

std::shared_ptr<NormalizedLoop> normalize_loop(const LoopCandidate& c, const std::vector<Stmt>& stmts) {
  auto L = std::make_shared<NormalizedLoop>();
  L->layout = c.layout;
  L->region_end = c.region_end;
  L->body_begin = c.body_begin;
  L->body_end = c.body_end;
  std::string at = " (loop at offset " + std::to_string(c.region_begin) + ")";

  int head = stmt_at(stmts, static_cast<std::int32_t>(c.region_begin));
  if (head <= 0 || stmts[static_cast<std::size_t>(head)].first != c.region_begin)
    throw NonCanonicalLoop("no init store before the loop" + at);
  const Stmt& init = stmts[static_cast<std::size_t>(head - 1)];
  if (init.kind != StmtKind::Assign || init.target->type != "I")
    throw NonCanonicalLoop("loop is not preceded by an int store" + at);
  int x = init.target->slot;
  L->header.ivar = x;
  L->header.init = init.value;
  L->init_offset = init.first;
  if (reads_local(init.value, x)) throw NonCanonicalLoop("init refers to the iteration variable" + at);

  int ci = stmt_at(stmts, static_cast<std::int32_t>(c.branch_offset));
  if (ci < 0 || stmts[static_cast<std::size_t>(ci)].kind != StmtKind::CondBranch ||
      stmts[static_cast<std::size_t>(ci)].first != c.cond_offset)
    throw NonCanonicalLoop("condition block is not a single comparison" + at);
  const Stmt& cond = stmts[static_cast<std::size_t>(ci)];
  Opcode op = c.layout == LoopLayout::TopTest ? negate(cond.op) : cond.op;
  bool ok;
  Rel rel = rel_of(op, ok);
  if (!ok) throw NonCanonicalLoop("loop condition is not an ordering comparison" + at);
  auto is_x = [&](const ExprPtr& e) { return e->kind == ExprKind::Local && e->slot == x; };
  if (is_x(cond.value)) {
    L->header.bound = cond.rhs;
  } else if (is_x(cond.rhs)) {
    L->header.bound = cond.value;
    rel = mirror(rel);
  } else {
    throw NonCanonicalLoop("condition does not test the initialized variable" + at);
  }
  L->header.rel = rel;

  if (!c.update_offset) throw NonCanonicalLoop("no iinc update before the condition" + at);
  int ui = stmt_at(stmts, static_cast<std::int32_t>(*c.update_offset));
  if (ui < 0 || stmts[static_cast<std::size_t>(ui)].kind != StmtKind::Inc || stmts[static_cast<std::size_t>(ui)].slot != x)
    throw NonCanonicalLoop("update is not a constant increment of the iteration variable" + at);
  L->header.step = stmts[static_cast<std::size_t>(ui)].delta;
  if (L->header.step == 0) throw NonCanonicalLoop("zero step" + at);
  bool up = rel == Rel::Lt || rel == Rel::Le;
  if (up != (L->header.step > 0)) throw NonCanonicalLoop("step direction disagrees with the condition" + at);

  std::vector<std::shared_ptr<NormalizedLoop>> kids;
  for (const auto& ch : c.children) kids.push_back(normalize_loop(ch, stmts));

  int pos = stmt_at(stmts, static_cast<std::int32_t>(c.body_begin));
  if (c.body_begin < c.body_end && (pos < 0 || stmts[static_cast<std::size_t>(pos)].first != c.body_begin))
    throw NonCanonicalLoop("body does not start on a statement boundary" + at);
  std::size_t k = c.body_begin < c.body_end ? static_cast<std::size_t>(pos) : stmts.size();
  while (k < stmts.size() && stmts[k].first < c.body_end) {
    const Stmt& s = stmts[k];
    auto kid = std::find_if(kids.begin(), kids.end(), [&](const auto& l) { return l->init_offset == s.first; });
    if (kid != kids.end()) {
      BodyItem item;
      item.loop = *kid;
      L->body.push_back(std::move(item));
      while (k < stmts.size() && stmts[k].first < (*kid)->region_end) ++k;
      continue;
    }
    if (s.end > c.body_end) throw NonCanonicalLoop("statement straddles the loop update" + at);
    BodyItem item;
    item.stmt = s;
    L->body.push_back(std::move(item));
    ++k;
  }

  std::uint32_t cont = *c.update_offset;
  for (const auto& it : L->body) {
    if (it.is_loop()) continue;
    const Stmt& s = it.stmt;
    if (s.kind == StmtKind::Return) throw NonCanonicalLoop("return inside the loop body" + at);
    if (s.kind == StmtKind::CondBranch || s.kind == StmtKind::Goto) {
      auto t = static_cast<std::uint32_t>(s.branch_target);
      if (t == cont || t == c.cond_offset) {
        L->continue_targets.push_back(s.branch_target);
      } else if (t < c.body_begin || t >= c.body_end) {
        throw NonCanonicalLoop("branch leaves the loop body" + at);
      } else if (t <= s.first) {
        throw IrregularControlFlow("backward branch inside the loop body" + at);
      }
    }
  }

  std::set<int> written;
  bool arrays = false, refs = false, fields = false;
  walk_stmts(L->body, [&](const Stmt& s) {
    int w = local_written(s);
    if (w >= 0) written.insert(w);
    if (s.kind == StmtKind::ArrayStore) {
      arrays = true;
      if (descriptor_kind(s.target->type) == Kind::Ref) refs = true;
    }
    if (s.kind == StmtKind::FieldStore) fields = true;
    if (s.kind == StmtKind::CallStmt || [&] {
          bool call = false;
          for (const auto& e : stmt_exprs(s)) call = call || contains_call(e);
          return call;
        }()) {
      // a call may write any array or field reachable from its arguments
      arrays = refs = fields = true;
    }
  });
  if (written.count(x)) throw NonCanonicalLoop("iteration variable written in the body" + at);
  check_bound(L->header.bound, x, written, arrays, refs, fields);
  return L;
}

namespace {

std::shared_ptr<NormalizedLoop> renumber(const NormalizedLoop& l, int& next) {
  auto out = std::make_shared<NormalizedLoop>(l);
  out->header.id = next++;
  for (auto& it : out->body) {
    if (it.is_loop()) it.loop = renumber(*it.loop, next);
  }
  return out;
}

}  // namespace

LoopForest build_forest(const std::vector<Instr>& code, const std::vector<Stmt>& stmts) {
  LoopForest f;
  auto cands = extract_loops(code);
  std::vector<std::shared_ptr<NormalizedLoop>> roots;
  std::function<void(const LoopCandidate&)> try_root = [&](const LoopCandidate& c) {
    try {
      roots.push_back(normalize_loop(c, stmts));
    } catch (const NonCanonicalLoop& e) {
      f.rejected.push_back(e.what());
      for (const auto& ch : c.children) try_root(ch);
    } catch (const IrregularControlFlow& e) {
      f.rejected.push_back(e.what());
    }
  };
  for (const auto& c : cands) try_root(c);
  int next = 0;
  for (auto& r : roots) f.roots.push_back(renumber(*r, next));

  std::size_t k = 0;
  while (k < stmts.size()) {
    auto root = std::find_if(f.roots.begin(), f.roots.end(), [&](const auto& l) { return l->init_offset == stmts[k].first; });
    BodyItem item;
    if (root != f.roots.end()) {
      item.loop = *root;
      f.items.push_back(std::move(item));
      while (k < stmts.size() && stmts[k].first < (*root)->region_end) ++k;
      continue;
    }
    item.stmt = stmts[k++];
    f.items.push_back(std::move(item));
  }
  return f;
}

void for_each_loop(const NormalizedLoop& root, const std::function<void(const NormalizedLoop&, int depth)>& fn) {
  std::function<void(const NormalizedLoop&, int)> rec = [&](const NormalizedLoop& l, int d) {
    fn(l, d);
    for (const auto& it : l.body)
      if (it.is_loop()) rec(*it.loop, d + 1);
  };
  rec(root, 0);
}

const NormalizedLoop* find_loop(const NormalizedLoop& root, int id) {
  const NormalizedLoop* found = nullptr;
  for_each_loop(root, [&](const NormalizedLoop& l, int) {
    if (l.header.id == id) found = &l;
  });
  return found;
}

std::vector<const Stmt*> nest_statements(const NormalizedLoop& root) {
  std::vector<const Stmt*> out;
  std::function<void(const NormalizedLoop&)> rec = [&](const NormalizedLoop& l) {
    for (const auto& it : l.body) {
      if (it.is_loop()) rec(*it.loop);
      else out.push_back(&it.stmt);
    }
  };
  rec(root);
  return out;
}

}  // namespace bcpar
