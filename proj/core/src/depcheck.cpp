#include "bcpar/depcheck.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace bcpar {

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::IP: return "IP";
    case Verdict::DP: return "DP";
    case Verdict::Serial: return "serial";
  }
  return "?";
}

std::string_view reduction_op_name(ReductionOp op) {
  switch (op) {
    case ReductionOp::Add: return "+";
    case ReductionOp::Mul: return "*";
    case ReductionOp::Min: return "min";
    case ReductionOp::Max: return "max";
  }
  return "?";
}

std::string Reduction::lvalue() const {
  return "local" + std::to_string(slot) + (array ? "[*]" : "");
}

const LevelVerdict* ParallelismType::level(int loop_id) const {
  for (const auto& l : levels)
    if (l.loop_id == loop_id) return &l;
  return nullptr;
}

std::string ParallelismType::summary() const {
  std::size_t par = 0;
  for (const auto& l : levels)
    if (l.verdict != Verdict::Serial) ++par;
  if (par == 0) return "unable to run in parallel";
  return par == levels.size() ? "fully parallelised" : "partially parallelised";
}

std::string AffineAccess::to_string() const {
  std::ostringstream os;
  os << (kind == AccessKind::Write ? "write " : "read ") << array;
  for (const auto& d : dims) {
    os << "[";
    if (non_affine) {
      os << "?";
    } else {
      os << "(";
      for (std::size_t k = 0; k < d.coeffs.size(); ++k) os << (k ? "," : "") << d.coeffs[k];
      os << ")";
      for (const auto& [p, c] : d.params) os << (c < 0 ? "" : "+") << c << "*" << p;
      os << (d.constant < 0 ? "" : "+") << d.constant;
    }
    os << "]";
  }
  return os.str();
}

// ------------------------------------------------------------------ affine

namespace {

bool int_like(const std::string& t) { return t == "I" || t == "B" || t == "S" || t == "C" || t == "Z"; }

bool add_ovf(std::int64_t a, std::int64_t b, std::int64_t& out) { return __builtin_add_overflow(a, b, &out); }
bool mul_ovf(std::int64_t a, std::int64_t b, std::int64_t& out) { return __builtin_mul_overflow(a, b, &out); }

bool is_constant(const AffineExpr& a) {
  return a.params.empty() && std::all_of(a.coeffs.begin(), a.coeffs.end(), [](auto c) { return c == 0; });
}

std::optional<AffineExpr> scale(AffineExpr a, std::int64_t f) {
  for (auto& c : a.coeffs)
    if (mul_ovf(c, f, c)) return std::nullopt;
  for (auto& [k, c] : a.params)
    if (mul_ovf(c, f, c)) return std::nullopt;
  if (mul_ovf(a.constant, f, a.constant)) return std::nullopt;
  std::erase_if(a.params, [](const auto& kv) { return kv.second == 0; });
  return a;
}

std::optional<AffineExpr> add(AffineExpr a, const AffineExpr& b, std::int64_t sign) {
  for (std::size_t k = 0; k < a.coeffs.size(); ++k) {
    std::int64_t t;
    if (mul_ovf(b.coeffs[k], sign, t) || add_ovf(a.coeffs[k], t, a.coeffs[k])) return std::nullopt;
  }
  for (const auto& [p, c] : b.params) {
    std::int64_t t;
    if (mul_ovf(c, sign, t) || add_ovf(a.params[p], t, a.params[p])) return std::nullopt;
  }
  std::int64_t t;
  if (mul_ovf(b.constant, sign, t) || add_ovf(a.constant, t, a.constant)) return std::nullopt;
  std::erase_if(a.params, [](const auto& kv) { return kv.second == 0; });
  return a;
}

bool is_math(const Expr& e, std::string_view name) {
  return e.kind == ExprKind::Call && e.op == Opcode::invokestatic && e.member.owner == "java/lang/Math" &&
         e.member.name == name && e.args.size() == 2;
}

}  // namespace

std::optional<AffineExpr> to_affine(const ExprPtr& e, const std::vector<int>& ivars,
                                    const std::function<bool(int)>& is_param) {
  AffineExpr out;
  out.coeffs.assign(ivars.size(), 0);
  switch (e->kind) {
    case ExprKind::Const:
      if (!int_like(e->type)) return std::nullopt;
      out.constant = e->constant.i();
      return out;
    case ExprKind::Local: {
      if (!int_like(e->type)) return std::nullopt;
      auto it = std::find(ivars.begin(), ivars.end(), e->slot);
      if (it != ivars.end()) {
        out.coeffs[static_cast<std::size_t>(it - ivars.begin())] = 1;
        return out;
      }
      if (!is_param(e->slot)) return std::nullopt;
      out.params["local" + std::to_string(e->slot)] = 1;
      return out;
    }
    case ExprKind::ArrayLength: {
      const Expr& a = *e->args[0];
      if ((a.kind == ExprKind::Local && is_param(a.slot)) || (a.kind == ExprKind::Field && a.args.empty())) {
        out.params["length(" + to_string(a) + ")"] = 1;
        return out;
      }
      return std::nullopt;
    }
    case ExprKind::Unary:
      if (e->op != Opcode::ineg) return std::nullopt;
      if (auto x = to_affine(e->args[0], ivars, is_param)) return scale(*x, -1);
      return std::nullopt;
    case ExprKind::Binary: {
      auto l = to_affine(e->args[0], ivars, is_param);
      if (!l) return std::nullopt;
      auto r = to_affine(e->args[1], ivars, is_param);
      if (!r) return std::nullopt;
      switch (e->op) {
        case Opcode::iadd: return add(*l, *r, 1);
        case Opcode::isub: return add(*l, *r, -1);
        case Opcode::imul:
          if (is_constant(*r)) return scale(*l, r->constant);
          if (is_constant(*l)) return scale(*r, l->constant);
          return std::nullopt;
        case Opcode::ishl:
          if (is_constant(*r) && r->constant >= 0 && r->constant < 31) return scale(*l, std::int64_t{1} << r->constant);
          return std::nullopt;
        default:
          return std::nullopt;
      }
    }
    default:
      return std::nullopt;
  }
}

namespace {

void visit_stmt_loops(const std::vector<BodyItem>& items, std::vector<const NormalizedLoop*>& chain,
                      const std::function<void(const Stmt&, const std::vector<const NormalizedLoop*>&)>& fn) {
  for (const auto& it : items) {
    if (it.is_loop()) {
      chain.push_back(it.loop.get());
      visit_stmt_loops(it.loop->body, chain, fn);
      chain.pop_back();
    } else {
      fn(it.stmt, chain);
    }
  }
}

/// Affine pieces of a bound; Math.min (for upper) / Math.max (for lower)
/// splits into several constraints.
void bound_pieces(const ExprPtr& e, std::string_view splitter, const std::vector<int>& ivars,
                  const std::function<bool(int)>& is_param, std::vector<AffineExpr>& out) {
  if (is_math(*e, splitter) && int_like(e->type)) {
    bound_pieces(e->args[0], splitter, ivars, is_param, out);
    bound_pieces(e->args[1], splitter, ivars, is_param, out);
    return;
  }
  if (auto a = to_affine(e, ivars, is_param)) out.push_back(*a);
}

AffineBound bounds_of(const NormalizedLoop& l, const std::vector<int>& ivars, const std::function<bool(int)>& is_param) {
  AffineBound b;
  bool up = l.header.rel == Rel::Lt || l.header.rel == Rel::Le;
  if (auto i = to_affine(l.header.init, ivars, is_param)) (up ? b.lower : b.upper).push_back(*i);
  std::vector<AffineExpr> pieces;
  bound_pieces(l.header.bound, up ? "min" : "max", ivars, is_param, pieces);
  for (auto& p : pieces) {
    if (l.header.rel == Rel::Lt) p.constant -= 1;
    if (l.header.rel == Rel::Gt) p.constant += 1;
    (up ? b.upper : b.lower).push_back(std::move(p));
  }
  return b;
}

}  // namespace

std::set<int> locals_written_in(const std::vector<BodyItem>& items) {
  std::set<int> out;
  for (const auto& it : items) {
    if (it.is_loop()) {
      out.insert(it.loop->header.ivar);
      auto inner = locals_written_in(it.loop->body);
      out.insert(inner.begin(), inner.end());
    } else {
      int w = local_written(it.stmt);
      if (w >= 0) out.insert(w);
    }
  }
  return out;
}

std::vector<AffineAccess> extract_affine(const NormalizedLoop& nest) {
  std::vector<AffineAccess> out;
  std::set<int> written = locals_written_in(nest.body);
  written.insert(nest.header.ivar);
  auto is_param = [&](int slot) { return !written.count(slot); };
  std::map<const NormalizedLoop*, AffineBound> bound_cache;
  int order = 0;

  std::vector<const NormalizedLoop*> chain{&nest};
  visit_stmt_loops(nest.body, chain, [&](const Stmt& s, const std::vector<const NormalizedLoop*>& loops) {
    std::vector<int> ivars;
    std::vector<AffineBound> bounds;
    for (const auto* l : loops) {
      ivars.push_back(l->header.ivar);
      auto it = bound_cache.find(l);
      if (it == bound_cache.end()) it = bound_cache.emplace(l, bounds_of(*l, ivars, is_param)).first;
      bounds.push_back(it->second);
    }
    auto record = [&](const ExprPtr& e, AccessKind kind) {
      AffineAccess a;
      a.kind = kind;
      a.elem_type = e->type;
      a.stmt = &s;
      a.order = order;
      a.loops = loops;
      a.bounds = bounds;
      std::vector<ExprPtr> subs;
      ExprPtr cur = e;
      while (cur->kind == ExprKind::ArrayElem) {
        subs.insert(subs.begin(), cur->args[1]);
        cur = cur->args[0];
      }
      const Expr& base = *cur;
      if (base.kind == ExprKind::Local && is_param(base.slot)) {
        a.array = to_string(base);
      } else if (base.kind == ExprKind::Field &&
                 (base.args.empty() || (base.args[0]->kind == ExprKind::Local && is_param(base.args[0]->slot)))) {
        a.array = to_string(base);
      } else {
        a.array = "?";
        a.unknown_base = true;
        a.non_affine = true;
      }
      for (const auto& sub : subs) {
        auto f = to_affine(sub, ivars, is_param);
        if (!f) {
          a.non_affine = true;
          AffineExpr z;
          z.coeffs.assign(ivars.size(), 0);
          a.dims.push_back(z);
        } else {
          a.dims.push_back(*f);
        }
      }
      out.push_back(std::move(a));
    };
    std::function<void(const ExprPtr&)> reads = [&](const ExprPtr& e) {
      if (!e) return;
      if (e->kind == ExprKind::ArrayElem) record(e, AccessKind::Read);
      for (const auto& a : e->args) reads(a);
    };
    for (const auto& e : stmt_exprs(s)) reads(e);
    if (s.kind == StmtKind::ArrayStore) record(s.target, AccessKind::Write);
    ++order;
  });
  return out;
}

// ---------------------------------------------------------------- pair test

namespace {

struct Lin {
  std::map<std::string, std::int64_t> t;
  std::int64_t c = 0;
};

Lin lin_of(const AffineExpr& a, const std::string& side) {
  Lin l;
  for (std::size_t k = 0; k < a.coeffs.size(); ++k)
    if (a.coeffs[k]) l.t[side + std::to_string(k)] += a.coeffs[k];
  for (const auto& [p, c] : a.params) l.t["p:" + p] += c;
  l.c = a.constant;
  return l;
}

Lin sub(Lin a, const Lin& b) {
  for (const auto& [v, c] : b.t) a.t[v] -= c;
  a.c -= b.c;
  return a;
}

Lin var(const std::string& name, std::int64_t coeff = 1) {
  Lin l;
  l.t[name] = coeff;
  return l;
}

std::size_t common_depth(const AffineAccess& a, const AffineAccess& b) {
  std::size_t n = 0;
  while (n < a.loops.size() && n < b.loops.size() && a.loops[n] == b.loops[n]) ++n;
  return n;
}

}  // namespace

bool may_conflict(const AffineAccess& src, const AffineAccess& sink, const std::vector<DirConstraint>& dirs,
                  const FmOptions& fm) {
  if (src.non_affine || sink.non_affine || src.dims.size() != sink.dims.size()) return true;

  std::vector<std::pair<Lin, bool>> rows;  // (lin, equality): lin <= 0 or lin == 0
  for (std::size_t d = 0; d < src.dims.size(); ++d) {
    Lin eq = sub(lin_of(src.dims[d], "s"), lin_of(sink.dims[d], "t"));
    std::int64_t g = 0;
    for (const auto& [v, c] : eq.t) g = std::gcd(g, c < 0 ? -c : c);
    if (g == 0) {
      if (eq.c != 0) return false;
    } else if (eq.c % g != 0) {
      return false;
    }
    rows.emplace_back(std::move(eq), true);
  }
  std::set<std::string> params;
  auto add_bounds = [&](const AffineAccess& a, const std::string& side) {
    for (std::size_t k = 0; k < a.bounds.size(); ++k) {
      Lin x = var(side + std::to_string(k));
      for (const auto& lo : a.bounds[k].lower) rows.emplace_back(sub(lin_of(lo, side), x), false);
      for (const auto& hi : a.bounds[k].upper) rows.emplace_back(sub(x, lin_of(hi, side)), false);
    }
  };
  add_bounds(src, "s");
  add_bounds(sink, "t");
  std::size_t common = common_depth(src, sink);
  for (const auto& dc : dirs) {
    std::size_t k = 0;
    while (k < common && src.loops[k]->header.id != dc.loop_id) ++k;
    if (k == common) continue;
    std::string s = "s" + std::to_string(k), t = "t" + std::to_string(k);
    bool up = src.loops[k]->header.step > 0;
    if (dc.dir == Dir::Same) {
      rows.emplace_back(sub(var(s), var(t)), true);
    } else {
      bool src_smaller = (dc.dir == Dir::Before) == up;
      Lin l = src_smaller ? sub(var(s), var(t)) : sub(var(t), var(s));
      // Inside one instance of the loop the two ivars differ by a multiple
      // of the step; that holds when every enclosing level is Same.
      bool same_instance = true;
      for (std::size_t o = 0; o < k; ++o) {
        auto it = std::find_if(dirs.begin(), dirs.end(),
                               [&](const DirConstraint& x) { return x.loop_id == src.loops[o]->header.id; });
        if (it == dirs.end() || it->dir != Dir::Same) same_instance = false;
      }
      std::int64_t step = src.loops[k]->header.step;
      l.c += same_instance ? (step < 0 ? -step : step) : 1;
      rows.emplace_back(std::move(l), false);
    }
  }
  for (const auto& [l, eq] : rows)
    for (const auto& [v, c] : l.t)
      if (v.rfind("p:length(", 0) == 0) params.insert(v);
  for (const auto& p : params) rows.emplace_back(var(p, -1), false);

  InequalitySystem sys;
  std::map<std::string, int> index;
  for (const auto& [l, eq] : rows)
    for (const auto& [v, c] : l.t)
      if (!index.count(v)) index[v] = sys.add_var(v);
  for (const auto& [l, eq] : rows) {
    std::vector<std::int64_t> co(sys.vars.size(), 0);
    for (const auto& [v, c] : l.t) co[static_cast<std::size_t>(index[v])] += c;
    if (eq) sys.add_eq(std::move(co), -l.c);
    else sys.add_le(std::move(co), -l.c);
  }
  return fm_eliminate(sys, fm).verdict == FmVerdict::FeasibleRational;
}

namespace {

DepKind class_of(AccessKind src, AccessKind sink) {
  if (src == AccessKind::Write) return sink == AccessKind::Write ? DepKind::Output : DepKind::Flow;
  return DepKind::Anti;
}

bool same_location_space(const AffineAccess& a, const AffineAccess& b) {
  if (a.dims.size() != b.dims.size() || a.elem_type != b.elem_type) return false;
  return a.array == b.array || a.unknown_base || b.unknown_base;
}

}  // namespace

DependenceResult test_dependence(const std::vector<AffineAccess>& accesses, int ia, int ib, const FmOptions& fm) {
  const AffineAccess& A = accesses[static_cast<std::size_t>(ia)];
  const AffineAccess& B = accesses[static_cast<std::size_t>(ib)];
  DependenceResult r;
  r.source = ia;
  r.sink = ib;
  if (!same_location_space(A, B) || (A.kind == AccessKind::Read && B.kind == AccessKind::Read)) return r;
  if (A.array != B.array || A.unknown_base) r.assumptions.push_back("array held in a local written by the loop may alias");
  else if (A.array.rfind("local", 0) == 0) r.assumptions.push_back("distinct array parameters do not alias");
  if (A.dims.size() > 1) r.assumptions.push_back("rows of multi-dimensional arrays are distinct");

  std::size_t common = common_depth(A, B);
  std::vector<std::pair<const AffineAccess*, const AffineAccess*>> orders{{&A, &B}};
  if (ia != ib) orders.emplace_back(&B, &A);

  for (auto [src, sink] : orders) {
    std::vector<DirConstraint> dirs;
    for (std::size_t l = 0; l < common; ++l) {
      auto here = dirs;
      here.push_back({src->loops[l]->header.id, Dir::Before});
      if (may_conflict(*src, *sink, here, fm)) {
        r.carried_by.insert(src->loops[l]->header.id);
        r.classes.insert(class_of(src->kind, sink->kind));
      }
      dirs.push_back({src->loops[l]->header.id, Dir::Same});
    }
    // same iteration of every common loop: textual order decides, and
    // within one statement the reads happen first
    bool earlier = src->order < sink->order ||
                   (src->order == sink->order && src->kind == AccessKind::Read && sink->kind == AccessKind::Write);
    if (earlier && may_conflict(*src, *sink, dirs, fm)) {
      r.loop_independent = true;
      r.classes.insert(class_of(src->kind, sink->kind));
    }
  }
  r.exists = (r.carried_by.empty() && !r.loop_independent) ? DepExists::No : DepExists::Maybe;
  return r;
}

std::vector<DependenceResult> all_dependences(const std::vector<AffineAccess>& accesses, const FmOptions& fm) {
  std::vector<DependenceResult> out;
  for (std::size_t i = 0; i < accesses.size(); ++i) {
    for (std::size_t j = i; j < accesses.size(); ++j) {
      if (accesses[i].kind == AccessKind::Read && accesses[j].kind == AccessKind::Read) continue;
      if (!same_location_space(accesses[i], accesses[j])) continue;
      auto r = test_dependence(accesses, static_cast<int>(i), static_cast<int>(j), fm);
      if (r.exists == DepExists::Maybe) out.push_back(std::move(r));
    }
  }
  return out;
}

// ----------------------------------------------------------------- scalars

namespace {

struct ScanResult {
  bool exposed = false;
  bool defined = false;
};

bool stmt_reads(const Stmt& s, int slot) {
  if (s.kind == StmtKind::Inc) return s.slot == slot;
  for (const auto& e : stmt_exprs(s))
    if (e && reads_local(e, slot)) return true;
  return false;
}

ScanResult scan(const std::vector<BodyItem>& items, std::size_t begin, int slot, bool defined) {
  bool after_branch = false;
  for (std::size_t i = begin; i < items.size(); ++i) {
    const auto& it = items[i];
    if (it.is_loop()) {
      const auto& h = it.loop->header;
      if (!defined && reads_local(h.init, slot)) return {true, defined};
      bool inner = defined || h.ivar == slot;
      if (!inner && reads_local(h.bound, slot)) return {true, defined};
      if (scan(it.loop->body, 0, slot, inner).exposed) return {true, defined};
      if (h.ivar == slot && !after_branch) defined = true;
    } else {
      const Stmt& s = it.stmt;
      if (!defined && stmt_reads(s, slot)) return {true, defined};
      if (local_written(s) == slot && !after_branch) defined = true;
      if (s.kind == StmtKind::CondBranch || s.kind == StmtKind::Goto) after_branch = true;
    }
  }
  return {false, defined};
}

bool path_to(const NormalizedLoop& from, const NormalizedLoop* target, std::vector<const NormalizedLoop*>& path) {
  path.push_back(&from);
  if (&from == target) return true;
  for (const auto& it : from.body)
    if (it.is_loop() && path_to(*it.loop, target, path)) return true;
  path.pop_back();
  return false;
}

bool is_add(Opcode op) { return op == Opcode::iadd || op == Opcode::ladd || op == Opcode::fadd || op == Opcode::dadd; }
bool is_sub(Opcode op) { return op == Opcode::isub || op == Opcode::lsub || op == Opcode::fsub || op == Opcode::dsub; }
bool is_mul(Opcode op) { return op == Opcode::imul || op == Opcode::lmul || op == Opcode::fmul || op == Opcode::dmul; }

bool numeric(const std::string& t) { return t == "I" || t == "J" || t == "F" || t == "D"; }

/// Matches `acc op e` where `is_acc` recognizes the accumulator operand and
/// `mentions` reports whether an expression refers to the accumulator.
std::optional<ReductionOp> match_update(const ExprPtr& v, const std::function<bool(const ExprPtr&)>& is_acc,
                                        const std::function<bool(const ExprPtr&)>& mentions) {
  if (v->kind == ExprKind::Binary) {
    const auto& l = v->args[0];
    const auto& r = v->args[1];
    bool left = is_acc(l) && !mentions(r);
    bool right = is_acc(r) && !mentions(l);
    if (is_add(v->op) && (left || right)) return ReductionOp::Add;
    if (is_sub(v->op) && left) return ReductionOp::Add;
    if (is_mul(v->op) && (left || right)) return ReductionOp::Mul;
    return std::nullopt;
  }
  for (auto [name, op] : {std::pair{"min", ReductionOp::Min}, std::pair{"max", ReductionOp::Max}}) {
    if (is_math(*v, name)) {
      const auto& l = v->args[0];
      const auto& r = v->args[1];
      if ((is_acc(l) && !mentions(r)) || (is_acc(r) && !mentions(l))) return op;
    }
  }
  return std::nullopt;
}

}  // namespace

bool upward_exposed(const std::vector<BodyItem>& items, int slot) { return scan(items, 0, slot, false).exposed; }

bool live_after(const NormalizedLoop& nest, const NormalizedLoop& loop, int slot,
                const std::function<bool(int)>& live_after_nest) {
  std::vector<const NormalizedLoop*> path;
  if (!path_to(nest, &loop, path)) return true;
  for (std::size_t k = path.size() - 1; k > 0; --k) {
    const NormalizedLoop& parent = *path[k - 1];
    std::size_t at = 0;
    while (at < parent.body.size() && parent.body[at].loop.get() != path[k]) ++at;
    auto rest = scan(parent.body, at + 1, slot, false);
    if (rest.exposed) return true;
    if (rest.defined) return false;
    if (upward_exposed(parent.body, slot)) return true;  // next iteration of the parent
  }
  return live_after_nest ? live_after_nest(slot) : true;
}

std::optional<ReductionOp> scalar_reduction_op(const Stmt& s, int slot) {
  if (s.kind == StmtKind::Inc) return s.slot == slot ? std::optional{ReductionOp::Add} : std::nullopt;
  if (s.kind != StmtKind::Assign || s.target->slot != slot || !numeric(s.target->type)) return std::nullopt;
  return match_update(
      s.value, [&](const ExprPtr& e) { return e->kind == ExprKind::Local && e->slot == slot; },
      [&](const ExprPtr& e) { return reads_local(e, slot); });
}

std::optional<ReductionOp> array_reduction_op(const Stmt& s, int array_slot) {
  if (s.kind != StmtKind::ArrayStore) return std::nullopt;
  const Expr& t = *s.target;
  if (t.args[0]->kind != ExprKind::Local || t.args[0]->slot != array_slot || !numeric(t.type)) return std::nullopt;
  const ExprPtr& idx = t.args[1];
  if (reads_local(idx, array_slot)) return std::nullopt;
  return match_update(
      s.value,
      [&](const ExprPtr& e) {
        return e->kind == ExprKind::ArrayElem && e->args[0]->kind == ExprKind::Local &&
               e->args[0]->slot == array_slot && structurally_equal(e->args[1], idx);
      },
      [&](const ExprPtr& e) { return reads_local(e, array_slot); });
}

// ---------------------------------------------------------------- classify

namespace {

void subtree_stmts(const std::vector<BodyItem>& items, std::vector<const Stmt*>& out) {
  for (const auto& it : items) {
    if (it.is_loop()) subtree_stmts(it.loop->body, out);
    else out.push_back(&it.stmt);
  }
}

void child_headers(const std::vector<BodyItem>& items, std::vector<const LoopHeader*>& out) {
  for (const auto& it : items) {
    if (!it.is_loop()) continue;
    out.push_back(&it.loop->header);
    child_headers(it.loop->body, out);
  }
}

bool within(const AffineAccess& a, const NormalizedLoop& l) {
  return std::find(a.loops.begin(), a.loops.end(), &l) != a.loops.end();
}

}  // namespace

ParallelismType classify(const NormalizedLoop& nest, const std::vector<AffineAccess>& accesses,
                         const std::vector<DependenceResult>& results, const DepGraph& dfg,
                         const ClassifyOptions& opts) {
  ParallelismType pt;
  auto all = nest_statements(nest);
  std::map<const Stmt*, int> index;
  for (std::size_t i = 0; i < all.size(); ++i) index[all[i]] = static_cast<int>(i);
  for (const auto& r : results)
    for (const auto& a : r.assumptions)
      if (std::find(pt.assumptions.begin(), pt.assumptions.end(), a) == pt.assumptions.end()) pt.assumptions.push_back(a);

  for_each_loop(nest, [&](const NormalizedLoop& L, int depth) {
    LevelVerdict lv;
    lv.loop_id = L.header.id;
    lv.ivar = L.header.ivar;
    lv.depth = depth;
    std::vector<const Stmt*> stmts;
    subtree_stmts(L.body, stmts);
    std::vector<const LoopHeader*> headers;
    child_headers(L.body, headers);
    std::set<int> in_subtree;
    for (const auto* s : stmts) in_subtree.insert(index.count(s) ? index[s] : -1);

    for (const auto* s : stmts) {
      if (s->kind == StmtKind::FieldStore) lv.reasons.push_back("writes field " + to_string(*s->target));
      if (s->kind == StmtKind::Return) lv.reasons.push_back("returns from inside the loop");
      for (const auto& e : stmt_exprs(*s)) {
        visit(e, [&](const Expr& x) {
          if (x.kind == ExprKind::Call && !(x.op == Opcode::invokestatic && x.member.owner == "java/lang/Math"))
            lv.reasons.push_back("calls " + x.member.owner + "." + x.member.name);
          if (x.kind == ExprKind::Construct || x.kind == ExprKind::NewObject)
            lv.reasons.push_back("allocates " + x.member.owner);
        });
      }
    }

    // scalars
    std::set<int> written = locals_written_in(L.body);
    written.erase(L.header.ivar);
    for (int v : written) {
      if (!upward_exposed(L.body, v) && !live_after(nest, L, v, opts.live_after_nest)) {
        lv.private_scalars.push_back(v);
        continue;
      }
      std::optional<ReductionOp> op;
      bool ok = true;
      std::set<int> reducers;
      for (const auto* s : stmts) {
        bool writes = local_written(*s) == v;
        bool reads = stmt_reads(*s, v);
        if (!writes && !reads) continue;
        auto r = writes ? scalar_reduction_op(*s, v) : std::nullopt;
        if (!r || (op && *op != *r)) {
          ok = false;
          break;
        }
        op = r;
        reducers.insert(index[s]);
      }
      for (const auto* h : headers)
        if (h->ivar == v || reads_local(h->init, v) || reads_local(h->bound, v)) ok = false;
      std::string key = "local" + std::to_string(v);
      for (const auto& e : dfg.edges)
        if (e.var == key && e.kind == DepKind::Flow && reducers.count(e.producer) && in_subtree.count(e.consumer) &&
            !reducers.count(e.consumer))
          ok = false;
      if (ok && op) {
        std::string type;
        for (const auto* s : stmts)
          if (s->kind == StmtKind::Assign && s->target->slot == v) type = s->target->type;
        if (type.empty()) type = "I";  // only iinc updates
        lv.reductions.push_back({*op, false, v, type});
      } else {
        lv.reasons.push_back("scalar local" + std::to_string(v) + " carried across iterations");
      }
    }

    // arrays
    std::set<std::string> handled;
    for (const auto& r : results) {
      if (!r.carried_by.count(L.header.id)) continue;
      const AffineAccess& a = accesses[static_cast<std::size_t>(r.source)];
      const AffineAccess& b = accesses[static_cast<std::size_t>(r.sink)];
      std::string name = a.unknown_base ? b.array : a.array;
      if (handled.count(name)) continue;
      handled.insert(name);
      std::optional<ReductionOp> op;
      bool ok = !a.unknown_base && !b.unknown_base && a.dims.size() == 1 && a.array.rfind("local", 0) == 0 &&
                a.array.find('.') == std::string::npos;
      int slot = ok ? std::stoi(a.array.substr(5)) : -1;
      if (ok) {
        for (const auto& acc : accesses) {
          if (!within(acc, L)) continue;
          bool same = acc.array == a.array && acc.dims.size() == 1;
          bool alias = acc.unknown_base && acc.elem_type == a.elem_type && acc.kind == AccessKind::Write;
          if (alias) ok = false;
          if (!same) continue;
          auto o = array_reduction_op(*acc.stmt, slot);
          if (!o || (op && *op != *o)) ok = false;
          else op = o;
        }
      }
      if (ok && op) {
        lv.reductions.push_back({*op, true, slot, a.elem_type});
      } else {
        std::string kinds;
        for (auto k : r.classes) kinds += (kinds.empty() ? "" : "/") + std::string(dep_kind_name(k));
        lv.reasons.push_back("array " + name + " carries a " + kinds + " dependence");
      }
    }

    if (!lv.reasons.empty()) {
      lv.verdict = Verdict::Serial;
      lv.reductions.clear();
    } else {
      lv.verdict = lv.reductions.empty() ? Verdict::IP : Verdict::DP;
    }
    pt.levels.push_back(std::move(lv));
  });
  return pt;
}

NestAnalysis analyze_nest(const NormalizedLoop& nest, const ClassifyOptions& opts) {
  NestAnalysis na;
  na.accesses = extract_affine(nest);
  na.deps = all_dependences(na.accesses, opts.fm);
  std::vector<Stmt> flat;
  for (const auto* s : nest_statements(nest)) flat.push_back(*s);
  na.pt = classify(nest, na.accesses, na.deps, build_dfg(flat), opts);
  return na;
}

}  // namespace bcpar
