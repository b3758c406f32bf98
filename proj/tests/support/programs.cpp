#include "programs.hpp"

#include <array>
#include <bit>
#include <functional>
#include <limits>
#include <map>
#include <random>

#include "bcpar/assembler.hpp"
#include "bcpar/ir_compile.hpp"
#include "kernels.hpp"

namespace bcpar::testkit {

namespace {

constexpr std::uint16_t kPubStatic = access::kPublic | access::kStatic;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g_); }
  bool coin(int one_in) { return pick(0, one_in - 1) == 0; }
  std::int64_t any64() { return static_cast<std::int64_t>(g_()); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g_); }

 private:
  std::mt19937_64 g_;
};

// Slots of the straight-line method.
constexpr int kArr[4] = {0, 1, 2, 3};  // I J F D
constexpr int kInts[4] = {4, 5, 6, 7};
constexpr int kLongs[2] = {8, 10};
constexpr int kFloats[2] = {12, 13};
constexpr int kDoubles[2] = {14, 16};

ElemKind elem_of(Kind k) {
  switch (k) {
    case Kind::Int: return ElemKind::Int;
    case Kind::Long: return ElemKind::Long;
    case Kind::Float: return ElemKind::Float;
    default: return ElemKind::Double;
  }
}

int arr_of(Kind k) {
  switch (k) {
    case Kind::Int: return kArr[0];
    case Kind::Long: return kArr[1];
    case Kind::Float: return kArr[2];
    default: return kArr[3];
  }
}

class LineGen {
 public:
  LineGen(CodeBuilder& c, Rng& r) : c_(c), r_(r) {}

  int local(Kind k) {
    switch (k) {
      case Kind::Int: return kInts[r_.pick(0, 3)];
      case Kind::Long: return kLongs[r_.pick(0, 1)];
      case Kind::Float: return kFloats[r_.pick(0, 1)];
      default: return kDoubles[r_.pick(0, 1)];
    }
  }

  Kind any_kind() {
    static const Kind ks[] = {Kind::Int, Kind::Int, Kind::Long, Kind::Float, Kind::Double};
    return ks[r_.pick(0, 4)];
  }

  // Index in [0, 8): a constant or (int expr & 7).
  void index(int depth) {
    if (depth <= 0 || r_.coin(2)) {
      c_.push_int(r_.pick(0, 7));
      return;
    }
    expr(Kind::Int, depth - 1);
    c_.push_int(7);
    c_.op(Opcode::iand);
  }

  void leaf(Kind k) {
    int w = r_.pick(0, 2);
    if (w == 0) {
      switch (k) {
        case Kind::Int: {
          static const std::int32_t special[] = {0, 1, -1, 5, 127, -128, 32767, 40000, INT32_MAX, INT32_MIN};
          c_.push_int(r_.coin(2) ? special[r_.pick(0, 9)] : static_cast<std::int32_t>(r_.any64()));
          break;
        }
        case Kind::Long: c_.push_long(r_.coin(2) ? r_.pick(-2, 2) : r_.any64()); break;
        case Kind::Float: {
          static const float special[] = {0.0f, -0.0f, 1.0f, 2.0f, 0.5f, 1e30f};
          c_.push_float(r_.coin(2) ? special[r_.pick(0, 5)] : static_cast<float>(r_.real(-1e3, 1e3)));
          break;
        }
        default: {
          static const double special[] = {0.0, -0.0, 1.0, 2.0, 1e300, 3.141592653589793};
          c_.push_double(r_.coin(2) ? special[r_.pick(0, 5)] : r_.real(-1e6, 1e6));
        }
      }
    } else if (w == 1) {
      c_.load(k, local(k));
    } else {
      c_.load(Kind::Ref, arr_of(k));
      c_.push_int(r_.pick(0, 7));
      c_.array_load(elem_of(k));
    }
  }

  void expr(Kind k, int depth) {
    if (depth <= 0 || r_.coin(4)) {
      leaf(k);
      return;
    }
    switch (k) {
      case Kind::Int: int_node(depth); break;
      case Kind::Long: long_node(depth); break;
      case Kind::Float: float_node(depth); break;
      default: double_node(depth);
    }
  }

  void int_node(int d) {
    static const Opcode bin[] = {Opcode::iadd, Opcode::isub, Opcode::imul, Opcode::iand, Opcode::ior,
                                 Opcode::ixor, Opcode::ishl, Opcode::ishr, Opcode::iushr};
    switch (r_.pick(0, 8)) {
      case 0: case 1: case 2:
        expr(Kind::Int, d - 1);
        expr(Kind::Int, d - 1);
        c_.op(bin[r_.pick(0, 8)]);
        break;
      case 3:  // division by a value forced odd
        expr(Kind::Int, d - 1);
        expr(Kind::Int, d - 1);
        c_.push_int(1);
        c_.op(Opcode::ior);
        c_.op(r_.coin(2) ? Opcode::idiv : Opcode::irem);
        break;
      case 4: {
        expr(Kind::Int, d - 1);
        static const Opcode un[] = {Opcode::ineg, Opcode::i2b, Opcode::i2c, Opcode::i2s};
        c_.op(un[r_.pick(0, 3)]);
        break;
      }
      case 5: {
        Kind from = std::array{Kind::Long, Kind::Float, Kind::Double}[static_cast<std::size_t>(r_.pick(0, 2))];
        expr(from, d - 1);
        c_.op(from == Kind::Long ? Opcode::l2i : from == Kind::Float ? Opcode::f2i : Opcode::d2i);
        break;
      }
      case 6: {
        int w = r_.pick(0, 2);
        Kind from = w == 0 ? Kind::Long : w == 1 ? Kind::Float : Kind::Double;
        expr(from, d - 1);
        expr(from, d - 1);
        if (w == 0) c_.op(Opcode::lcmp);
        else if (w == 1) c_.op(r_.coin(2) ? Opcode::fcmpl : Opcode::fcmpg);
        else c_.op(r_.coin(2) ? Opcode::dcmpl : Opcode::dcmpg);
        break;
      }
      case 7:  // b - a through swap
        expr(Kind::Int, d - 1);
        expr(Kind::Int, d - 1);
        c_.op(Opcode::swap);
        c_.op(Opcode::isub);
        break;
      default:
        c_.load(Kind::Ref, kArr[0]);
        index(d - 1);
        c_.array_load(ElemKind::Int);
    }
  }

  void long_node(int d) {
    static const Opcode bin[] = {Opcode::ladd, Opcode::lsub, Opcode::lmul, Opcode::land, Opcode::lor, Opcode::lxor};
    switch (r_.pick(0, 5)) {
      case 0: case 1:
        expr(Kind::Long, d - 1);
        expr(Kind::Long, d - 1);
        c_.op(bin[r_.pick(0, 5)]);
        break;
      case 2:
        expr(Kind::Long, d - 1);
        expr(Kind::Long, d - 1);
        c_.push_long(1);
        c_.op(Opcode::lor);
        c_.op(r_.coin(2) ? Opcode::ldiv : Opcode::lrem);
        break;
      case 3: {
        expr(Kind::Long, d - 1);
        expr(Kind::Int, d - 1);
        static const Opcode sh[] = {Opcode::lshl, Opcode::lshr, Opcode::lushr};
        c_.op(sh[r_.pick(0, 2)]);
        break;
      }
      case 4: {
        int w = r_.pick(0, 3);
        if (w == 0) {
          expr(Kind::Long, d - 1);
          c_.op(Opcode::lneg);
        } else {
          Kind from = w == 1 ? Kind::Int : w == 2 ? Kind::Float : Kind::Double;
          expr(from, d - 1);
          c_.op(w == 1 ? Opcode::i2l : w == 2 ? Opcode::f2l : Opcode::d2l);
        }
        break;
      }
      default:
        c_.load(Kind::Ref, kArr[1]);
        index(d - 1);
        c_.array_load(ElemKind::Long);
    }
  }

  void float_node(int d) {
    static const Opcode bin[] = {Opcode::fadd, Opcode::fsub, Opcode::fmul, Opcode::fdiv, Opcode::frem};
    switch (r_.pick(0, 3)) {
      case 0: case 1:
        expr(Kind::Float, d - 1);
        expr(Kind::Float, d - 1);
        c_.op(bin[r_.pick(0, 4)]);
        break;
      case 2: {
        int w = r_.pick(0, 3);
        if (w == 0) {
          expr(Kind::Float, d - 1);
          c_.op(Opcode::fneg);
        } else {
          Kind from = w == 1 ? Kind::Int : w == 2 ? Kind::Long : Kind::Double;
          expr(from, d - 1);
          c_.op(w == 1 ? Opcode::i2f : w == 2 ? Opcode::l2f : Opcode::d2f);
        }
        break;
      }
      default:
        c_.load(Kind::Ref, kArr[2]);
        index(d - 1);
        c_.array_load(ElemKind::Float);
    }
  }

  void double_node(int d) {
    static const Opcode bin[] = {Opcode::dadd, Opcode::dsub, Opcode::dmul, Opcode::ddiv, Opcode::drem};
    switch (r_.pick(0, 3)) {
      case 0: case 1:
        expr(Kind::Double, d - 1);
        expr(Kind::Double, d - 1);
        c_.op(bin[r_.pick(0, 4)]);
        break;
      case 2: {
        int w = r_.pick(0, 3);
        if (w == 0) {
          expr(Kind::Double, d - 1);
          c_.op(Opcode::dneg);
        } else {
          Kind from = w == 1 ? Kind::Int : w == 2 ? Kind::Long : Kind::Float;
          expr(from, d - 1);
          c_.op(w == 1 ? Opcode::i2d : w == 2 ? Opcode::l2d : Opcode::f2d);
        }
        break;
      }
      default:
        c_.load(Kind::Ref, kArr[3]);
        index(d - 1);
        c_.array_load(ElemKind::Double);
    }
  }

  static Opcode add_op(Kind k) {
    switch (k) {
      case Kind::Int: return Opcode::iadd;
      case Kind::Long: return Opcode::ladd;
      case Kind::Float: return Opcode::fadd;
      default: return Opcode::dadd;
    }
  }

  void statement() {
    Kind k = any_kind();
    bool wide = k == Kind::Long || k == Kind::Double;
    switch (r_.pick(0, 7)) {
      case 0: case 1:  // x = e
        expr(k, 3);
        c_.store(k, local(k));
        break;
      case 2:  // A[i] = e
        c_.load(Kind::Ref, arr_of(k));
        index(2);
        expr(k, 3);
        c_.array_store(elem_of(k));
        break;
      case 3:  // A[i] += e, javac's dup2 form
        c_.load(Kind::Ref, arr_of(k));
        index(2);
        c_.op(Opcode::dup2);
        c_.array_load(elem_of(k));
        expr(k, 2);
        c_.op(add_op(k));
        c_.array_store(elem_of(k));
        break;
      case 4:  // x = e * e, one evaluation through dup
        expr(k, 3);
        c_.op(wide ? Opcode::dup2 : Opcode::dup);
        c_.op(k == Kind::Int ? Opcode::imul : k == Kind::Long ? Opcode::lmul : k == Kind::Float ? Opcode::fmul : Opcode::dmul);
        c_.store(k, local(k));
        break;
      case 5: {  // x = b + (a - b) with b copied under a
        expr(k, 2);
        expr(k, 2);
        c_.op(wide ? Opcode::dup2_x2 : Opcode::dup_x1);
        Opcode sub = k == Kind::Int ? Opcode::isub : k == Kind::Long ? Opcode::lsub : k == Kind::Float ? Opcode::fsub : Opcode::dsub;
        c_.op(sub);
        c_.op(add_op(k));
        c_.store(k, local(k));
        break;
      }
      case 6:
        c_.iinc(kInts[r_.pick(0, 3)], r_.pick(-128, 127));
        break;
      default:  // evaluated and dropped
        expr(k, 2);
        c_.op(wide ? Opcode::pop2 : Opcode::pop);
    }
  }

 private:
  CodeBuilder& c_;
  Rng& r_;
};

}  // namespace

StraightLine random_straight_line(std::uint64_t seed) {
  Rng r(seed);
  StraightLine out;
  out.owner = "rnd/Line" + std::to_string(seed);
  ClassBuilder b(out.owner);
  CodeBuilder c(b.pool());
  LineGen g(c, r);
  // Scalars start from the arrays so every local is defined.
  auto init = [&](Kind k, const int* slots, int count) {
    for (int s = 0; s < count; ++s) {
      c.load(Kind::Ref, arr_of(k));
      c.push_int(s);
      c.array_load(elem_of(k));
      c.store(k, slots[s]);
    }
  };
  init(Kind::Int, kInts, 4);
  init(Kind::Long, kLongs, 2);
  init(Kind::Float, kFloats, 2);
  init(Kind::Double, kDoubles, 2);
  int n = r.pick(5, 25);
  for (int s = 0; s < n; ++s) g.statement();
  auto dump = [&](Kind k, const int* slots, int count) {
    for (int s = 0; s < count; ++s) {
      c.load(Kind::Ref, arr_of(k));
      c.push_int(8 + s);
      c.load(k, slots[s]);
      c.array_store(elem_of(k));
    }
  };
  dump(Kind::Int, kInts, 4);
  dump(Kind::Long, kLongs, 2);
  dump(Kind::Float, kFloats, 2);
  dump(Kind::Double, kDoubles, 2);
  g.expr(Kind::Int, 3);
  c.ret(Kind::Int);
  b.add_method(kPubStatic, out.method, out.desc, c.finish());
  out.model = std::move(b).build();
  return out;
}

std::vector<Value> straight_line_args(Heap& heap, std::uint64_t seed) {
  Rng r(seed ^ 0xA5A5A5A5ULL);
  Value I = heap.new_array("[I", 16), J = heap.new_array("[J", 16), F = heap.new_array("[F", 16),
        D = heap.new_array("[D", 16);
  for (int k = 0; k < 16; ++k) {
    auto idx = static_cast<std::size_t>(k);
    heap.array(I)->data[idx] = Value::of_int(r.coin(3) ? r.pick(-20, 20) : static_cast<std::int32_t>(r.any64()));
    heap.array(J)->data[idx] = Value::of_long(r.coin(3) ? r.pick(-20, 20) : r.any64());
    heap.array(F)->data[idx] = Value::of_float(static_cast<float>(r.real(-100, 100)));
    heap.array(D)->data[idx] = Value::of_double(r.coin(4) ? 0.0 : r.real(-1e4, 1e4));
  }
  return {I, J, F, D};
}

// ------------------------------------------------------------ affine nests

namespace {

constexpr int kIvarBase = 3;

struct NestGen {
  Rng& r;
  AffineNest& out;

  RefSpec ref(int array, int nloops, bool write) {
    RefSpec s;
    s.array = array;
    s.write = write;
    int ndims = array == 2 ? 2 : 1;
    for (int d = 0; d < ndims; ++d) {
      std::vector<int> row;
      for (int l = 0; l < nloops; ++l) row.push_back(r.coin(3) ? 0 : r.pick(-3, 3));
      row.push_back(r.pick(-3, 3));
      s.dims.push_back(row);
    }
    return s;
  }

  StmtSpec stmt(const std::vector<int>& loops) {
    StmtSpec s;
    s.loops = loops;
    int n = static_cast<int>(loops.size());
    int arrays = r.pick(0, 3);  // bias toward a
    int target = arrays == 3 ? 2 : arrays == 2 ? 1 : 0;
    s.target = ref(target, n, true);
    int reads = r.pick(1, 2);
    for (int k = 0; k < reads; ++k) {
      int a = r.pick(0, 3);
      s.reads.push_back(ref(a == 3 ? 2 : a == 2 ? 1 : 0, n, false));
    }
    if (r.coin(4)) s.reads[0] = RefSpec{s.target.array, s.target.dims, false};  // x = x + ...
    return s;
  }

  void loop(int parent, int depth, std::vector<int> enclosing) {
    LoopSpec l;
    l.id = static_cast<int>(out.loops.size());
    l.parent = parent;
    l.depth = depth;
    int shape = r.pick(0, 9);
    if (parent >= 0 && shape < 2) {
      l.triangular = true;
      l.lo = 0;
      l.hi = r.pick(0, 2);
    } else {
      l.lo = r.pick(0, 2);
      l.hi = r.pick(l.lo + 1, 8);
      l.step = shape == 8 ? 2 : shape == 9 ? -1 : 1;
    }
    out.loops.push_back(l);
    enclosing.push_back(l.id);
    if (r.coin(3) || depth == 2) out.stmts.push_back(stmt(enclosing));
    if (depth < 2 && !r.coin(3)) {
      loop(l.id, depth + 1, enclosing);
      if (r.coin(4) && depth + 1 < 2) loop(l.id, depth + 1, enclosing);
    }
    if (out.stmts.empty() || out.stmts.back().loops.size() < enclosing.size() || r.coin(3))
      out.stmts.push_back(stmt(enclosing));
  }
};

void emit_subscript(CodeBuilder& c, const std::vector<int>& row) {
  c.push_int(row.back());
  for (std::size_t l = 0; l + 1 < row.size(); ++l) {
    if (row[l] == 0) continue;
    c.load(Kind::Int, kIvarBase + static_cast<int>(l));
    c.push_int(row[l]);
    c.op(Opcode::imul);
    c.op(Opcode::iadd);
  }
}

void emit_element(CodeBuilder& c, const RefSpec& ref) {
  c.load(Kind::Ref, ref.array);
  if (ref.dims.size() == 2) {
    emit_subscript(c, ref.dims[0]);
    c.array_load(ElemKind::Ref);
  }
  emit_subscript(c, ref.dims.back());
}

}  // namespace

AffineNest random_affine_nest(std::uint64_t seed) {
  Rng r(seed);
  AffineNest out;
  out.owner = "rnd/Nest" + std::to_string(seed);
  NestGen g{r, out};
  g.loop(-1, 0, {});

  ClassBuilder b(out.owner);
  CodeBuilder c(b.pool());
  // Statements are emitted in the order the generator produced them, which
  // is textual order, interleaved with their loops.
  std::size_t next = 0;
  std::function<void(int)> emit_loop = [&](int id) {
    const LoopSpec& l = out.loops[static_cast<std::size_t>(id)];
    int ivar = kIvarBase + l.depth;
    ForLoop f;
    f.ivar = ivar;
    f.bottom = (seed + static_cast<std::uint64_t>(id)) % 3 == 0;
    if (l.step < 0) {
      f.init = [&c, l] { c.push_int(l.hi - 1); };
      f.bound = [&c, l] { c.push_int(l.lo); };
      f.exit = Opcode::if_icmplt;
    } else {
      f.init = [&c, l] { c.push_int(l.lo); };
      if (l.triangular)
        f.bound = [&c, l] {
          c.load(Kind::Int, kIvarBase + l.depth - 1);
          c.push_int(l.hi);
          c.op(Opcode::iadd);
        };
      else
        f.bound = [&c, l] { c.push_int(l.hi); };
    }
    f.step = l.step;
    emit_for(c, f, [&] {
      for (;;) {
        if (next < out.stmts.size() && out.stmts[next].loops.back() == id) {
          const StmtSpec& s = out.stmts[next++];
          emit_element(c, s.target);
          for (std::size_t k = 0; k < s.reads.size(); ++k) {
            emit_element(c, s.reads[k]);
            c.array_load(ElemKind::Int);
            if (k > 0) c.op(Opcode::iadd);
          }
          c.push_int(1);
          c.op(Opcode::iadd);
          c.array_store(ElemKind::Int);
          continue;
        }
        // A child loop starts with the next statement deeper in the nest.
        bool child = false;
        for (std::size_t k = static_cast<std::size_t>(id) + 1; k < out.loops.size(); ++k) {
          if (out.loops[k].parent != id) continue;
          if (next < out.stmts.size() && out.stmts[next].loops.size() > out.loops[k].depth &&
              out.stmts[next].loops[static_cast<std::size_t>(out.loops[k].depth)] == static_cast<int>(k)) {
            emit_loop(static_cast<int>(k));
            child = true;
            break;
          }
        }
        if (!child) break;
      }
    });
  };
  emit_loop(0);
  c.ret(Kind::Void);
  b.add_method(kPubStatic, out.method, out.desc, c.finish());
  out.model = std::move(b).build();
  return out;
}

std::vector<std::vector<int>> iterations(const AffineNest& nest, const std::vector<int>& loops) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == loops.size()) {
      out.push_back(cur);
      return;
    }
    const LoopSpec& l = nest.loops[static_cast<std::size_t>(loops[k])];
    if (l.step < 0) {
      for (int i = l.hi - 1; i >= l.lo; --i) {
        cur.push_back(i);
        rec(k + 1);
        cur.pop_back();
      }
      return;
    }
    int hi = l.triangular ? cur.back() + l.hi : l.hi;
    for (int i = l.lo; i < hi; i += l.step) {
      cur.push_back(i);
      rec(k + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

std::vector<int> subscripts(const RefSpec& ref, const std::vector<int>& it) {
  std::vector<int> out;
  for (const auto& row : ref.dims) {
    int v = row.back();
    for (std::size_t l = 0; l + 1 < row.size(); ++l) v += row[l] * it[l];
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------- rewrite

ClassModel rewrite_serial(const ClassModel& model, const std::string& method, const std::string& desc,
                          const NormalizedLoop& transformed) {
  ClassModel out = model;
  MethodEntry* m = out.find_method(method, desc);
  if (!m || !m->code) throw std::invalid_argument("no code for " + method);
  std::vector<Instr> code = m->code->instrs;
  CodeBuilder cb(out.pool);
  std::map<std::int32_t, Label> labels;
  auto label = [&](std::int32_t off) {
    auto it = labels.find(off);
    if (it == labels.end()) it = labels.emplace(off, cb.new_label()).first;
    return it->second;
  };
  for (std::size_t i = 0; i < code.size();) {
    const Instr& in = code[i];
    cb.bind(label(static_cast<std::int32_t>(in.offset)));
    if (in.offset == transformed.init_offset) {
      IrCompiler comp(cb);
      comp.loop(transformed, label);
      while (i < code.size() && code[i].offset < transformed.region_end) ++i;
      continue;
    }
    if (is_branch(in.op) && in.op != Opcode::tableswitch && in.op != Opcode::lookupswitch)
      cb.branch(in.op, label(in.target));
    else
      cb.raw(in);
    ++i;
  }
  set_code(*m, cb.finish());
  return out;
}

}  // namespace bcpar::testkit
