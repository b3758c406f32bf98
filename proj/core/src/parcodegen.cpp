#include "bcpar/parcodegen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

#include "bcpar/assembler.hpp"
#include "bcpar/error.hpp"
#include "bcpar/ir_compile.hpp"

namespace bcpar {

std::string_view chunk_strategy_name(ChunkStrategy s) { return s == ChunkStrategy::Block ? "block" : "cyclic"; }

ChunkSpec make_chunks(std::int64_t trip_count, int n_workers, ChunkStrategy strategy) {
  if (trip_count < 0) throw std::invalid_argument("negative trip count");
  if (n_workers < 1) throw std::invalid_argument("need at least one worker");
  ChunkSpec spec;
  spec.n_workers = n_workers;
  spec.strategy = strategy;
  std::int64_t n = n_workers;
  if (strategy == ChunkStrategy::Block) {
    std::int64_t chunk = (trip_count + n - 1) / n;
    for (std::int64_t c = 0; c < n; ++c) {
      std::int64_t s = std::min(c * chunk, trip_count);
      spec.chunks.emplace_back(s, std::min(s + chunk, trip_count));
    }
  } else {
    spec.stride = n;
    for (std::int64_t c = 0; c < n; ++c) spec.chunks.emplace_back(std::min(c, trip_count), trip_count);
  }
  return spec;
}

std::vector<std::int64_t> ChunkSpec::iterations(int c) const {
  std::vector<std::int64_t> out;
  auto [s, e] = chunks.at(static_cast<std::size_t>(c));
  for (std::int64_t k = s; k < e; k += stride) out.push_back(k);
  return out;
}

ExprPtr reduction_identity(ReductionOp op, const std::string& type) {
  char t = type.empty() ? 'I' : type[0];
  auto i = [](std::int32_t v) { return make_const(Value::of_int(v), "I"); };
  switch (t) {
    case 'J': {
      std::int64_t v = op == ReductionOp::Add ? 0 : op == ReductionOp::Mul ? 1
                       : op == ReductionOp::Min ? std::numeric_limits<std::int64_t>::max()
                                                : std::numeric_limits<std::int64_t>::min();
      return make_const(Value::of_long(v), "J");
    }
    case 'F': {
      float inf = std::numeric_limits<float>::infinity();
      float v = op == ReductionOp::Add ? 0.0f : op == ReductionOp::Mul ? 1.0f : op == ReductionOp::Min ? inf : -inf;
      return make_const(Value::of_float(v), "F");
    }
    case 'D': {
      double inf = std::numeric_limits<double>::infinity();
      double v = op == ReductionOp::Add ? 0.0 : op == ReductionOp::Mul ? 1.0 : op == ReductionOp::Min ? inf : -inf;
      return make_const(Value::of_double(v), "D");
    }
    default: break;
  }
  if (op == ReductionOp::Add) return i(0);
  if (op == ReductionOp::Mul) return i(1);
  bool mn = op == ReductionOp::Min;
  switch (t) {
    case 'B': return i(mn ? 127 : -128);
    case 'S': return i(mn ? 32767 : -32768);
    case 'C': return i(mn ? 65535 : 0);
    case 'Z': return i(mn ? 1 : 0);
    default: return i(mn ? std::numeric_limits<std::int32_t>::max() : std::numeric_limits<std::int32_t>::min());
  }
}

namespace {

constexpr std::string_view kThread = "java/lang/Thread";
constexpr std::string_view kMath = "java/lang/Math";

std::string int_like(const std::string& t) {
  return (t == "B" || t == "S" || t == "C" || t == "Z") ? "I" : t;
}

Kind kind_of(const std::string& desc) { return descriptor_kind(desc); }

Opcode arith(ReductionOp op, Kind k) {
  int f = k == Kind::Long ? 1 : k == Kind::Float ? 2 : k == Kind::Double ? 3 : 0;
  if (op == ReductionOp::Add) return static_cast<Opcode>(0x60 + f);
  return static_cast<Opcode>(0x68 + f);
}

std::string math_desc(Kind k) {
  switch (k) {
    case Kind::Long: return "(JJ)J";
    case Kind::Float: return "(FF)F";
    case Kind::Double: return "(DD)D";
    default: return "(II)I";
  }
}

/// acc-op: two values of kind `k` on the stack -> combined value.
void combine(CodeBuilder& cb, ReductionOp op, Kind k) {
  if (op == ReductionOp::Add || op == ReductionOp::Mul) cb.op(arith(op, k));
  else cb.invoke(Opcode::invokestatic, kMath, op == ReductionOp::Min ? "min" : "max", math_desc(k));
}

void each_expr(const std::vector<BodyItem>& items, const std::function<void(const ExprPtr&)>& fn,
               const std::function<void(const Stmt&)>& on_stmt = {}) {
  for (const auto& it : items) {
    if (it.is_loop()) {
      fn(it.loop->header.init);
      fn(it.loop->header.bound);
      each_expr(it.loop->body, fn, on_stmt);
    } else {
      for (const auto& e : stmt_exprs(it.stmt))
        if (e) fn(e);
      if (it.stmt.target) fn(it.stmt.target);
      if (on_stmt) on_stmt(it.stmt);
    }
  }
}

int max_slot(const NormalizedLoop& l) {
  int m = l.header.ivar + 1;
  std::vector<BodyItem> self(1);
  self[0].loop = std::shared_ptr<const NormalizedLoop>(std::shared_ptr<const NormalizedLoop>{}, &l);
  each_expr(
      self,
      [&](const ExprPtr& e) {
        visit(e, [&](const Expr& x) {
          if (x.kind == ExprKind::Local) m = std::max(m, x.slot + slot_width(x.kind_of()));
        });
      },
      [&](const Stmt& s) {
        if (s.kind == StmtKind::Inc) m = std::max(m, s.slot + 1);
      });
  for_each_loop(l, [&](const NormalizedLoop& x, int) { m = std::max(m, x.header.ivar + 1); });
  return m;
}

struct Capture {
  int slot;
  std::string desc;
};

struct TaskLayout {
  const NormalizedLoop* loop = nullptr;
  std::vector<Capture> captures;
  std::vector<Reduction> reductions;
  int self_slot = 0;
};

TaskLayout layout_for(const NormalizedLoop& P, const std::vector<Reduction>& reds) {
  TaskLayout t;
  t.loop = &P;
  t.reductions = reds;
  std::map<int, std::string> types;
  std::set<int> read;
  each_expr(
      P.body,
      [&](const ExprPtr& e) {
        visit(e, [&](const Expr& x) {
          if (x.kind != ExprKind::Local) return;
          read.insert(x.slot);
          types.emplace(x.slot, int_like(x.type));
        });
      },
      [&](const Stmt& s) {
        if (s.kind == StmtKind::Inc) {
          read.insert(s.slot);
          types.emplace(s.slot, "I");
        }
      });
  std::set<int> scalar_acc, array_acc;
  for (const auto& r : reds) (r.array ? array_acc : scalar_acc).insert(r.slot);
  for (int v : read) {
    if (v == P.header.ivar || scalar_acc.count(v)) continue;
    if (array_acc.count(v) || upward_exposed(P.body, v)) t.captures.push_back({v, types[v]});
  }
  int top = max_slot(P);
  for (const auto& c : t.captures) top = std::max(top, c.slot + slot_width(kind_of(c.desc)));
  for (const auto& r : reds) top = std::max(top, r.slot + (r.array ? 1 : slot_width(kind_of(r.type))));
  t.self_slot = top;
  return t;
}

std::string result_desc(const Reduction& r) { return r.array ? "[" + r.type : int_like(r.type); }

ClassModel build_task(const std::string& name, const TaskLayout& t) {
  ClassBuilder b(name);
  b.add_interface("java/lang/Runnable");
  b.add_field(access::kPublic, "lo", "I");
  b.add_field(access::kPublic, "count", "I");
  b.add_field(access::kPublic, "stride", "I");
  for (const auto& c : t.captures) b.add_field(access::kPublic, "c" + std::to_string(c.slot), c.desc);
  for (const auto& r : t.reductions) b.add_field(access::kPublic, "r" + std::to_string(r.slot), result_desc(r));
  b.add_default_constructor();

  CodeBuilder cb(b.pool());
  const int self = t.self_slot, k = t.self_slot + 1;
  const NormalizedLoop& P = *t.loop;
  cb.load(Kind::Ref, 0);
  cb.store(Kind::Ref, self);
  for (const auto& c : t.captures) {
    cb.load(Kind::Ref, self);
    cb.field(Opcode::getfield, name, "c" + std::to_string(c.slot), c.desc);
    cb.store(kind_of(c.desc), c.slot);
  }
  IrCompiler comp(cb);
  for (const auto& r : t.reductions) {
    ExprPtr id = reduction_identity(r.op, r.type);
    if (!r.array) {
      comp.expr(id);
      cb.store(kind_of(int_like(r.type)), r.slot);
      continue;
    }
    ElemKind ek = descriptor_elem_kind(r.type);
    cb.load(Kind::Ref, r.slot);
    cb.op(Opcode::arraylength);
    cb.new_array(ek);
    cb.store(Kind::Ref, r.slot);
    bool zero = id->constant.bits == 0;
    if (!zero) {
      Label loop = cb.new_label(), done = cb.new_label();
      cb.push_int(0);
      cb.store(Kind::Int, k);
      cb.bind(loop);
      cb.load(Kind::Int, k);
      cb.load(Kind::Ref, r.slot);
      cb.op(Opcode::arraylength);
      cb.branch(Opcode::if_icmpge, done);
      cb.load(Kind::Ref, r.slot);
      cb.load(Kind::Int, k);
      comp.expr(id);
      cb.array_store(ek);
      cb.iinc(k, 1);
      cb.jump(loop);
      cb.bind(done);
    }
  }
  cb.load(Kind::Ref, self);
  cb.field(Opcode::getfield, name, "lo", "I");
  cb.store(Kind::Int, P.header.ivar);
  cb.load(Kind::Ref, self);
  cb.field(Opcode::getfield, name, "count", "I");
  cb.store(Kind::Int, k);
  Label body = cb.new_label(), cont = cb.new_label(), test = cb.new_label();
  cb.jump(test);
  cb.bind(body);
  comp.items(P.body, &P, cont, [](std::int32_t off) -> Label {
    throw InconsistentModel("branch to offset " + std::to_string(off) + " leaves the parallel loop");
  });
  cb.bind(cont);
  cb.load(Kind::Int, P.header.ivar);
  cb.load(Kind::Ref, self);
  cb.field(Opcode::getfield, name, "stride", "I");
  cb.op(Opcode::iadd);
  cb.store(Kind::Int, P.header.ivar);
  cb.iinc(k, -1);
  cb.bind(test);
  cb.load(Kind::Int, k);
  cb.branch(Opcode::ifgt, body);
  for (const auto& r : t.reductions) {
    cb.load(Kind::Ref, self);
    cb.load(r.array ? Kind::Ref : kind_of(int_like(r.type)), r.slot);
    cb.field(Opcode::putfield, name, "r" + std::to_string(r.slot), result_desc(r));
  }
  cb.op(Opcode::return_);
  b.add_method(access::kPublic, "run", "()V", cb.finish());
  return std::move(b).build();
}

void check_private_access(const ClassModel& model, const NormalizedLoop& P) {
  std::string owner = model.name();
  each_expr(P.body, [&](const ExprPtr& e) {
    visit(e, [&](const Expr& x) {
      if (x.member.owner != owner) return;
      if (x.kind == ExprKind::Field) {
        const FieldEntry* f = model.find_field(x.member.name);
        if (f && (f->access & access::kPrivate))
          throw CaptureFailure("loop body reads private field " + owner + "." + x.member.name);
      }
      if (x.kind == ExprKind::Call || x.kind == ExprKind::Construct) {
        const MethodEntry* m = model.find_method(x.kind == ExprKind::Construct ? "<init>" : x.member.name,
                                                 x.member.descriptor);
        if (m && (m->access & access::kPrivate))
          throw CaptureFailure("loop body calls private method " + owner + "." + x.member.name);
      }
    });
  });
}

struct DriverSlots {
  int init, bound, trip, chunk, ks, ke, e, n, c, tasks, threads, task, thread, base_workers;
  explicit DriverSlots(int d)
      : init(d), bound(d + 1), trip(d + 2), chunk(d + 3), ks(d + 4), ke(d + 5), e(d + 6), n(d + 7), c(d + 8),
        tasks(d + 9), threads(d + 10), task(d + 11), thread(d + 12), base_workers(d + 13) {}
};

class SpawnEmitter {
 public:
  SpawnEmitter(CodeBuilder& cb, const CodegenOptions& opts, DriverSlots slots)
      : cb_(cb), opts_(opts), s_(slots) {}

  void emit(const NormalizedLoop& P, const TaskLayout& layout, const std::vector<std::string>& task_names) {
    IrCompiler comp(cb_);
    const auto& h = P.header;
    const int step = h.step;
    const int n_fixed = opts_.n_workers;
    const bool runtime = opts_.runtime_workers;
    auto push_n = [&] {
      if (runtime) cb_.load(Kind::Int, s_.n);
      else cb_.push_int(n_fixed);
    };

    comp.expr(h.init);
    cb_.store(Kind::Int, s_.init);
    comp.expr(h.bound);
    cb_.store(Kind::Int, s_.bound);
    trip_count(h.rel, step);
    Label skip = cb_.new_label();
    cb_.load(Kind::Int, s_.trip);
    cb_.branch(Opcode::ifle, skip);

    if (runtime) {
      cb_.invoke(Opcode::invokestatic, "java/lang/Runtime", "getRuntime", "()Ljava/lang/Runtime;");
      cb_.invoke(Opcode::invokevirtual, "java/lang/Runtime", "availableProcessors", "()I");
      cb_.store(Kind::Int, s_.n);
      cb_.load(Kind::Int, s_.n);
      cb_.new_array(ElemKind::Ref, task_names[0]);
      cb_.store(Kind::Ref, s_.tasks);
      cb_.load(Kind::Int, s_.n);
      cb_.new_array(ElemKind::Ref, kThread);
      cb_.store(Kind::Ref, s_.threads);
    }
    cb_.load(Kind::Int, s_.trip);
    push_n();
    cb_.op(Opcode::iadd);
    cb_.push_int(1);
    cb_.op(Opcode::isub);
    push_n();
    cb_.op(Opcode::idiv);
    cb_.store(Kind::Int, s_.chunk);

    // spawn
    auto spawn_one = [&](const std::function<void()>& push_c, const std::string& cls, int task_slot, int thread_slot) {
      Label next = cb_.new_label();
      if (opts_.strategy == ChunkStrategy::Block) {
        push_c();
        cb_.load(Kind::Int, s_.chunk);
        cb_.op(Opcode::imul);
        cb_.load(Kind::Int, s_.trip);
        cb_.invoke(Opcode::invokestatic, kMath, "min", "(II)I");
        cb_.store(Kind::Int, s_.ks);
        cb_.load(Kind::Int, s_.ks);
        cb_.load(Kind::Int, s_.chunk);
        cb_.op(Opcode::iadd);
        cb_.load(Kind::Int, s_.trip);
        cb_.invoke(Opcode::invokestatic, kMath, "min", "(II)I");
        cb_.load(Kind::Int, s_.ks);
        cb_.op(Opcode::isub);
        cb_.store(Kind::Int, s_.ke);  // count
      } else {
        cb_.load(Kind::Int, s_.trip);
        push_c();
        cb_.op(Opcode::isub);
        push_n();
        cb_.op(Opcode::iadd);
        cb_.push_int(1);
        cb_.op(Opcode::isub);
        push_n();
        cb_.op(Opcode::idiv);
        cb_.store(Kind::Int, s_.ke);
      }
      cb_.load(Kind::Int, s_.ke);
      cb_.branch(Opcode::ifle, next);
      cb_.new_object(cls);
      cb_.op(Opcode::dup);
      cb_.invoke(Opcode::invokespecial, cls, "<init>", "()V");
      cb_.store(Kind::Ref, task_slot);
      // lo
      cb_.load(Kind::Ref, task_slot);
      cb_.load(Kind::Int, s_.init);
      if (opts_.strategy == ChunkStrategy::Block) cb_.load(Kind::Int, s_.ks);
      else push_c();
      cb_.push_int(step);
      cb_.op(Opcode::imul);
      cb_.op(Opcode::iadd);
      cb_.field(Opcode::putfield, cls, "lo", "I");
      cb_.load(Kind::Ref, task_slot);
      cb_.load(Kind::Int, s_.ke);
      cb_.field(Opcode::putfield, cls, "count", "I");
      cb_.load(Kind::Ref, task_slot);
      if (opts_.strategy == ChunkStrategy::Block) {
        cb_.push_int(step);
      } else {
        push_n();
        cb_.push_int(step);
        cb_.op(Opcode::imul);
      }
      cb_.field(Opcode::putfield, cls, "stride", "I");
      for (const auto& c : layout.captures) {
        cb_.load(Kind::Ref, task_slot);
        cb_.load(kind_of(c.desc), c.slot);
        cb_.field(Opcode::putfield, cls, "c" + std::to_string(c.slot), c.desc);
      }
      cb_.new_object(kThread);
      cb_.op(Opcode::dup);
      cb_.load(Kind::Ref, task_slot);
      cb_.invoke(Opcode::invokespecial, kThread, "<init>", "(Ljava/lang/Runnable;)V");
      cb_.store(Kind::Ref, thread_slot);
      cb_.load(Kind::Ref, thread_slot);
      cb_.invoke(Opcode::invokevirtual, kThread, "start", "()V");
      if (runtime) {
        cb_.load(Kind::Ref, s_.tasks);
        cb_.load(Kind::Int, s_.c);
        cb_.load(Kind::Ref, task_slot);
        cb_.op(Opcode::aastore);
        cb_.load(Kind::Ref, s_.threads);
        cb_.load(Kind::Int, s_.c);
        cb_.load(Kind::Ref, thread_slot);
        cb_.op(Opcode::aastore);
      }
      cb_.bind(next);
    };

    auto join_one = [&](int thread_slot) {
      Label j = cb_.new_label();
      cb_.load(Kind::Ref, thread_slot);
      cb_.branch(Opcode::ifnull, j);
      cb_.load(Kind::Ref, thread_slot);
      cb_.invoke(Opcode::invokevirtual, kThread, "join", "()V");
      cb_.bind(j);
    };

    auto merge_one = [&](const std::string& cls, int task_slot) {
      if (layout.reductions.empty()) return;
      Label m = cb_.new_label();
      cb_.load(Kind::Ref, task_slot);
      cb_.branch(Opcode::ifnull, m);
      for (const auto& r : layout.reductions) {
        std::string field = "r" + std::to_string(r.slot);
        if (!r.array) {
          Kind k = kind_of(int_like(r.type));
          cb_.load(k, r.slot);
          cb_.load(Kind::Ref, task_slot);
          cb_.field(Opcode::getfield, cls, field, result_desc(r));
          combine(cb_, r.op, k);
          cb_.store(k, r.slot);
          continue;
        }
        ElemKind ek = descriptor_elem_kind(r.type);
        Kind k = elem_stack_kind(ek);
        Label loop = cb_.new_label(), done = cb_.new_label();
        cb_.push_int(0);
        cb_.store(Kind::Int, s_.e);
        cb_.bind(loop);
        cb_.load(Kind::Int, s_.e);
        cb_.load(Kind::Ref, r.slot);
        cb_.op(Opcode::arraylength);
        cb_.branch(Opcode::if_icmpge, done);
        cb_.load(Kind::Ref, r.slot);
        cb_.load(Kind::Int, s_.e);
        cb_.op(Opcode::dup2);
        cb_.array_load(ek);
        cb_.load(Kind::Ref, task_slot);
        cb_.field(Opcode::getfield, cls, field, result_desc(r));
        cb_.load(Kind::Int, s_.e);
        cb_.array_load(ek);
        combine(cb_, r.op, k);
        cb_.array_store(ek);
        cb_.iinc(s_.e, 1);
        cb_.jump(loop);
        cb_.bind(done);
      }
      cb_.bind(m);
    };

    if (!runtime) {
      for (int c = 0; c < n_fixed; ++c) {
        int ts = s_.base_workers + c, th = s_.base_workers + n_fixed + c;
        cb_.push_null();
        cb_.store(Kind::Ref, ts);
        cb_.push_null();
        cb_.store(Kind::Ref, th);
        spawn_one([&, c] { cb_.push_int(c); }, task_names[static_cast<std::size_t>(c)], ts, th);
      }
      for (int c = 0; c < n_fixed; ++c) join_one(s_.base_workers + n_fixed + c);
      for (int c = 0; c < n_fixed; ++c) merge_one(task_names[static_cast<std::size_t>(c)], s_.base_workers + c);
    } else {
      const std::string& cls = task_names[0];
      auto counted = [&](const std::function<void()>& body) {
        Label loop = cb_.new_label(), done = cb_.new_label();
        cb_.push_int(0);
        cb_.store(Kind::Int, s_.c);
        cb_.bind(loop);
        cb_.load(Kind::Int, s_.c);
        cb_.load(Kind::Int, s_.n);
        cb_.branch(Opcode::if_icmpge, done);
        body();
        cb_.iinc(s_.c, 1);
        cb_.jump(loop);
        cb_.bind(done);
      };
      counted([&] { spawn_one([&] { cb_.load(Kind::Int, s_.c); }, cls, s_.task, s_.thread); });
      counted([&] {
        cb_.load(Kind::Ref, s_.threads);
        cb_.load(Kind::Int, s_.c);
        cb_.op(Opcode::aaload);
        cb_.store(Kind::Ref, s_.thread);
        join_one(s_.thread);
      });
      if (!layout.reductions.empty()) {
        counted([&] {
          cb_.load(Kind::Ref, s_.tasks);
          cb_.load(Kind::Int, s_.c);
          cb_.op(Opcode::aaload);
          cb_.store(Kind::Ref, s_.task);
          merge_one(cls, s_.task);
        });
      }
    }

    cb_.bind(skip);
    cb_.load(Kind::Int, s_.init);
    cb_.load(Kind::Int, s_.trip);
    cb_.push_int(step);
    cb_.op(Opcode::imul);
    cb_.op(Opcode::iadd);
    cb_.store(Kind::Int, h.ivar);
  }

 private:
  /// trip = number of iterations for the values in the init/bound slots.
  void trip_count(Rel rel, int step) {
    Label zero = cb_.new_label(), done = cb_.new_label();
    bool up = rel == Rel::Lt || rel == Rel::Le;
    int hi = up ? s_.bound : s_.init, lo = up ? s_.init : s_.bound;
    bool strict = rel == Rel::Lt || rel == Rel::Gt;
    cb_.load(Kind::Int, hi);
    cb_.load(Kind::Int, lo);
    cb_.branch(strict ? Opcode::if_icmple : Opcode::if_icmplt, zero);
    cb_.load(Kind::Int, hi);
    cb_.load(Kind::Int, lo);
    cb_.op(Opcode::isub);
    if (strict) {
      cb_.push_int(1);
      cb_.op(Opcode::isub);
    }
    cb_.push_int(step < 0 ? -step : step);
    cb_.op(Opcode::idiv);
    cb_.push_int(1);
    cb_.op(Opcode::iadd);
    cb_.store(Kind::Int, s_.trip);
    cb_.jump(done);
    cb_.bind(zero);
    cb_.push_int(0);
    cb_.store(Kind::Int, s_.trip);
    cb_.bind(done);
  }

  CodeBuilder& cb_;
  const CodegenOptions& opts_;
  DriverSlots s_;
};

bool needs_newer_version(const ClassModel& m) {
  for (const auto& e : m.pool.entries()) {
    switch (e.tag) {
      case CpTag::MethodHandle: case CpTag::MethodType: case CpTag::Dynamic:
      case CpTag::InvokeDynamic: case CpTag::Module: case CpTag::Package:
        return true;
      default: break;
    }
  }
  return false;
}

std::string describe_merge(const std::vector<Reduction>& reds) {
  std::string out;
  for (const auto& r : reds) {
    if (!out.empty()) out += "; ";
    out += r.lvalue() + " " + std::string(reduction_op_name(r.op)) +
           (r.array ? "= private copies element-wise" : "= private partials") + ", worker order";
  }
  return out;
}

}  // namespace

std::map<std::string, std::vector<std::uint8_t>> ParallelVariant::emit() const {
  std::map<std::string, std::vector<std::uint8_t>> out;
  out[driver.name()] = emit_class(driver);
  for (const auto& t : tasks) out[t.name()] = emit_class(t);
  return out;
}

ParallelVariant parallelize(const ClassModel& model, const std::string& method, const std::string& desc,
                            const std::vector<NestPlan>& plans, const CodegenOptions& opts) {
  if (opts.n_workers < 1) throw IllegalTransform("need at least one worker");
  if (needs_newer_version(model))
    throw IllegalTransform("class uses constant-pool entries that cannot be emitted at version 49");
  ParallelVariant v;
  v.driver = model;
  v.method = method;
  v.descriptor = desc;
  v.serial_name = method + "$serial";
  v.plans = plans;
  v.n_workers = opts.n_workers;
  v.runtime_workers = opts.runtime_workers;
  v.strategy = opts.strategy;
  ClassModel& d = v.driver;
  d.major_version = kRewriteMajorVersion;
  d.minor_version = 0;

  MethodEntry* m = d.find_method(method, desc);
  if (!m || !m->code) throw NoSuchMethod(model.name() + "." + method + desc);
  if (d.find_method(v.serial_name, desc)) throw IllegalTransform(method + " is already parallelized");
  if (!m->code->exception_table.empty()) throw CaptureFailure("method has exception handlers");
  const std::vector<Instr> code = m->code->instrs;
  MethodEntry serial = *m;
  serial.name_index = d.pool.add_utf8(v.serial_name);

  int base = std::max<int>(m->code->max_locals, compute_max_locals(code, desc, m->is_static()));
  struct Region {
    const NestPlan* plan;
    const NormalizedLoop* par;
    TaskLayout layout;
    std::vector<std::string> names;
  };
  std::vector<Region> regions;
  int task_index = opts.first_task_index;
  std::string owner = model.name();
  for (const auto& p : plans) {
    if (!p.candidate.certified) throw IllegalTransform("candidate " + p.candidate.describe() + " is not certified");
    const NormalizedLoop* par = find_loop(*p.nest, p.candidate.parallel_level);
    if (!par) throw IllegalTransform("parallel level " + std::to_string(p.candidate.parallel_level) + " not found");
    for (const auto& r : p.candidate.reductions) {
      std::string t = int_like(r.type);
      if (t != "I" && t != "J" && t != "F" && t != "D")
        throw UnsupportedReduction("reduction over type " + r.type);
      if ((t == "F" || t == "D") && (r.op == ReductionOp::Add || r.op == ReductionOp::Mul))
        v.warnings.push_back("floating-point reduction on " + r.lvalue() + " is reassociated");
    }
    check_private_access(model, *par);
    base = std::max(base, max_slot(*p.nest));
    Region reg{&p, par, layout_for(*par, p.candidate.reductions), {}};
    int count = opts.runtime_workers ? 1 : opts.n_workers;
    for (int k = 0; k < count; ++k) reg.names.push_back(owner + "$JPTask" + std::to_string(task_index++));
    for (const auto& name : reg.names) v.tasks.push_back(build_task(name, reg.layout));
    if (v.captures.empty())
      for (const auto& c : reg.layout.captures) v.captures.push_back(c.slot);
    if (v.merge.empty()) v.merge = describe_merge(p.candidate.reductions);
    regions.push_back(std::move(reg));
  }
  std::sort(regions.begin(), regions.end(),
            [](const Region& a, const Region& b) { return a.plan->nest->init_offset < b.plan->nest->init_offset; });
  for (std::size_t i = 1; i < regions.size(); ++i)
    if (regions[i].plan->nest->init_offset < regions[i - 1].plan->nest->region_end)
      throw IllegalTransform("overlapping nests");

  for (const auto& in : code) {
    if (!is_branch(in.op)) continue;
    for (const auto& r : regions) {
      auto b = r.plan->nest->init_offset, e = r.plan->nest->region_end;
      bool inside = in.offset >= b && in.offset < e;
      auto t = static_cast<std::uint32_t>(in.target);
      if (!inside && t > b && t < e) throw CaptureFailure("branch at " + std::to_string(in.offset) + " enters the loop region");
    }
  }

  CodeBuilder cb(d.pool);
  std::map<std::int32_t, Label> labels;
  auto label = [&](std::int32_t off) {
    auto it = labels.find(off);
    if (it == labels.end()) it = labels.emplace(off, cb.new_label()).first;
    return it->second;
  };
  DriverSlots slots(base);
  std::size_t ri = 0;
  for (std::size_t i = 0; i < code.size();) {
    const Instr& in = code[i];
    cb.bind(label(static_cast<std::int32_t>(in.offset)));
    if (ri < regions.size() && in.offset == regions[ri].plan->nest->init_offset) {
      const Region& r = regions[ri++];
      IrCompiler comp(cb);
      SpawnEmitter spawn(cb, opts, slots);
      comp.loop_hook = [&](const NormalizedLoop& l, const Resolver&) {
        if (&l != r.par) return false;
        spawn.emit(l, r.layout, r.names);
        return true;
      };
      comp.loop(*r.plan->nest, [&](std::int32_t off) { return label(off); });
      while (i < code.size() && code[i].offset < r.plan->nest->region_end) ++i;
      continue;
    }
    if (is_branch(in.op) && in.op != Opcode::tableswitch && in.op != Opcode::lookupswitch) {
      cb.branch(in.op, label(in.target));
    } else {
      cb.raw(in);
    }
    ++i;
  }
  set_code(*m, cb.finish());
  d.methods.push_back(std::move(serial));

  std::uint16_t smt = 0;
  for (std::uint16_t i = 1; i < d.pool.count(); ++i) {
    if (!d.pool.valid(i)) continue;
    const auto& e = d.pool.at(i);
    if (e.tag == CpTag::Utf8 && e.utf8 == "StackMapTable") smt = i;
  }
  if (smt)
    for (auto& me : d.methods)
      if (me.code) std::erase_if(me.code->attributes, [&](const Attribute& a) { return a.name_index == smt; });
  return v;
}

ParallelVariant parallelize_ip(const ClassModel& model, const std::string& method, const std::string& desc,
                               const NestPlan& plan, const CodegenOptions& opts) {
  if (plan.candidate.parallel_verdict != Verdict::IP) throw IllegalTransform("level is not IP");
  return parallelize(model, method, desc, {plan}, opts);
}

ParallelVariant parallelize_dp(const ClassModel& model, const std::string& method, const std::string& desc,
                               const NestPlan& plan, const CodegenOptions& opts) {
  if (plan.candidate.parallel_verdict != Verdict::DP) throw IllegalTransform("level is not DP");
  if (plan.candidate.reductions.empty()) throw UnsupportedReduction("no recognized reduction");
  return parallelize(model, method, desc, {plan}, opts);
}

}  // namespace bcpar
