#include "bcpar/interp.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "bcpar/error.hpp"
#include "bcpar/semantics.hpp"

namespace bcpar {

// ---------------------------------------------------------------- heap

Value Heap::new_array(const std::string& type, std::int32_t length) {
  ArrayObject a;
  a.type = type;
  a.elem = descriptor_elem_kind(std::string_view(type).substr(1));
  a.data.assign(static_cast<std::size_t>(length), Value::zero_of(elem_stack_kind(a.elem)));
  objects_.emplace_back(std::move(a));
  return Value::of_ref(static_cast<std::uint32_t>(objects_.size()));
}

Value Heap::new_multi_array(const std::string& type, std::span<const std::int32_t> dims) {
  Value outer = new_array(type, dims[0]);
  if (dims.size() > 1) {
    auto sub = type.substr(1);
    for (std::int32_t i = 0; i < dims[0]; ++i) {
      Value inner = new_multi_array(sub, dims.subspan(1));
      array(outer)->data[static_cast<std::size_t>(i)] = inner;
    }
  }
  return outer;
}

Value Heap::new_instance(const std::string& class_name) {
  InstanceObject o;
  o.class_name = class_name;
  objects_.emplace_back(std::move(o));
  return Value::of_ref(static_cast<std::uint32_t>(objects_.size()));
}

ArrayObject* Heap::array(Value ref) {
  if (!valid(ref)) return nullptr;
  return std::get_if<ArrayObject>(&objects_[ref.ref() - 1]);
}

const ArrayObject* Heap::array(Value ref) const {
  if (!valid(ref)) return nullptr;
  return std::get_if<ArrayObject>(&objects_[ref.ref() - 1]);
}

InstanceObject* Heap::instance(Value ref) {
  if (!valid(ref)) return nullptr;
  return std::get_if<InstanceObject>(&objects_[ref.ref() - 1]);
}

const InstanceObject* Heap::instance(Value ref) const {
  if (!valid(ref)) return nullptr;
  return std::get_if<InstanceObject>(&objects_[ref.ref() - 1]);
}

// ---------------------------------------------------------------- class path

void ClassPath::add(std::shared_ptr<const ClassModel> model) {
  auto name = model->name();
  classes_[name] = std::move(model);
}

void ClassPath::add_ref(const ClassModel& model) {
  classes_[model.name()] = std::shared_ptr<const ClassModel>(&model, [](const ClassModel*) {});
}

const ClassModel* ClassPath::find(std::string_view name) const {
  auto it = classes_.find(name);
  return it == classes_.end() ? nullptr : it->second.get();
}

std::vector<std::string> ClassPath::names() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : classes_) out.push_back(k);
  return out;
}

std::string_view trap_name(TrapKind k) {
  switch (k) {
    case TrapKind::None: return "None";
    case TrapKind::ArrayIndexOutOfBounds: return "ArrayIndexOutOfBounds";
    case TrapKind::NullPointer: return "NullPointer";
    case TrapKind::Arithmetic: return "Arithmetic";
    case TrapKind::NegativeArraySize: return "NegativeArraySize";
    case TrapKind::StepBudgetExceeded: return "StepBudgetExceeded";
    case TrapKind::Unsupported: return "Unsupported";
    case TrapKind::Linkage: return "Linkage";
    case TrapKind::StackOverflow: return "StackOverflow";
  }
  return "?";
}

std::uint64_t StepProfile::total() const {
  std::uint64_t t = driver_steps;
  for (const auto& b : batches)
    for (auto s : b.task_steps) t += s;
  return t;
}

std::uint64_t StepProfile::max_task_sum() const {
  std::uint64_t t = 0;
  for (const auto& b : batches) {
    if (!b.task_steps.empty()) t += *std::max_element(b.task_steps.begin(), b.task_steps.end());
  }
  return t;
}

std::size_t StepProfile::task_count() const {
  std::size_t n = 0;
  for (const auto& b : batches) n += b.task_steps.size();
  return n;
}

// ---------------------------------------------------------------- interpreter

namespace {

struct MethodInfo {
  const ClassModel* cls = nullptr;
  const MethodEntry* method = nullptr;
  const std::vector<Instr>* code = nullptr;
  std::vector<std::int32_t> index_of;
  std::size_t max_locals = 0;
  std::string owner, name, desc;
};

struct Frame {
  const MethodInfo* mi = nullptr;
  std::vector<Value> locals;
  std::vector<Value> stack;
  std::size_t pc = 0;
};

struct ThreadCtx {
  std::vector<Frame> frames;
  std::uint64_t steps = 0;
  bool done = false;
  std::optional<Value> ret;
  int task_index = -1;
};

enum class Intrinsic {
  None,
  ObjectInit,
  ThreadInit,
  ThreadStart,
  ThreadJoin,
  RuntimeGet,
  RuntimeProcessors,
  Math,
};

struct Site {
  MemberRef m;
  Kind field_kind = Kind::Void;
  int arg_slots = 0;
  Kind ret = Kind::Void;
  std::vector<Kind> params;
  Intrinsic intrinsic = Intrinsic::None;
};

std::string newarray_type(int atype) {
  switch (atype) {
    case 4: return "[Z";
    case 5: return "[C";
    case 6: return "[F";
    case 7: return "[D";
    case 8: return "[B";
    case 9: return "[S";
    case 10: return "[I";
    case 11: return "[J";
    default: return "[I";
  }
}

}  // namespace

struct Interpreter::Impl {
  const ClassPath& cp;
  Heap& heap;
  ExecConfig cfg;
  Schedule sched;

  std::map<const MethodEntry*, std::unique_ptr<MethodInfo>> infos;
  std::unordered_map<const Instr*, Site> sites;
  std::vector<std::unique_ptr<ThreadCtx>> threads;
  std::map<std::uint32_t, int> thread_of_obj;
  std::vector<int> pending;
  std::set<std::string> initialized;
  Trap trap;
  std::uint64_t total_steps = 0;
  StepProfile profile;
  std::vector<std::string> trace;
  int started_tasks = 0;
  ThreadCtx* current = nullptr;
  std::mt19937_64 rng;
  Value runtime_obj = Value::null();

  Impl(const ClassPath& c, Heap& h, ExecConfig conf, Schedule s)
      : cp(c), heap(h), cfg(conf), sched(std::move(s)), rng(sched.seed) {}

  void fail(TrapKind k, std::string detail) {
    if (trap) return;
    trap.kind = k;
    trap.detail = std::move(detail);
    trap.task = current ? current->task_index : -1;
  }

  const MethodInfo* info_for(const ClassModel* cls, const MethodEntry* m) {
    auto& slot = infos[m];
    if (!slot) {
      auto mi = std::make_unique<MethodInfo>();
      mi->cls = cls;
      mi->method = m;
      mi->code = &m->code->instrs;
      mi->owner = cls->name();
      mi->name = cls->method_name(*m);
      mi->desc = cls->method_descriptor(*m);
      std::uint32_t len = 0;
      if (!mi->code->empty()) len = mi->code->back().offset + mi->code->back().size();
      mi->index_of.assign(len + 1, -1);
      for (std::size_t i = 0; i < mi->code->size(); ++i)
        mi->index_of[(*mi->code)[i].offset] = static_cast<std::int32_t>(i);
      mi->max_locals = m->code->max_locals;
      if (m->code->modified)
        mi->max_locals = std::max<std::size_t>(mi->max_locals,
                                               static_cast<std::size_t>(compute_max_locals(*mi->code, mi->desc, m->is_static())));
      slot = std::move(mi);
    }
    return slot.get();
  }

  const MethodInfo* resolve(std::string_view cls_name, std::string_view name, std::string_view desc) {
    std::string cur(cls_name);
    for (int guard = 0; guard < 64 && !cur.empty(); ++guard) {
      const ClassModel* cls = cp.find(cur);
      if (!cls) return nullptr;
      if (const MethodEntry* m = cls->find_method(name, desc)) {
        if (!m->code) return nullptr;
        return info_for(cls, m);
      }
      cur = cls->super_name();
    }
    return nullptr;
  }

  void ensure_initialized(const std::string& cls_name) {
    if (!initialized.insert(cls_name).second) return;
    const ClassModel* cls = cp.find(cls_name);
    if (!cls) return;
    const MethodEntry* clinit = cls->find_method("<clinit>", "()V");
    if (!clinit || !clinit->code) return;
    ThreadCtx t;
    t.task_index = current ? current->task_index : -1;
    Frame f;
    f.mi = info_for(cls, clinit);
    f.locals.assign(f.mi->max_locals, Value::top());
    t.frames.push_back(std::move(f));
    ThreadCtx* saved = current;
    current = &t;
    run(t, UINT64_MAX);
    current = saved;
    if (saved) saved->steps += t.steps;
  }

  Site& site(const Instr& in, const MethodInfo* mi) {
    auto it = sites.find(&in);
    if (it != sites.end()) return it->second;
    Site s;
    s.m = mi->cls->pool.member_ref(static_cast<std::uint16_t>(in.a));
    if (in.op == Opcode::getfield || in.op == Opcode::putfield || in.op == Opcode::getstatic ||
        in.op == Opcode::putstatic) {
      s.field_kind = descriptor_kind(s.m.descriptor);
    } else {
      auto sig = parse_method_descriptor(s.m.descriptor);
      for (const auto& p : sig.params) {
        s.params.push_back(descriptor_kind(p));
        s.arg_slots += slot_width(s.params.back());
      }
      s.ret = sig.ret == "V" ? Kind::Void : descriptor_kind(sig.ret);
      const auto& o = s.m.owner;
      const auto& n = s.m.name;
      if (o == "java/lang/Object" && n == "<init>") s.intrinsic = Intrinsic::ObjectInit;
      else if (o == "java/lang/Thread" && n == "<init>" && s.m.descriptor == "(Ljava/lang/Runnable;)V") s.intrinsic = Intrinsic::ThreadInit;
      else if (o == "java/lang/Thread" && n == "start") s.intrinsic = Intrinsic::ThreadStart;
      else if (o == "java/lang/Thread" && n == "join" && s.m.descriptor == "()V") s.intrinsic = Intrinsic::ThreadJoin;
      else if (o == "java/lang/Runtime" && n == "getRuntime") s.intrinsic = Intrinsic::RuntimeGet;
      else if (o == "java/lang/Runtime" && n == "availableProcessors") s.intrinsic = Intrinsic::RuntimeProcessors;
      else if (o == "java/lang/Math" || o == "java/lang/StrictMath") s.intrinsic = Intrinsic::Math;
    }
    return sites.emplace(&in, std::move(s)).first->second;
  }

  // --- stack helpers
  static void push(Frame& f, Value v) {
    f.stack.push_back(v);
    if (v.wide()) f.stack.push_back(Value::top());
  }
  static Value pop1(Frame& f) {
    Value v = f.stack.back();
    f.stack.pop_back();
    return v;
  }
  static Value pop(Frame& f) {
    Value v = pop1(f);
    if (v.tag == Value::Tag::Top) v = pop1(f);
    return v;
  }

  ArrayObject* array_or_trap(Value ref) {
    if (ref.ref() == 0) {
      fail(TrapKind::NullPointer, "array reference is null");
      return nullptr;
    }
    ArrayObject* a = heap.array(ref);
    if (!a) fail(TrapKind::Unsupported, "not an array");
    return a;
  }

  bool math_intrinsic(Frame& f, const Site& s) {
    std::vector<Value> args(s.params.size());
    for (std::size_t i = args.size(); i-- > 0;) args[i] = pop(f);
    auto r = eval_math(s.m.name, s.m.descriptor, args);
    if (!r) return false;
    push(f, *r);
    return true;
  }

  void start_thread(Value thread_obj) {
    InstanceObject* t = heap.instance(thread_obj);
    if (!t) {
      fail(TrapKind::NullPointer, "Thread.start on null");
      return;
    }
    if (thread_of_obj.count(thread_obj.ref())) {
      fail(TrapKind::Unsupported, "thread started twice");
      return;
    }
    Value target = t->fields.count("target") ? t->fields["target"] : Value::null();
    InstanceObject* r = heap.instance(target);
    if (!r) {
      fail(TrapKind::NullPointer, "thread without Runnable target");
      return;
    }
    const MethodInfo* run_mi = resolve(r->class_name, "run", "()V");
    if (!run_mi) {
      fail(TrapKind::Linkage, r->class_name + ".run()V not found");
      return;
    }
    auto ctx = std::make_unique<ThreadCtx>();
    ctx->task_index = started_tasks++;
    Frame fr;
    fr.mi = run_mi;
    fr.locals.assign(run_mi->max_locals, Value::top());
    fr.locals[0] = target;
    ctx->frames.push_back(std::move(fr));
    thread_of_obj[thread_obj.ref()] = static_cast<int>(threads.size());
    pending.push_back(static_cast<int>(threads.size()));
    threads.push_back(std::move(ctx));
  }

  void run_batch() {
    std::vector<int> batch;
    batch.swap(pending);
    if (batch.empty()) return;
    std::vector<int> order;
    for (int p : sched.permutation) {
      if (p >= 0 && p < static_cast<int>(batch.size()) &&
          std::find(order.begin(), order.end(), p) == order.end())
        order.push_back(p);
    }
    for (int i = 0; i < static_cast<int>(batch.size()); ++i) {
      if (std::find(order.begin(), order.end(), i) == order.end()) order.push_back(i);
    }
    ThreadCtx* saved = current;
    if (sched.mode == Schedule::Mode::RunToCompletion) {
      for (int idx : order) {
        ThreadCtx& t = *threads[static_cast<std::size_t>(batch[static_cast<std::size_t>(idx)])];
        current = &t;
        run(t, UINT64_MAX);
        if (trap) break;
      }
    } else {
      std::vector<int> live = order;
      while (!live.empty() && !trap) {
        std::uniform_int_distribution<std::size_t> pick(0, live.size() - 1);
        std::uniform_int_distribution<int> q(1, std::max(1, sched.max_quantum));
        std::size_t k = pick(rng);
        ThreadCtx& t = *threads[static_cast<std::size_t>(batch[static_cast<std::size_t>(live[k])])];
        current = &t;
        run(t, static_cast<std::uint64_t>(q(rng)));
        if (t.done) live.erase(live.begin() + static_cast<long>(k));
      }
    }
    current = saved;
    BatchProfile bp;
    for (int id : batch) bp.task_steps.push_back(threads[static_cast<std::size_t>(id)]->steps);
    profile.batches.push_back(std::move(bp));
  }

  void join_thread(Value thread_obj) {
    if (thread_obj.ref() == 0) {
      fail(TrapKind::NullPointer, "Thread.join on null");
      return;
    }
    auto it = thread_of_obj.find(thread_obj.ref());
    if (it == thread_of_obj.end()) return;  // never started
    ThreadCtx& t = *threads[static_cast<std::size_t>(it->second)];
    if (t.done) return;
    if (std::find(pending.begin(), pending.end(), it->second) != pending.end()) {
      run_batch();
    } else {
      // joined from inside its own batch under interleaving: finish it now
      ThreadCtx* saved = current;
      current = &t;
      run(t, UINT64_MAX);
      current = saved;
    }
  }

  void enter(ThreadCtx& t, const MethodInfo* mi, int arg_slots_with_receiver) {
    if (t.frames.size() >= cfg.max_frames) {
      fail(TrapKind::StackOverflow, "call depth limit");
      return;
    }
    Frame callee;
    callee.mi = mi;
    callee.locals.assign(std::max<std::size_t>(mi->max_locals, static_cast<std::size_t>(arg_slots_with_receiver)),
                         Value::top());
    Frame& caller = t.frames.back();
    auto n = static_cast<std::size_t>(arg_slots_with_receiver);
    std::copy(caller.stack.end() - static_cast<long>(n), caller.stack.end(), callee.locals.begin());
    caller.stack.resize(caller.stack.size() - n);
    t.frames.push_back(std::move(callee));
  }

  void do_return(ThreadCtx& t, std::optional<Value> v) {
    t.frames.pop_back();
    if (t.frames.empty()) {
      t.done = true;
      t.ret = v;
      return;
    }
    if (v) push(t.frames.back(), *v);
  }

  void invoke(ThreadCtx& t, const Instr& in) {
    Frame& f = t.frames.back();
    Site& s = site(in, f.mi);
    int recv = in.op == Opcode::invokestatic ? 0 : 1;
    int total = s.arg_slots + recv;
    if (static_cast<int>(f.stack.size()) < total) {
      fail(TrapKind::Unsupported, "operand stack underflow at call");
      return;
    }
    Value receiver = recv ? f.stack[f.stack.size() - static_cast<std::size_t>(total)] : Value::null();
    if (recv && receiver.ref() == 0) {
      fail(TrapKind::NullPointer, "call of " + s.m.name + " on null");
      return;
    }
    const MethodInfo* target = nullptr;
    if (in.op == Opcode::invokestatic) {
      ensure_initialized(s.m.owner);
      if (trap) return;
      target = resolve(s.m.owner, s.m.name, s.m.descriptor);
    } else if (in.op == Opcode::invokevirtual) {
      if (const InstanceObject* o = heap.instance(receiver)) target = resolve(o->class_name, s.m.name, s.m.descriptor);
    } else {
      target = resolve(s.m.owner, s.m.name, s.m.descriptor);
    }
    f.pc++;
    if (target) {
      enter(t, target, total);
      return;
    }
    switch (s.intrinsic) {
      case Intrinsic::ObjectInit:
        pop(f);
        return;
      case Intrinsic::ThreadInit: {
        Value r = pop(f);
        Value th = pop(f);
        heap.instance(th)->fields["target"] = r;
        return;
      }
      case Intrinsic::ThreadStart:
        start_thread(pop(f));
        return;
      case Intrinsic::ThreadJoin: {
        Value th = pop(f);
        join_thread(th);
        return;
      }
      case Intrinsic::RuntimeGet:
        if (runtime_obj.ref() == 0) runtime_obj = heap.new_instance("java/lang/Runtime");
        push(f, runtime_obj);
        return;
      case Intrinsic::RuntimeProcessors:
        pop(f);
        push(f, Value::of_int(cfg.available_processors));
        return;
      case Intrinsic::Math:
        if (math_intrinsic(f, s)) return;
        break;
      case Intrinsic::None:
        break;
    }
    fail(TrapKind::Linkage, "cannot resolve " + s.m.owner + "." + s.m.name + s.m.descriptor);
  }

  void exec(ThreadCtx& t, const Instr& in);

  void run(ThreadCtx& t, std::uint64_t slice) {
    while (!t.frames.empty() && !trap && slice > 0) {
      --slice;
      Frame& f = t.frames.back();
      if (f.pc >= f.mi->code->size()) {
        fail(TrapKind::Unsupported, "fell off the end of " + f.mi->name);
        return;
      }
      const Instr& in = (*f.mi->code)[f.pc];
      if (++total_steps > cfg.step_budget) {
        fail(TrapKind::StepBudgetExceeded, "step budget " + std::to_string(cfg.step_budget) + " exhausted");
        return;
      }
      ++t.steps;
      if (trace.size() < cfg.trace_limit) {
        trace.push_back((t.task_index >= 0 ? "task" + std::to_string(t.task_index) + " " : std::string()) +
                        f.mi->owner + "." + f.mi->name + "@" + std::to_string(in.offset) + " " +
                        std::string(opcode_info(in.op).name));
      }
      exec(t, in);
    }
  }
};

void Interpreter::Impl::exec(ThreadCtx& t, const Instr& in) {
  using O = Opcode;
  Frame& f = t.frames.back();
  auto jump = [&](std::int32_t target) {
    std::int32_t idx = (target >= 0 && static_cast<std::size_t>(target) < f.mi->index_of.size())
                           ? f.mi->index_of[static_cast<std::size_t>(target)]
                           : -1;
    if (idx < 0) {
      fail(TrapKind::Unsupported, "branch to non-instruction offset");
      return;
    }
    f.pc = static_cast<std::size_t>(idx);
  };

  if (auto k = load_kind(in.op)) {
    int slot = *in.local_slot();
    push(f, f.locals[static_cast<std::size_t>(slot)]);
    f.pc++;
    return;
  }
  if (auto k = store_kind(in.op)) {
    int slot = *in.local_slot();
    store_local(f.locals, slot, pop(f));
    f.pc++;
    return;
  }
  if (auto e = array_load_kind(in.op)) {
    std::int32_t idx = pop(f).i();
    ArrayObject* a = array_or_trap(pop(f));
    if (!a) return;
    if (idx < 0 || static_cast<std::size_t>(idx) >= a->data.size()) {
      fail(TrapKind::ArrayIndexOutOfBounds, "index " + std::to_string(idx) + " length " + std::to_string(a->data.size()));
      return;
    }
    push(f, a->data[static_cast<std::size_t>(idx)]);
    f.pc++;
    return;
  }
  if (auto e = array_store_kind(in.op)) {
    Value v = pop(f);
    std::int32_t idx = pop(f).i();
    ArrayObject* a = array_or_trap(pop(f));
    if (!a) return;
    if (idx < 0 || static_cast<std::size_t>(idx) >= a->data.size()) {
      fail(TrapKind::ArrayIndexOutOfBounds, "index " + std::to_string(idx) + " length " + std::to_string(a->data.size()));
      return;
    }
    a->data[static_cast<std::size_t>(idx)] = narrow_for_store(a->elem, v);
    f.pc++;
    return;
  }
  if (is_binary_arith(in.op)) {
    Value b = pop(f), a = pop(f);
    ArithFault fault;
    Value r = apply_binary(in.op, a, b, fault);
    if (fault != ArithFault::None) {
      fail(TrapKind::Arithmetic, "/ by zero");
      return;
    }
    push(f, r);
    f.pc++;
    return;
  }
  if (is_unary_arith(in.op)) {
    push(f, apply_unary(in.op, pop(f)));
    f.pc++;
    return;
  }
  if (is_compare(in.op)) {
    Value b = pop(f), a = pop(f);
    push(f, apply_compare(in.op, a, b));
    f.pc++;
    return;
  }
  if (is_conditional_branch(in.op)) {
    Value b, a;
    if (in.op >= O::if_icmpeq && in.op <= O::if_acmpne) {
      b = pop(f);
      a = pop(f);
    } else {
      a = pop(f);
    }
    if (branch_taken(in.op, a, b)) jump(in.target);
    else f.pc++;
    return;
  }

  switch (in.op) {
    case O::nop: break;
    case O::aconst_null: push(f, Value::null()); break;
    case O::iconst_m1: case O::iconst_0: case O::iconst_1: case O::iconst_2:
    case O::iconst_3: case O::iconst_4: case O::iconst_5:
      push(f, Value::of_int(static_cast<int>(in.op) - static_cast<int>(O::iconst_0)));
      break;
    case O::lconst_0: case O::lconst_1:
      push(f, Value::of_long(static_cast<int>(in.op) - static_cast<int>(O::lconst_0)));
      break;
    case O::fconst_0: case O::fconst_1: case O::fconst_2:
      push(f, Value::of_float(static_cast<float>(static_cast<int>(in.op) - static_cast<int>(O::fconst_0))));
      break;
    case O::dconst_0: case O::dconst_1:
      push(f, Value::of_double(static_cast<int>(in.op) - static_cast<int>(O::dconst_0)));
      break;
    case O::bipush: case O::sipush: push(f, Value::of_int(in.a)); break;
    case O::ldc: case O::ldc_w: case O::ldc2_w: {
      const auto& e = f.mi->cls->pool.at(static_cast<std::uint16_t>(in.a));
      switch (e.tag) {
        case CpTag::Integer: push(f, Value::of_int(static_cast<std::int32_t>(e.bits))); break;
        case CpTag::Float: push(f, Value{Value::Tag::Float, e.bits & 0xffffffffu}); break;
        case CpTag::Long: push(f, Value{Value::Tag::Long, e.bits}); break;
        case CpTag::Double: push(f, Value{Value::Tag::Double, e.bits}); break;
        default:
          fail(TrapKind::Unsupported, "ldc of " + std::string(cp_tag_name(e.tag)));
          return;
      }
      break;
    }
    case O::iinc: {
      auto& slot = f.locals[static_cast<std::size_t>(in.a)];
      slot = Value::of_int(static_cast<std::int32_t>(static_cast<std::uint32_t>(slot.i()) + static_cast<std::uint32_t>(in.b)));
      break;
    }
    case O::pop: f.stack.pop_back(); break;
    case O::pop2: f.stack.pop_back(); f.stack.pop_back(); break;
    case O::dup: f.stack.push_back(f.stack.back()); break;
    case O::dup_x1: {
      Value v1 = pop1(f), v2 = pop1(f);
      f.stack.insert(f.stack.end(), {v1, v2, v1});
      break;
    }
    case O::dup_x2: {
      Value v1 = pop1(f), v2 = pop1(f), v3 = pop1(f);
      f.stack.insert(f.stack.end(), {v1, v3, v2, v1});
      break;
    }
    case O::dup2: {
      Value v1 = pop1(f), v2 = pop1(f);
      f.stack.insert(f.stack.end(), {v2, v1, v2, v1});
      break;
    }
    case O::dup2_x1: {
      Value v1 = pop1(f), v2 = pop1(f), v3 = pop1(f);
      f.stack.insert(f.stack.end(), {v2, v1, v3, v2, v1});
      break;
    }
    case O::dup2_x2: {
      Value v1 = pop1(f), v2 = pop1(f), v3 = pop1(f), v4 = pop1(f);
      f.stack.insert(f.stack.end(), {v2, v1, v4, v3, v2, v1});
      break;
    }
    case O::swap: {
      Value v1 = pop1(f), v2 = pop1(f);
      f.stack.insert(f.stack.end(), {v1, v2});
      break;
    }
    case O::goto_:
      jump(in.target);
      return;
    case O::ireturn: case O::lreturn: case O::freturn: case O::dreturn: case O::areturn:
      do_return(t, pop(f));
      return;
    case O::return_:
      do_return(t, std::nullopt);
      return;
    case O::arraylength: {
      ArrayObject* a = array_or_trap(pop(f));
      if (!a) return;
      push(f, Value::of_int(static_cast<std::int32_t>(a->data.size())));
      break;
    }
    case O::getstatic: case O::putstatic: {
      Site& s = site(in, f.mi);
      ensure_initialized(s.m.owner);
      if (trap) return;
      auto key = s.m.owner + "." + s.m.name;
      auto& statics = heap.statics();
      if (in.op == O::getstatic) {
        auto it = statics.find(key);
        push(f, it == statics.end() ? Value::zero_of(s.field_kind) : it->second);
      } else {
        statics[key] = pop(f);
      }
      break;
    }
    case O::getfield: {
      Site& s = site(in, f.mi);
      Value ref = pop(f);
      InstanceObject* o = heap.instance(ref);
      if (!o) {
        fail(TrapKind::NullPointer, "getfield " + s.m.name + " on null");
        return;
      }
      auto it = o->fields.find(s.m.name);
      push(f, it == o->fields.end() ? Value::zero_of(s.field_kind) : it->second);
      break;
    }
    case O::putfield: {
      Site& s = site(in, f.mi);
      Value v = pop(f);
      Value ref = pop(f);
      InstanceObject* o = heap.instance(ref);
      if (!o) {
        fail(TrapKind::NullPointer, "putfield " + s.m.name + " on null");
        return;
      }
      o->fields[s.m.name] = v;
      break;
    }
    case O::invokevirtual: case O::invokespecial: case O::invokestatic:
      invoke(t, in);
      return;
    case O::new_: {
      auto cls = f.mi->cls->pool.class_name(static_cast<std::uint16_t>(in.a));
      ensure_initialized(cls);
      if (trap) return;
      push(f, heap.new_instance(cls));
      break;
    }
    case O::newarray: case O::anewarray: {
      std::int32_t len = pop(f).i();
      if (len < 0) {
        fail(TrapKind::NegativeArraySize, std::to_string(len));
        return;
      }
      std::string type;
      if (in.op == O::newarray) {
        type = newarray_type(in.a);
      } else {
        auto cls = f.mi->cls->pool.class_name(static_cast<std::uint16_t>(in.a));
        type = cls[0] == '[' ? "[" + cls : "[L" + cls + ";";
      }
      push(f, heap.new_array(type, len));
      break;
    }
    case O::multianewarray: {
      std::vector<std::int32_t> dims(static_cast<std::size_t>(in.b));
      for (std::size_t i = dims.size(); i-- > 0;) dims[i] = pop(f).i();
      for (auto d : dims) {
        if (d < 0) {
          fail(TrapKind::NegativeArraySize, std::to_string(d));
          return;
        }
      }
      push(f, heap.new_multi_array(f.mi->cls->pool.class_name(static_cast<std::uint16_t>(in.a)), dims));
      break;
    }
    default:
      fail(TrapKind::Unsupported, std::string(opcode_info(in.op).name));
      return;
  }
  f.pc++;
}

Interpreter::Interpreter(const ClassPath& classes, Heap& heap, ExecConfig config, Schedule schedule)
    : impl_(std::make_unique<Impl>(classes, heap, config, std::move(schedule))) {}

Interpreter::~Interpreter() = default;

ExecResult Interpreter::invoke(std::string_view owner, std::string_view name, std::string_view desc,
                               const std::vector<Value>& args) {
  Impl& im = *impl_;
  ExecResult r;
  const ClassModel* cls = im.cp.find(owner);
  if (!cls) throw NoSuchMethod(std::string(owner) + " not on class path");
  const MethodEntry* m = cls->find_method(name, desc);
  if (!m) throw NoSuchMethod(std::string(owner) + "." + std::string(name) + std::string(desc));
  if (!m->code) throw AbstractMethod(std::string(name) + " has no code");
  const MethodInfo* mi = im.info_for(cls, m);

  auto main = std::make_unique<ThreadCtx>();
  Frame fr;
  fr.mi = mi;
  fr.locals.assign(mi->max_locals, Value::top());
  int slot = 0;
  for (const auto& v : args) {
    store_local(fr.locals, slot, v);
    slot += v.wide() ? 2 : 1;
  }
  main->frames.push_back(std::move(fr));
  ThreadCtx* mp = main.get();
  im.threads.push_back(std::move(main));
  im.current = mp;
  im.ensure_initialized(std::string(owner));
  im.run(*mp, UINT64_MAX);
  // threads started but never joined still run, as the JVM would before exit
  while (!im.trap && !im.pending.empty()) im.run_batch();
  im.current = nullptr;

  r.trap = im.trap;
  r.ret = mp->ret;
  r.steps = im.total_steps;
  im.profile.driver_steps = mp->steps;
  r.profile = im.profile;
  r.trace = im.trace;
  return r;
}

ExecResult exec_method(const ClassPath& classes, std::string_view owner, std::string_view name,
                       std::string_view desc, const std::vector<Value>& args, Heap& heap,
                       const ExecConfig& config, const Schedule& schedule) {
  Interpreter in(classes, heap, config, schedule);
  return in.invoke(owner, name, desc, args);
}

}  // namespace bcpar
