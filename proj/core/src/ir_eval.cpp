#include "bcpar/ir_eval.hpp"

#include <unordered_map>

#include "bcpar/decompile.hpp"
#include "bcpar/semantics.hpp"

namespace bcpar {

namespace {

struct Evaluator {
  Heap& heap;
  const ClassPath& classes;
  const IrEvalOptions& opt;
  std::vector<Value>& locals;
  Trap trap{};
  int stmt = 0;
  std::unordered_map<const Expr*, Value> memo{};

  void fail(TrapKind k, std::string d) {
    if (!trap) {
      trap.kind = k;
      trap.detail = std::move(d);
    }
  }

  void read(const Location& l, Value v) {
    if (opt.on_read) opt.on_read(stmt, l, v);
  }
  void wrote(const Location& l, Value v) {
    if (opt.on_write) opt.on_write(stmt, l, v);
  }

  ArrayObject* array_at(Value ref, std::int32_t idx) {
    if (ref.ref() == 0) {
      fail(TrapKind::NullPointer, "array reference is null");
      return nullptr;
    }
    ArrayObject* a = heap.array(ref);
    if (!a) {
      fail(TrapKind::Unsupported, "not an array");
      return nullptr;
    }
    if (idx < 0 || static_cast<std::size_t>(idx) >= a->data.size()) {
      fail(TrapKind::ArrayIndexOutOfBounds, "index " + std::to_string(idx) + " length " + std::to_string(a->data.size()));
      return nullptr;
    }
    return a;
  }

  Value call_bytecode(const std::string& owner, const std::string& name, const std::string& desc,
                      const std::vector<Value>& args) {
    Interpreter in(classes, heap, opt.exec);
    auto r = in.invoke(owner, name, desc, args);
    if (r.trap) {
      trap = r.trap;
      return Value::top();
    }
    return r.ret.value_or(Value::top());
  }

  Value eval(const ExprPtr& e) {
    if (trap) return Value::top();
    auto it = memo.find(e.get());
    if (it != memo.end()) return it->second;
    Value v = compute(*e);
    memo.emplace(e.get(), v);
    return v;
  }

  Value compute(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Const:
        return e.constant;
      case ExprKind::Local: {
        Value v = locals[static_cast<std::size_t>(e.slot)];
        read(Location::local(e.slot), v);
        return v;
      }
      case ExprKind::ArrayElem: {
        Value ref = eval(e.args[0]);
        Value idx = eval(e.args[1]);
        if (trap) return Value::top();
        ArrayObject* a = array_at(ref, idx.i());
        if (!a) return Value::top();
        Value v = a->data[static_cast<std::size_t>(idx.i())];
        read(Location::element(ref.ref(), idx.i()), v);
        return v;
      }
      case ExprKind::ArrayLength: {
        Value ref = eval(e.args[0]);
        if (trap) return Value::top();
        if (ref.ref() == 0) {
          fail(TrapKind::NullPointer, "arraylength of null");
          return Value::top();
        }
        return Value::of_int(static_cast<std::int32_t>(heap.array(ref)->data.size()));
      }
      case ExprKind::Field: {
        if (e.args.empty()) {
          auto key = e.member.owner + "." + e.member.name;
          auto& st = heap.statics();
          auto f = st.find(key);
          Value v = f == st.end() ? Value::zero_of(e.kind_of()) : f->second;
          read(Location::static_field(key), v);
          return v;
        }
        Value ref = eval(e.args[0]);
        if (trap) return Value::top();
        InstanceObject* o = heap.instance(ref);
        if (!o) {
          fail(TrapKind::NullPointer, "getfield on null");
          return Value::top();
        }
        auto f = o->fields.find(e.member.name);
        Value v = f == o->fields.end() ? Value::zero_of(e.kind_of()) : f->second;
        read(Location::field(ref.ref(), e.member.name), v);
        return v;
      }
      case ExprKind::Binary: {
        Value a = eval(e.args[0]);
        Value b = eval(e.args[1]);
        if (trap) return Value::top();
        ArithFault fault;
        Value r = apply_binary(e.op, a, b, fault);
        if (fault != ArithFault::None) fail(TrapKind::Arithmetic, "/ by zero");
        return r;
      }
      case ExprKind::Unary:
        return apply_unary(e.op, eval(e.args[0]));
      case ExprKind::Compare: {
        Value a = eval(e.args[0]);
        Value b = eval(e.args[1]);
        return apply_compare(e.op, a, b);
      }
      case ExprKind::Call: {
        std::vector<Value> args;
        for (const auto& a : e.args) args.push_back(eval(a));
        if (trap) return Value::top();
        if (e.op == Opcode::invokestatic && !classes.find(e.member.owner)) {
          auto r = eval_math(e.member.name, e.member.descriptor, args);
          if (!r) {
            fail(TrapKind::Linkage, "cannot resolve " + e.member.owner + "." + e.member.name);
            return Value::top();
          }
          return *r;
        }
        if (e.op != Opcode::invokestatic && args[0].ref() == 0) {
          fail(TrapKind::NullPointer, "call on null");
          return Value::top();
        }
        std::string owner = e.member.owner;
        if (e.op == Opcode::invokevirtual) {
          if (const InstanceObject* o = heap.instance(args[0])) owner = o->class_name;
        }
        return call_bytecode(owner, e.member.name, e.member.descriptor, args);
      }
      case ExprKind::NewArray: {
        Value len = eval(e.args[0]);
        if (trap) return Value::top();
        if (len.i() < 0) {
          fail(TrapKind::NegativeArraySize, std::to_string(len.i()));
          return Value::top();
        }
        return heap.new_array(e.type, len.i());
      }
      case ExprKind::MultiNewArray: {
        std::vector<std::int32_t> dims;
        for (const auto& a : e.args) dims.push_back(eval(a).i());
        if (trap) return Value::top();
        for (auto d : dims) {
          if (d < 0) {
            fail(TrapKind::NegativeArraySize, std::to_string(d));
            return Value::top();
          }
        }
        return heap.new_multi_array(e.type, dims);
      }
      case ExprKind::NewObject:
        fail(TrapKind::Unsupported, "uninitialized object escapes");
        return Value::top();
      case ExprKind::Construct: {
        std::vector<Value> args;
        for (const auto& a : e.args) args.push_back(eval(a));
        if (trap) return Value::top();
        Value obj = heap.new_instance(e.member.owner);
        if (e.member.owner != "java/lang/Object") {
          args.insert(args.begin(), obj);
          call_bytecode(e.member.owner, "<init>", e.member.descriptor, args);
        }
        return obj;
      }
    }
    return Value::top();
  }
};

}  // namespace

IrEvalResult eval_ir(const std::vector<Stmt>& stmts, std::vector<Value> locals, Heap& heap,
                     const ClassPath& classes, const IrEvalOptions& options) {
  IrEvalResult res;
  Evaluator ev{heap, classes, options, locals, {}, 0, {}};
  std::size_t pc = 0;
  auto jump = [&](std::int32_t target) -> bool {
    int idx = stmt_at(stmts, target);
    if (idx < 0) {
      ev.fail(TrapKind::Unsupported, "branch target " + std::to_string(target) + " outside statements");
      return false;
    }
    pc = static_cast<std::size_t>(idx);
    return true;
  };
  while (pc < stmts.size() && !ev.trap) {
    if (++res.statements > options.statement_budget) {
      ev.fail(TrapKind::StepBudgetExceeded, "statement budget exhausted");
      break;
    }
    const Stmt& s = stmts[pc];
    ev.stmt = static_cast<int>(pc);
    ev.memo.clear();
    std::size_t next = pc + 1;
    switch (s.kind) {
      case StmtKind::Assign: {
        Value v = ev.eval(s.value);
        if (ev.trap) break;
        store_local(locals, s.target->slot, v);
        ev.wrote(Location::local(s.target->slot), v);
        break;
      }
      case StmtKind::ArrayStore: {
        Value ref = ev.eval(s.target->args[0]);
        Value idx = ev.eval(s.target->args[1]);
        Value v = ev.eval(s.value);
        if (ev.trap) break;
        ArrayObject* a = ev.array_at(ref, idx.i());
        if (!a) break;
        a->data[static_cast<std::size_t>(idx.i())] = narrow_for_store(a->elem, v);
        ev.wrote(Location::element(ref.ref(), idx.i()), v);
        break;
      }
      case StmtKind::FieldStore: {
        if (s.target->args.empty()) {
          Value v = ev.eval(s.value);
          if (ev.trap) break;
          auto key = s.target->member.owner + "." + s.target->member.name;
          heap.statics()[key] = v;
          ev.wrote(Location::static_field(key), v);
          break;
        }
        Value ref = ev.eval(s.target->args[0]);
        Value v = ev.eval(s.value);
        if (ev.trap) break;
        InstanceObject* o = heap.instance(ref);
        if (!o) {
          ev.fail(TrapKind::NullPointer, "putfield on null");
          break;
        }
        o->fields[s.target->member.name] = v;
        ev.wrote(Location::field(ref.ref(), s.target->member.name), v);
        break;
      }
      case StmtKind::CallStmt:
        ev.eval(s.value);
        if (s.rhs) ev.eval(s.rhs);
        break;
      case StmtKind::CondBranch: {
        Value a = ev.eval(s.value);
        Value b = ev.eval(s.rhs);
        if (ev.trap) break;
        if (branch_taken(s.op, a, b)) {
          if (!jump(s.branch_target)) break;
          next = pc;
        }
        break;
      }
      case StmtKind::Goto:
        if (!jump(s.branch_target)) break;
        next = pc;
        break;
      case StmtKind::Return:
        if (s.value) res.ret = ev.eval(s.value);
        next = stmts.size();
        break;
      case StmtKind::Inc: {
        Value& slot = locals[static_cast<std::size_t>(s.slot)];
        ev.read(Location::local(s.slot), slot);
        slot = Value::of_int(static_cast<std::int32_t>(static_cast<std::uint32_t>(slot.i()) + static_cast<std::uint32_t>(s.delta)));
        ev.wrote(Location::local(s.slot), slot);
        break;
      }
    }
    pc = next;
  }
  res.trap = ev.trap;
  res.locals = std::move(locals);
  return res;
}

}  // namespace bcpar
