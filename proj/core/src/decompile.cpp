#include "bcpar/decompile.hpp"

#include <algorithm>

#include "bcpar/assembler.hpp"
#include "bcpar/error.hpp"
#include "bcpar/semantics.hpp"

namespace bcpar {

namespace {

int width_of(const ExprPtr& e) { return slot_width(e->kind_of()); }

std::string at(const Instr& in) { return " at offset " + std::to_string(in.offset); }

std::string array_desc_for(const std::string& elem) {
  return "[" + elem;
}

std::string newarray_desc(int atype) {
  switch (newarray_elem_kind(atype)) {
    case ElemKind::Int: return "[I";
    case ElemKind::Long: return "[J";
    case ElemKind::Float: return "[F";
    case ElemKind::Double: return "[D";
    case ElemKind::Byte: return atype == 4 ? "[Z" : "[B";
    case ElemKind::Char: return "[C";
    case ElemKind::Short: return "[S";
    case ElemKind::Ref: break;
  }
  return "[Ljava/lang/Object;";
}

std::string elem_from_array_op(ElemKind e, const ExprPtr& array) {
  if (array->type.size() > 1 && array->type[0] == '[') return array->type.substr(1);
  switch (e) {
    case ElemKind::Int: return "I";
    case ElemKind::Long: return "J";
    case ElemKind::Float: return "F";
    case ElemKind::Double: return "D";
    case ElemKind::Byte: return "B";
    case ElemKind::Char: return "C";
    case ElemKind::Short: return "S";
    case ElemKind::Ref: return "Ljava/lang/Object;";
  }
  return "I";
}

}  // namespace

int StackState::depth_slots() const {
  int d = 0;
  for (const auto& e : entries) d += width_of(e);
  return d;
}

Decompiler::Decompiler(DecompileContext ctx) : ctx_(std::move(ctx)) {
  auto sig = parse_method_descriptor(ctx_.descriptor);
  int slot = 0;
  if (!ctx_.is_static) slot_types_[slot++] = "L" + ctx_.owner + ";";
  for (const auto& p : sig.params) {
    slot_types_[slot] = p;
    slot += slot_width(descriptor_kind(p));
  }
}

void Decompiler::add_branch_target(std::int32_t offset) { targets_.push_back(offset); }

ExprPtr Decompiler::pop() {
  if (stack_.entries.empty()) throw StackUnderflow("operand stack empty");
  auto e = stack_.entries.back();
  stack_.entries.pop_back();
  return e;
}

void Decompiler::push(ExprPtr e) { stack_.entries.push_back(std::move(e)); }

std::vector<ExprPtr> Decompiler::pop_slots(int slots) {
  std::vector<ExprPtr> out;
  int got = 0;
  while (got < slots) {
    auto e = pop();
    got += width_of(e);
    out.insert(out.begin(), e);
  }
  if (got != slots) throw UnsupportedOpcode("stack manipulation splits a long/double value");
  return out;
}

void Decompiler::require_empty(const Instr& in, const char* what) const {
  if (!stack_.entries.empty())
    throw NonEmptyStackAtBoundary(std::string(what) + " with " + std::to_string(stack_.entries.size()) +
                                  " live stack value(s)" + at(in));
}

std::string Decompiler::local_type(int slot, Kind k) const {
  if (k == Kind::Ref) {
    auto it = slot_types_.find(slot);
    if (it != slot_types_.end() && descriptor_kind(it->second) == Kind::Ref) return it->second;
    return "Ljava/lang/Object;";
  }
  return std::string(1, kind_char(k));
}

ExprPtr Decompiler::constant_from_pool(int index) const {
  const auto& e = ctx_.pool->at(static_cast<std::uint16_t>(index));
  switch (e.tag) {
    case CpTag::Integer: return make_const(Value::of_int(static_cast<std::int32_t>(e.bits)), "I");
    case CpTag::Float: return make_const(Value{Value::Tag::Float, e.bits & 0xffffffffu}, "F");
    case CpTag::Long: return make_const(Value{Value::Tag::Long, e.bits}, "J");
    case CpTag::Double: return make_const(Value{Value::Tag::Double, e.bits}, "D");
    default: break;
  }
  throw UnsupportedOpcode("ldc of " + std::string(cp_tag_name(e.tag)) + " constant");
}

Stmt Decompiler::make(StmtKind kind, const Instr& in) {
  Stmt s;
  s.kind = kind;
  s.first = span_first_.value_or(in.offset);
  s.last = in.offset;
  s.end = in.offset + in.size();
  span_first_.reset();
  return s;
}

std::optional<Stmt> Decompiler::step(const Instr& in) {
  using O = Opcode;
  const auto& info = opcode_info(in.op);
  if (!info.supported) throw UnsupportedOpcode(std::string(info.name) + at(in));
  if (std::find(targets_.begin(), targets_.end(), static_cast<std::int32_t>(in.offset)) != targets_.end())
    require_empty(in, "branch target");
  if (!span_first_) span_first_ = in.offset;

  if (auto k = load_kind(in.op)) {
    int slot = *in.local_slot();
    push(make_local(slot, local_type(slot, *k)));
    return std::nullopt;
  }
  if (auto k = store_kind(in.op)) {
    int slot = *in.local_slot();
    auto v = pop();
    require_empty(in, "store");
    if (*k == Kind::Ref) slot_types_[slot] = v->type;
    else slot_types_[slot] = std::string(1, kind_char(*k));
    Stmt s = make(StmtKind::Assign, in);
    s.target = make_local(slot, *k == Kind::Ref ? v->type : std::string(1, kind_char(*k)));
    s.value = std::move(v);
    return s;
  }
  if (auto e = array_load_kind(in.op)) {
    auto index = pop();
    auto array = pop();
    push(make_array_elem(array, index, elem_from_array_op(*e, array)));
    return std::nullopt;
  }
  if (auto e = array_store_kind(in.op)) {
    auto v = pop();
    auto index = pop();
    auto array = pop();
    require_empty(in, "array store");
    Stmt s = make(StmtKind::ArrayStore, in);
    s.target = make_array_elem(array, index, elem_from_array_op(*e, array));
    s.value = std::move(v);
    return s;
  }
  if (is_binary_arith(in.op)) {
    auto r = pop();
    auto l = pop();
    push(make_binary(in.op, l, r));
    return std::nullopt;
  }
  if (is_unary_arith(in.op)) {
    push(make_unary(in.op, pop()));
    return std::nullopt;
  }
  if (is_compare(in.op)) {
    auto r = pop();
    auto l = pop();
    auto c = std::make_shared<Expr>();
    c->kind = ExprKind::Compare;
    c->op = in.op;
    c->type = "I";
    c->args = {l, r};
    push(c);
    return std::nullopt;
  }
  if (is_conditional_branch(in.op)) {
    ExprPtr l, r;
    bool two = (in.op >= O::if_icmpeq && in.op <= O::if_acmpne);
    if (two) {
      r = pop();
      l = pop();
    } else {
      l = pop();
      r = (in.op == O::ifnull || in.op == O::ifnonnull) ? make_const(Value::null(), "Ljava/lang/Object;")
                                                         : make_int(0);
    }
    require_empty(in, "conditional branch");
    Stmt s = make(StmtKind::CondBranch, in);
    s.op = in.op;
    s.value = l;
    s.rhs = r;
    s.branch_target = in.target;
    return s;
  }

  switch (in.op) {
    case O::nop:
      return std::nullopt;
    case O::aconst_null:
      push(make_const(Value::null(), "Ljava/lang/Object;"));
      return std::nullopt;
    case O::iconst_m1: case O::iconst_0: case O::iconst_1: case O::iconst_2:
    case O::iconst_3: case O::iconst_4: case O::iconst_5:
      push(make_int(static_cast<int>(in.op) - static_cast<int>(O::iconst_0)));
      return std::nullopt;
    case O::lconst_0: case O::lconst_1:
      push(make_const(Value::of_long(static_cast<int>(in.op) - static_cast<int>(O::lconst_0)), "J"));
      return std::nullopt;
    case O::fconst_0: case O::fconst_1: case O::fconst_2:
      push(make_const(Value::of_float(static_cast<float>(static_cast<int>(in.op) - static_cast<int>(O::fconst_0))), "F"));
      return std::nullopt;
    case O::dconst_0: case O::dconst_1:
      push(make_const(Value::of_double(static_cast<int>(in.op) - static_cast<int>(O::dconst_0)), "D"));
      return std::nullopt;
    case O::bipush: case O::sipush:
      push(make_int(in.a));
      return std::nullopt;
    case O::ldc: case O::ldc_w: case O::ldc2_w:
      push(constant_from_pool(in.a));
      return std::nullopt;
    case O::iinc: {
      require_empty(in, "iinc");
      Stmt s = make(StmtKind::Inc, in);
      s.slot = in.a;
      s.delta = in.b;
      return s;
    }
    case O::pop: case O::pop2: {
      auto vals = pop_slots(in.op == O::pop ? 1 : 2);
      require_empty(in, "discarded value");
      Stmt s = make(StmtKind::CallStmt, in);
      s.value = vals.back();
      if (vals.size() > 1) {
        // two discarded category-1 values: keep both evaluations in order
        s.value = vals[0];
        s.rhs = vals[1];
      }
      return s;
    }
    case O::dup: case O::dup_x1: case O::dup_x2: case O::dup2: case O::dup2_x1: case O::dup2_x2: {
      int n = (in.op == O::dup || in.op == O::dup_x1 || in.op == O::dup_x2) ? 1 : 2;
      int skip = 0;
      if (in.op == O::dup_x1 || in.op == O::dup2_x1) skip = 1;
      if (in.op == O::dup_x2 || in.op == O::dup2_x2) skip = 2;
      auto top = pop_slots(n);
      auto below = pop_slots(skip);
      for (auto& e : top) push(e);
      for (auto& e : below) push(e);
      for (auto& e : top) push(e);
      return std::nullopt;
    }
    case O::swap: {
      auto a = pop_slots(1);
      auto b = pop_slots(1);
      push(a[0]);
      push(b[0]);
      return std::nullopt;
    }
    case O::goto_: {
      require_empty(in, "goto");
      Stmt s = make(StmtKind::Goto, in);
      s.op = in.op;
      s.branch_target = in.target;
      return s;
    }
    case O::ireturn: case O::lreturn: case O::freturn: case O::dreturn: case O::areturn: case O::return_: {
      ExprPtr v;
      if (in.op != O::return_) v = pop();
      require_empty(in, "return");
      Stmt s = make(StmtKind::Return, in);
      s.op = in.op;
      s.value = v;
      return s;
    }
    case O::arraylength:
      push(make_array_length(pop()));
      return std::nullopt;
    case O::getstatic: case O::getfield: {
      auto m = ctx_.pool->member_ref(static_cast<std::uint16_t>(in.a));
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::Field;
      e->type = m.descriptor;
      e->member = m;
      if (in.op == O::getfield) e->args = {pop()};
      push(e);
      return std::nullopt;
    }
    case O::putstatic: case O::putfield: {
      auto m = ctx_.pool->member_ref(static_cast<std::uint16_t>(in.a));
      auto v = pop();
      auto f = std::make_shared<Expr>();
      f->kind = ExprKind::Field;
      f->type = m.descriptor;
      f->member = m;
      if (in.op == O::putfield) f->args = {pop()};
      require_empty(in, "field store");
      Stmt s = make(StmtKind::FieldStore, in);
      s.target = f;
      s.value = v;
      return s;
    }
    case O::invokevirtual: case O::invokespecial: case O::invokestatic: {
      auto m = ctx_.pool->member_ref(static_cast<std::uint16_t>(in.a));
      auto sig = parse_method_descriptor(m.descriptor);
      std::vector<ExprPtr> args(sig.params.size());
      for (std::size_t i = sig.params.size(); i-- > 0;) args[i] = pop();
      if (in.op == O::invokespecial && m.name == "<init>") {
        auto recv = pop();
        if (recv->kind == ExprKind::NewObject) {
          auto c = std::make_shared<Expr>();
          c->kind = ExprKind::Construct;
          c->type = recv->type;
          c->member = m;
          c->args = args;
          bool kept = false;
          for (auto& e : stack_.entries) {
            if (e == recv) {
              e = c;
              kept = true;
            }
          }
          if (kept) return std::nullopt;
          require_empty(in, "constructor call");
          Stmt s = make(StmtKind::CallStmt, in);
          s.value = c;
          return s;
        }
        args.insert(args.begin(), recv);
      } else if (in.op != O::invokestatic) {
        args.insert(args.begin(), pop());
      }
      auto call = make_call(in.op, m, std::move(args));
      if (sig.ret == "V") {
        require_empty(in, "void call");
        Stmt s = make(StmtKind::CallStmt, in);
        s.value = call;
        return s;
      }
      push(call);
      return std::nullopt;
    }
    case O::new_: {
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::NewObject;
      e->member.owner = ctx_.pool->class_name(static_cast<std::uint16_t>(in.a));
      e->type = "L" + e->member.owner + ";";
      push(e);
      return std::nullopt;
    }
    case O::newarray: case O::anewarray: {
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::NewArray;
      if (in.op == O::newarray) {
        e->type = newarray_desc(in.a);
      } else {
        auto cls = ctx_.pool->class_name(static_cast<std::uint16_t>(in.a));
        e->type = cls[0] == '[' ? array_desc_for(cls) : "[L" + cls + ";";
      }
      e->args = {pop()};
      push(e);
      return std::nullopt;
    }
    case O::multianewarray: {
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::MultiNewArray;
      e->type = ctx_.pool->class_name(static_cast<std::uint16_t>(in.a));
      e->args.resize(static_cast<std::size_t>(in.b));
      for (std::size_t i = e->args.size(); i-- > 0;) e->args[i] = pop();
      push(e);
      return std::nullopt;
    }
    default:
      break;
  }
  throw UnsupportedOpcode(std::string(info.name) + at(in));
}

std::vector<Stmt> decompile_method(const std::vector<Instr>& code, const DecompileContext& ctx) {
  Decompiler d(ctx);
  for (const auto& in : code) {
    if (is_branch(in.op)) d.add_branch_target(in.target);
  }
  std::vector<Stmt> out;
  for (const auto& in : code) {
    if (auto s = d.step(in)) out.push_back(std::move(*s));
  }
  if (!d.state().entries.empty())
    throw NonEmptyStackAtBoundary("code ends with a live operand stack");
  if (!code.empty()) {
    std::uint32_t end = code.back().offset + code.back().size();
    if (out.empty() || out.back().end != end) {
      // trailing nops
      if (out.empty()) throw UnsupportedOpcode("method body without statements");
      out.back().last = code.back().offset;
      out.back().end = end;
    }
  }
  return out;
}

std::vector<Stmt> decompile_method(const ClassModel& model, const MethodEntry& method) {
  if (!method.code) throw AbstractMethod(model.method_name(method) + " has no code");
  DecompileContext ctx;
  ctx.pool = &model.pool;
  ctx.owner = model.name();
  ctx.descriptor = model.method_descriptor(method);
  ctx.is_static = method.is_static();
  return decompile_method(method.code->instrs, ctx);
}

int stmt_at(const std::vector<Stmt>& stmts, std::int32_t offset) {
  auto it = std::upper_bound(stmts.begin(), stmts.end(), offset,
                             [](std::int32_t off, const Stmt& s) { return off < static_cast<std::int32_t>(s.first); });
  if (it == stmts.begin()) return -1;
  --it;
  if (offset >= static_cast<std::int32_t>(it->end)) return -1;
  return static_cast<int>(it - stmts.begin());
}

}  // namespace bcpar
