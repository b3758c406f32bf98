#include "bcpar/ir_compile.hpp"

#include <algorithm>
#include <map>

#include "bcpar/error.hpp"

namespace bcpar {

Opcode loop_branch_op(Rel rel) {
  switch (rel) {
    case Rel::Lt: return Opcode::if_icmplt;
    case Rel::Le: return Opcode::if_icmple;
    case Rel::Gt: return Opcode::if_icmpgt;
    case Rel::Ge: return Opcode::if_icmpge;
  }
  return Opcode::if_icmplt;
}

namespace {

bool one_operand_branch(Opcode op) {
  auto v = static_cast<int>(op);
  return (v >= 0x99 && v <= 0x9e) || op == Opcode::ifnull || op == Opcode::ifnonnull;
}

std::string class_of_ref(const std::string& desc) {
  if (desc.size() > 2 && desc[0] == 'L') return desc.substr(1, desc.size() - 2);
  return desc;  // array descriptors name themselves
}

bool side_effects(const Expr& x) {
  if (x.kind == ExprKind::Call || x.kind == ExprKind::NewArray || x.kind == ExprKind::MultiNewArray ||
      x.kind == ExprKind::Construct || x.kind == ExprKind::NewObject)
    return true;
  return std::any_of(x.args.begin(), x.args.end(), [](const ExprPtr& a) { return side_effects(*a); });
}

/// Nodes reachable more than once from the statement's expressions.
void count_nodes(const ExprPtr& e, std::map<const Expr*, int>& seen) {
  if (!e) return;
  if (seen[e.get()]++ > 0) return;
  for (const auto& a : e->args) count_nodes(a, seen);
}

}  // namespace

void IrCompiler::expr(const ExprPtr& e) {
  CodeBuilder& cb = *cb_;
  switch (e->kind) {
    case ExprKind::Const:
      switch (e->constant.tag) {
        case Value::Tag::Int: cb.push_int(e->constant.i()); break;
        case Value::Tag::Long: cb.push_long(e->constant.l()); break;
        case Value::Tag::Float: cb.push_float(e->constant.f()); break;
        case Value::Tag::Double: cb.push_double(e->constant.d()); break;
        case Value::Tag::Ref:
          if (e->constant.ref() != 0) throw UnsupportedOpcode("reference constant other than null");
          cb.push_null();
          break;
        default: throw InconsistentModel("constant without a value");
      }
      return;
    case ExprKind::Local:
      cb.load(descriptor_kind(e->type), e->slot);
      return;
    case ExprKind::ArrayElem:
      expr(e->args[0]);
      expr(e->args[1]);
      cb.array_load(descriptor_elem_kind(e->type));
      return;
    case ExprKind::ArrayLength:
      expr(e->args[0]);
      cb.op(Opcode::arraylength);
      return;
    case ExprKind::Field:
      if (e->args.empty()) {
        cb.field(Opcode::getstatic, e->member.owner, e->member.name, e->member.descriptor);
      } else {
        expr(e->args[0]);
        cb.field(Opcode::getfield, e->member.owner, e->member.name, e->member.descriptor);
      }
      return;
    case ExprKind::Binary:
    case ExprKind::Compare:
      expr(e->args[0]);
      expr(e->args[1]);
      cb.op(e->op);
      return;
    case ExprKind::Unary:
      expr(e->args[0]);
      cb.op(e->op);
      return;
    case ExprKind::Call:
      for (const auto& a : e->args) expr(a);
      cb.invoke(e->op, e->member.owner, e->member.name, e->member.descriptor);
      return;
    case ExprKind::NewArray: {
      expr(e->args[0]);
      std::string elem = element_type(e->type);
      ElemKind k = descriptor_elem_kind(elem);
      cb.new_array(k, k == ElemKind::Ref ? class_of_ref(elem) : std::string());
      return;
    }
    case ExprKind::MultiNewArray:
      for (const auto& a : e->args) expr(a);
      cb.multi_new_array(e->type, static_cast<int>(e->args.size()));
      return;
    case ExprKind::Construct:
      cb.new_object(e->member.owner);
      cb.op(Opcode::dup);
      for (const auto& a : e->args) expr(a);
      cb.invoke(Opcode::invokespecial, e->member.owner, "<init>", e->member.descriptor);
      return;
    case ExprKind::NewObject:
      throw InconsistentModel("uninitialized object outside a constructor call");
  }
}

void IrCompiler::stmt(const Stmt& s, const Resolver& resolve) {
  CodeBuilder& cb = *cb_;
  // shared subtrees are evaluated twice unless they match the compound
  // pattern below; that is only safe for side-effect-free nodes
  std::map<const Expr*, int> seen;
  for (const auto& e : stmt_exprs(s)) count_nodes(e, seen);
  auto compound_array = [&] {
    return s.kind == StmtKind::ArrayStore && s.value->kind == ExprKind::Binary &&
           s.value->args[0]->kind == ExprKind::ArrayElem && s.value->args[0]->args[0] == s.target->args[0] &&
           s.value->args[0]->args[1] == s.target->args[1];
  };
  auto compound_field = [&] {
    return s.kind == StmtKind::FieldStore && !s.target->args.empty() && s.value->kind == ExprKind::Binary &&
           s.value->args[0]->kind == ExprKind::Field && !s.value->args[0]->args.empty() &&
           s.value->args[0]->args[0] == s.target->args[0] && s.value->args[0]->member == s.target->member;
  };
  bool compound = compound_array() || compound_field();
  for (const auto& [node, n] : seen) {
    if (n < 2) continue;
    bool covered = compound && (node == s.target->args[0].get() ||
                                (s.kind == StmtKind::ArrayStore && node == s.target->args[1].get()));
    if (!covered && side_effects(*node))
      throw InconsistentModel("shared subexpression with side effects in `" + to_string(s) + "`");
  }

  switch (s.kind) {
    case StmtKind::Assign:
      expr(s.value);
      cb.store(descriptor_kind(s.target->type), s.target->slot);
      return;
    case StmtKind::ArrayStore: {
      ElemKind ek = descriptor_elem_kind(s.target->type);
      expr(s.target->args[0]);
      expr(s.target->args[1]);
      if (compound_array()) {
        cb.op(Opcode::dup2);
        cb.array_load(ek);
        expr(s.value->args[1]);
        cb.op(s.value->op);
      } else {
        expr(s.value);
      }
      cb.array_store(ek);
      return;
    }
    case StmtKind::FieldStore: {
      const auto& m = s.target->member;
      if (s.target->args.empty()) {
        expr(s.value);
        cb.field(Opcode::putstatic, m.owner, m.name, m.descriptor);
        return;
      }
      expr(s.target->args[0]);
      if (compound_field()) {
        cb.op(Opcode::dup);
        cb.field(Opcode::getfield, m.owner, m.name, m.descriptor);
        expr(s.value->args[1]);
        cb.op(s.value->op);
      } else {
        expr(s.value);
      }
      cb.field(Opcode::putfield, m.owner, m.name, m.descriptor);
      return;
    }
    case StmtKind::CallStmt: {
      expr(s.value);
      Kind k = s.value->type == "V" ? Kind::Void : descriptor_kind(s.value->type);
      if (k != Kind::Void) cb.op(slot_width(k) == 2 ? Opcode::pop2 : Opcode::pop);
      return;
    }
    case StmtKind::CondBranch:
      expr(s.value);
      if (!one_operand_branch(s.op)) expr(s.rhs);
      cb.branch(s.op, resolve(s.branch_target));
      return;
    case StmtKind::Goto:
      cb.jump(resolve(s.branch_target));
      return;
    case StmtKind::Return:
      if (s.value) expr(s.value);
      cb.op(s.op);
      return;
    case StmtKind::Inc:
      cb.iinc(s.slot, s.delta);
      return;
  }
}

void IrCompiler::items(const std::vector<BodyItem>& list, const NormalizedLoop* owner, Label cont,
                       const Resolver& outer) {
  CodeBuilder& cb = *cb_;
  std::vector<std::pair<std::uint32_t, Label>> starts;
  for (const auto& it : list) {
    std::uint32_t first = it.is_loop() ? it.loop->init_offset : it.stmt.first;
    starts.emplace_back(first, cb.new_label());
  }
  std::uint32_t lo = owner ? owner->body_begin : 0;
  std::uint32_t hi = owner ? owner->body_end : 0;
  Resolver here = [&, owner](std::int32_t target) -> Label {
    if (owner) {
      if (std::find(owner->continue_targets.begin(), owner->continue_targets.end(), target) !=
          owner->continue_targets.end())
        return cont;
      auto t = static_cast<std::uint32_t>(target);
      if (t >= lo && t < hi && !starts.empty()) {
        auto it = std::upper_bound(starts.begin(), starts.end(), t,
                                   [](std::uint32_t v, const auto& p) { return v < p.first; });
        if (it != starts.begin()) return std::prev(it)->second;
      }
    }
    return outer(target);
  };
  for (std::size_t i = 0; i < list.size(); ++i) {
    cb.bind(starts[i].second);
    if (list[i].is_loop()) loop(*list[i].loop, here);
    else stmt(list[i].stmt, here);
  }
}

void IrCompiler::loop(const NormalizedLoop& l, const Resolver& outer) {
  if (loop_hook && loop_hook(l, outer)) return;
  CodeBuilder& cb = *cb_;
  const auto& h = l.header;
  Label body = cb.new_label(), cont = cb.new_label(), cond = cb.new_label();
  expr(h.init);
  cb.store(Kind::Int, h.ivar);
  cb.jump(cond);
  cb.bind(body);
  items(l.body, &l, cont, outer);
  cb.bind(cont);
  cb.iinc(h.ivar, h.step);
  cb.bind(cond);
  cb.load(Kind::Int, h.ivar);
  expr(h.bound);
  cb.branch(loop_branch_op(h.rel), body);
}

}  // namespace bcpar
