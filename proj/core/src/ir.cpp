#include "bcpar/ir.hpp"

#include <algorithm>
#include <sstream>

#include "bcpar/semantics.hpp"

namespace bcpar {

ExprPtr make_const(Value v, std::string type) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Const;
  e->constant = v;
  e->type = std::move(type);
  return e;
}

ExprPtr make_int(std::int32_t v) { return make_const(Value::of_int(v), "I"); }

ExprPtr make_local(int slot, std::string type) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Local;
  e->slot = slot;
  e->type = std::move(type);
  return e;
}

ExprPtr make_array_elem(ExprPtr array, ExprPtr index, std::string elem_type) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::ArrayElem;
  e->type = std::move(elem_type);
  e->args = {std::move(array), std::move(index)};
  return e;
}

ExprPtr make_array_length(ExprPtr array) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::ArrayLength;
  e->type = "I";
  e->args = {std::move(array)};
  return e;
}

ExprPtr make_binary(Opcode op, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Binary;
  e->op = op;
  e->type = std::string(1, kind_char(result_kind(op)));
  e->args = {std::move(lhs), std::move(rhs)};
  return e;
}

ExprPtr make_unary(Opcode op, ExprPtr x) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Unary;
  e->op = op;
  e->type = std::string(1, kind_char(result_kind(op)));
  e->args = {std::move(x)};
  return e;
}

ExprPtr make_call(Opcode op, MemberRef m, std::vector<ExprPtr> args) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Call;
  e->op = op;
  e->type = parse_method_descriptor(m.descriptor).ret;
  e->member = std::move(m);
  e->args = std::move(args);
  return e;
}

std::string element_type(const std::string& array_type) {
  if (array_type.size() < 2 || array_type[0] != '[') return "Ljava/lang/Object;";
  return array_type.substr(1);
}

std::string_view stmt_kind_name(StmtKind k) {
  switch (k) {
    case StmtKind::Assign: return "assign";
    case StmtKind::ArrayStore: return "array_store";
    case StmtKind::FieldStore: return "field_store";
    case StmtKind::CallStmt: return "call_stmt";
    case StmtKind::CondBranch: return "cond_branch";
    case StmtKind::Goto: return "goto";
    case StmtKind::Return: return "return_stmt";
    case StmtKind::Inc: return "inc";
  }
  return "?";
}

namespace {

std::string op_text(Opcode op) {
  // iadd -> add, i2d -> i2d, dcmpl -> dcmpl
  std::string n(opcode_info(op).name);
  if (is_binary_arith(op) || (static_cast<unsigned>(op) >= 0x74 && static_cast<unsigned>(op) <= 0x77))
    return n.substr(1);
  return n;
}

std::string cond_text(Opcode op) {
  switch (op) {
    case Opcode::ifeq: case Opcode::if_icmpeq: case Opcode::if_acmpeq: case Opcode::ifnull: return "eq";
    case Opcode::ifne: case Opcode::if_icmpne: case Opcode::if_acmpne: case Opcode::ifnonnull: return "ne";
    case Opcode::iflt: case Opcode::if_icmplt: return "lt";
    case Opcode::ifge: case Opcode::if_icmpge: return "ge";
    case Opcode::ifgt: case Opcode::if_icmpgt: return "gt";
    case Opcode::ifle: case Opcode::if_icmple: return "le";
    default: return "?";
  }
}

void write(std::ostream& os, const Expr& e) {
  auto args = [&](std::size_t from) {
    for (std::size_t i = from; i < e.args.size(); ++i) {
      if (i > from) os << ", ";
      write(os, *e.args[i]);
    }
  };
  switch (e.kind) {
    case ExprKind::Const:
      os << to_string(e.constant);
      break;
    case ExprKind::Local:
      os << "local" << e.slot;
      break;
    case ExprKind::ArrayElem:
      write(os, *e.args[0]);
      os << '[';
      write(os, *e.args[1]);
      os << ']';
      break;
    case ExprKind::ArrayLength:
      os << "length(";
      write(os, *e.args[0]);
      os << ')';
      break;
    case ExprKind::Field:
      if (e.args.empty()) {
        os << e.member.owner;
      } else {
        write(os, *e.args[0]);
      }
      os << '.' << e.member.name;
      break;
    case ExprKind::Binary:
    case ExprKind::Unary:
    case ExprKind::Compare:
      os << op_text(e.op) << '(';
      args(0);
      os << ')';
      break;
    case ExprKind::Call:
      if (e.op == Opcode::invokestatic) {
        os << e.member.owner << '.' << e.member.name << '(';
        args(0);
      } else {
        write(os, *e.args[0]);
        os << '.' << e.member.name << '(';
        args(1);
      }
      os << ')';
      break;
    case ExprKind::NewArray:
      os << "new " << e.type.substr(1) << '[';
      args(0);
      os << ']';
      break;
    case ExprKind::MultiNewArray:
      os << "new " << e.type << '(';
      args(0);
      os << ')';
      break;
    case ExprKind::NewObject:
      os << "new " << e.member.owner;
      break;
    case ExprKind::Construct:
      os << "new " << e.member.owner << '(';
      args(0);
      os << ')';
      break;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::ostringstream os;
  write(os, e);
  return os.str();
}

std::string to_string(const Stmt& s) {
  std::ostringstream os;
  switch (s.kind) {
    case StmtKind::Assign:
    case StmtKind::ArrayStore:
    case StmtKind::FieldStore:
      write(os, *s.target);
      os << " = ";
      write(os, *s.value);
      break;
    case StmtKind::CallStmt:
      write(os, *s.value);
      break;
    case StmtKind::CondBranch:
      os << "if " << cond_text(s.op) << '(';
      write(os, *s.value);
      os << ", ";
      write(os, *s.rhs);
      os << ") goto " << s.branch_target;
      break;
    case StmtKind::Goto:
      os << "goto " << s.branch_target;
      break;
    case StmtKind::Return:
      os << "return";
      if (s.value) {
        os << ' ';
        write(os, *s.value);
      }
      break;
    case StmtKind::Inc:
      os << "local" << s.slot << " += " << s.delta;
      break;
  }
  return os.str();
}

std::string dump_ir(const std::vector<Stmt>& stmts) {
  std::ostringstream os;
  for (const auto& s : stmts) os << s.first << '-' << s.last << ": " << to_string(s) << '\n';
  return os.str();
}

void visit(const ExprPtr& e, const std::function<void(const Expr&)>& fn) {
  if (!e) return;
  fn(*e);
  for (const auto& a : e->args) visit(a, fn);
}

std::vector<ExprPtr> stmt_exprs(const Stmt& s) {
  std::vector<ExprPtr> out;
  if (s.target) {
    for (const auto& a : s.target->args) out.push_back(a);
  }
  if (s.value) out.push_back(s.value);
  if (s.rhs) out.push_back(s.rhs);
  return out;
}

bool contains_call(const ExprPtr& e) {
  bool found = false;
  visit(e, [&](const Expr& x) {
    if (x.kind == ExprKind::Call || x.kind == ExprKind::Construct) found = true;
  });
  return found;
}

bool reads_local(const ExprPtr& e, int slot) {
  bool found = false;
  visit(e, [&](const Expr& x) {
    if (x.kind == ExprKind::Local && x.slot == slot) found = true;
  });
  return found;
}

std::vector<int> locals_read(const Stmt& s) {
  std::vector<int> out;
  for (const auto& e : stmt_exprs(s)) {
    visit(e, [&](const Expr& x) {
      if (x.kind == ExprKind::Local) out.push_back(x.slot);
    });
  }
  if (s.kind == StmtKind::Inc) out.push_back(s.slot);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int local_written(const Stmt& s) {
  if (s.kind == StmtKind::Assign) return s.target->slot;
  if (s.kind == StmtKind::Inc) return s.slot;
  return -1;
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind || a->type != b->type || a->op != b->op || a->slot != b->slot ||
      !(a->constant == b->constant) || !(a->member == b->member) || a->args.size() != b->args.size())
    return false;
  for (std::size_t i = 0; i < a->args.size(); ++i) {
    if (!structurally_equal(a->args[i], b->args[i])) return false;
  }
  return true;
}

}  // namespace bcpar
