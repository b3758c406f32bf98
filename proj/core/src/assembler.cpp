#include "bcpar/assembler.hpp"

#include <bit>

#include "bcpar/error.hpp"

namespace bcpar {

int newarray_type_code(ElemKind e) {
  switch (e) {
    case ElemKind::Byte: return 8;
    case ElemKind::Char: return 5;
    case ElemKind::Short: return 9;
    case ElemKind::Int: return 10;
    case ElemKind::Long: return 11;
    case ElemKind::Float: return 6;
    case ElemKind::Double: return 7;
    case ElemKind::Ref: break;
  }
  throw InconsistentModel("newarray cannot create reference arrays");
}

ElemKind newarray_elem_kind(int atype) {
  switch (atype) {
    case 4: case 8: return ElemKind::Byte;
    case 5: return ElemKind::Char;
    case 6: return ElemKind::Float;
    case 7: return ElemKind::Double;
    case 9: return ElemKind::Short;
    case 10: return ElemKind::Int;
    case 11: return ElemKind::Long;
    default: throw MalformedClassfile("bad newarray type " + std::to_string(atype));
  }
}

Label CodeBuilder::new_label() {
  label_at_.push_back(-1);
  return Label{static_cast<int>(label_at_.size() - 1)};
}

void CodeBuilder::bind(Label l) {
  if (!l.valid() || static_cast<std::size_t>(l.id) >= label_at_.size()) throw InconsistentModel("bind of unknown label");
  if (label_at_[l.id] >= 0) throw InconsistentModel("label bound twice");
  label_at_[l.id] = static_cast<long>(items_.size());
}

bool CodeBuilder::bound(Label l) const { return l.valid() && label_at_[l.id] >= 0; }

void CodeBuilder::op(Opcode o) {
  Instr in;
  in.op = o;
  items_.push_back({in, -1});
}

void CodeBuilder::raw(Instr in) { items_.push_back({std::move(in), -1}); }

namespace {
Instr local_instr(Opcode generic, Opcode short0, int slot) {
  Instr in;
  if (slot < 0 || slot > 0xFFFF) throw InconsistentModel("local slot out of range");
  if (slot <= 3) {
    in.op = static_cast<Opcode>(static_cast<int>(short0) + slot);
  } else {
    in.op = generic;
    in.a = slot;
    in.wide = slot > 0xFF;
  }
  return in;
}
int family(Kind k) {
  switch (k) {
    case Kind::Int: return 0;
    case Kind::Long: return 1;
    case Kind::Float: return 2;
    case Kind::Double: return 3;
    case Kind::Ref: return 4;
    default: throw InconsistentModel("no local access for void");
  }
}
}  // namespace

void CodeBuilder::load(Kind k, int slot) {
  auto f = family(k);
  items_.push_back({local_instr(static_cast<Opcode>(0x15 + f), static_cast<Opcode>(0x1a + 4 * f), slot), -1});
}

void CodeBuilder::store(Kind k, int slot) {
  auto f = family(k);
  items_.push_back({local_instr(static_cast<Opcode>(0x36 + f), static_cast<Opcode>(0x3b + 4 * f), slot), -1});
}

void CodeBuilder::iinc(int slot, int delta) {
  Instr in;
  in.op = Opcode::iinc;
  in.a = slot;
  in.b = delta;
  in.wide = slot > 0xFF || delta < -128 || delta > 127;
  if (delta < -32768 || delta > 32767) throw InconsistentModel("iinc increment out of range");
  items_.push_back({in, -1});
}

void CodeBuilder::push_int(std::int32_t v) {
  Instr in;
  if (v >= -1 && v <= 5) {
    in.op = static_cast<Opcode>(static_cast<int>(Opcode::iconst_0) + v);
  } else if (v >= -128 && v <= 127) {
    in.op = Opcode::bipush;
    in.a = v;
  } else if (v >= -32768 && v <= 32767) {
    in.op = Opcode::sipush;
    in.a = v;
  } else {
    auto idx = pool_->add_integer(v);
    in.op = idx <= 0xFF ? Opcode::ldc : Opcode::ldc_w;
    in.a = idx;
  }
  items_.push_back({in, -1});
}

void CodeBuilder::push_long(std::int64_t v) {
  Instr in;
  if (v == 0 || v == 1) {
    in.op = v == 0 ? Opcode::lconst_0 : Opcode::lconst_1;
  } else {
    in.op = Opcode::ldc2_w;
    in.a = pool_->add_long(v);
  }
  items_.push_back({in, -1});
}

void CodeBuilder::push_float(float v) {
  Instr in;
  auto bits = std::bit_cast<std::uint32_t>(v);
  if (bits == std::bit_cast<std::uint32_t>(0.0f)) {
    in.op = Opcode::fconst_0;
  } else if (v == 1.0f) {
    in.op = Opcode::fconst_1;
  } else if (v == 2.0f) {
    in.op = Opcode::fconst_2;
  } else {
    auto idx = pool_->add_float(v);
    in.op = idx <= 0xFF ? Opcode::ldc : Opcode::ldc_w;
    in.a = idx;
  }
  items_.push_back({in, -1});
}

void CodeBuilder::push_double(double v) {
  Instr in;
  if (std::bit_cast<std::uint64_t>(v) == std::bit_cast<std::uint64_t>(0.0)) {
    in.op = Opcode::dconst_0;
  } else if (v == 1.0) {
    in.op = Opcode::dconst_1;
  } else {
    in.op = Opcode::ldc2_w;
    in.a = pool_->add_double(v);
  }
  items_.push_back({in, -1});
}

void CodeBuilder::branch(Opcode o, Label target) {
  if (!is_branch(o)) throw InconsistentModel("not a branch opcode");
  Instr in;
  in.op = o;
  items_.push_back({in, target.id});
}

void CodeBuilder::field(Opcode o, std::string_view owner, std::string_view name, std::string_view desc) {
  Instr in;
  in.op = o;
  in.a = pool_->add_field_ref(owner, name, desc);
  items_.push_back({in, -1});
}

void CodeBuilder::invoke(Opcode o, std::string_view owner, std::string_view name, std::string_view desc) {
  Instr in;
  in.op = o;
  in.a = pool_->add_method_ref(owner, name, desc);
  items_.push_back({in, -1});
}

void CodeBuilder::new_object(std::string_view class_name) {
  Instr in;
  in.op = Opcode::new_;
  in.a = pool_->add_class(class_name);
  items_.push_back({in, -1});
}

void CodeBuilder::new_array(ElemKind elem, std::string_view ref_class) {
  Instr in;
  if (elem == ElemKind::Ref) {
    in.op = Opcode::anewarray;
    in.a = pool_->add_class(ref_class);
  } else {
    in.op = Opcode::newarray;
    in.a = newarray_type_code(elem);
  }
  items_.push_back({in, -1});
}

void CodeBuilder::multi_new_array(std::string_view array_desc, int dims) {
  Instr in;
  in.op = Opcode::multianewarray;
  in.a = pool_->add_class(array_desc);
  in.b = dims;
  items_.push_back({in, -1});
}

std::vector<Instr> CodeBuilder::finish() const {
  std::vector<Instr> out;
  out.reserve(items_.size());
  std::vector<std::uint32_t> offsets(items_.size() + 1, 0);
  std::uint32_t off = 0;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    offsets[i] = off;
    off += items_[i].in.size_at(off);
  }
  offsets[items_.size()] = off;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    Instr in = items_[i].in;
    in.offset = offsets[i];
    if (items_[i].label >= 0) {
      auto at = label_at_.at(static_cast<std::size_t>(items_[i].label));
      if (at < 0) throw InconsistentModel("branch to unbound label");
      in.target = static_cast<std::int32_t>(offsets[static_cast<std::size_t>(at)]);
    }
    out.push_back(std::move(in));
  }
  return out;
}

ClassBuilder::ClassBuilder(std::string_view name, std::string_view super_name, std::uint16_t access) {
  model_.major_version = kRewriteMajorVersion;
  model_.minor_version = 0;
  model_.access_flags = access;
  model_.this_class = model_.pool.add_class(name);
  if (!super_name.empty()) model_.super_class = model_.pool.add_class(super_name);
}

void ClassBuilder::add_interface(std::string_view name) { model_.interfaces.push_back(model_.pool.add_class(name)); }

void ClassBuilder::add_field(std::uint16_t access, std::string_view name, std::string_view desc) {
  FieldEntry f;
  f.access = access;
  f.name_index = model_.pool.add_utf8(name);
  f.descriptor_index = model_.pool.add_utf8(desc);
  model_.fields.push_back(std::move(f));
}

MethodEntry& ClassBuilder::add_method(std::uint16_t access, std::string_view name, std::string_view desc,
                                      std::vector<Instr> code) {
  MethodEntry m;
  m.access = access;
  m.name_index = model_.pool.add_utf8(name);
  m.descriptor_index = model_.pool.add_utf8(desc);
  CodeAttribute c;
  c.name_index = model_.pool.add_utf8("Code");
  c.instrs = std::move(code);
  c.modified = true;
  m.code = std::move(c);
  model_.methods.push_back(std::move(m));
  return model_.methods.back();
}

MethodEntry& ClassBuilder::add_abstract_method(std::uint16_t access, std::string_view name, std::string_view desc) {
  MethodEntry m;
  m.access = access | access::kAbstract;
  m.name_index = model_.pool.add_utf8(name);
  m.descriptor_index = model_.pool.add_utf8(desc);
  model_.methods.push_back(std::move(m));
  return model_.methods.back();
}

void ClassBuilder::add_default_constructor() {
  CodeBuilder cb(model_.pool);
  cb.load(Kind::Ref, 0);
  cb.invoke(Opcode::invokespecial, model_.super_class ? model_.pool.class_name(model_.super_class) : "java/lang/Object",
            "<init>", "()V");
  cb.op(Opcode::return_);
  add_method(access::kPublic, "<init>", "()V", cb.finish());
}

}  // namespace bcpar
