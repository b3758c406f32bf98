#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bcpar/classfile.hpp"

namespace bcpar {

struct Label {
  int id = -1;
  bool valid() const { return id >= 0; }
  friend bool operator==(Label, Label) = default;
};

/// JVM newarray type codes.
int newarray_type_code(ElemKind e);
ElemKind newarray_elem_kind(int atype);

/// Builds an instruction list with symbolic labels. Picks the compact
/// encodings (iload_1, iconst_3, bipush, wide) automatically.
class CodeBuilder {
 public:
  explicit CodeBuilder(ConstantPool& pool) : pool_(&pool) {}

  ConstantPool& pool() { return *pool_; }

  Label new_label();
  void bind(Label l);
  bool bound(Label l) const;

  void op(Opcode o);
  void load(Kind k, int slot);
  void store(Kind k, int slot);
  void iinc(int slot, int delta);
  void push_int(std::int32_t v);
  void push_long(std::int64_t v);
  void push_float(float v);
  void push_double(double v);
  void push_null() { op(Opcode::aconst_null); }
  void branch(Opcode o, Label target);
  void jump(Label target) { branch(Opcode::goto_, target); }
  void field(Opcode o, std::string_view owner, std::string_view name, std::string_view desc);
  void invoke(Opcode o, std::string_view owner, std::string_view name, std::string_view desc);
  void new_object(std::string_view class_name);
  void new_array(ElemKind elem, std::string_view ref_class = {});
  void multi_new_array(std::string_view array_desc, int dims);
  void array_load(ElemKind e) { op(array_load_op(e)); }
  void array_store(ElemKind e) { op(array_store_op(e)); }
  void ret(Kind k) { op(return_op(k)); }
  /// Appends an instruction whose operands are already final (no label).
  void raw(Instr in);

  std::size_t size() const { return items_.size(); }
  /// Lays out offsets and resolves labels. Throws InconsistentModel for an
  /// unbound label.
  std::vector<Instr> finish() const;

 private:
  struct Item {
    Instr in;
    int label = -1;
  };
  ConstantPool* pool_;
  std::vector<Item> items_;
  std::vector<long> label_at_;  // item index each label is bound to
};

/// Convenience for generating whole classes (task classes, test fixtures).
class ClassBuilder {
 public:
  ClassBuilder(std::string_view name, std::string_view super_name = "java/lang/Object",
               std::uint16_t access = access::kPublic | access::kSuper);

  ClassModel& model() { return model_; }
  ConstantPool& pool() { return model_.pool; }

  void add_interface(std::string_view name);
  void add_field(std::uint16_t access, std::string_view name, std::string_view desc);
  /// Adds a method whose code is emitted (and max_stack/max_locals computed)
  /// at serialization time.
  MethodEntry& add_method(std::uint16_t access, std::string_view name, std::string_view desc,
                          std::vector<Instr> code);
  MethodEntry& add_abstract_method(std::uint16_t access, std::string_view name, std::string_view desc);
  /// Adds `<init>()V` that only calls the superclass constructor.
  void add_default_constructor();

  ClassModel build() && { return std::move(model_); }

 private:
  ClassModel model_;
};

}  // namespace bcpar
