#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bcpar/opcodes.hpp"

namespace bcpar {

inline constexpr std::uint32_t kClassMagic = 0xCAFEBABE;
/// Class versions accepted by the parser (JDK 1.1 through 21).
inline constexpr std::uint16_t kMinMajorVersion = 45;
inline constexpr std::uint16_t kMaxMajorVersion = 65;
/// Rewritten classes are emitted at this version: the last one that does not
/// require StackMapTable frames.
inline constexpr std::uint16_t kRewriteMajorVersion = 49;

enum class CpTag : std::uint8_t {
  Unusable = 0,  // slot 0 and the upper half of Long/Double entries
  Utf8 = 1,
  Integer = 3,
  Float = 4,
  Long = 5,
  Double = 6,
  Class = 7,
  String = 8,
  Fieldref = 9,
  Methodref = 10,
  InterfaceMethodref = 11,
  NameAndType = 12,
  MethodHandle = 15,
  MethodType = 16,
  Dynamic = 17,
  InvokeDynamic = 18,
  Module = 19,
  Package = 20,
};

std::string_view cp_tag_name(CpTag tag);

struct CpEntry {
  CpTag tag = CpTag::Unusable;
  std::string utf8;        // raw (modified UTF-8) bytes for Utf8
  std::uint64_t bits = 0;  // Integer/Float: low 32 bits; Long/Double: all 64
  std::uint16_t a = 0;     // first index operand
  std::uint16_t b = 0;     // second index operand
  std::uint8_t ref_kind = 0;

  friend bool operator==(const CpEntry&, const CpEntry&) = default;
};

struct MemberRef {
  std::string owner;
  std::string name;
  std::string descriptor;
  friend bool operator==(const MemberRef&, const MemberRef&) = default;
};

/// 1-based constant pool. Long and Double occupy two slots; the second is
/// an `Unusable` placeholder so indices line up with the file.
class ConstantPool {
 public:
  ConstantPool() : entries_(1) {}

  /// The classfile's constant_pool_count (one past the last valid index).
  std::uint16_t count() const { return static_cast<std::uint16_t>(entries_.size()); }
  bool valid(std::uint16_t index) const;
  const CpEntry& at(std::uint16_t index) const;
  const CpEntry& expect(std::uint16_t index, CpTag tag) const;

  const std::string& utf8(std::uint16_t index) const;
  const std::string& class_name(std::uint16_t index) const;
  MemberRef member_ref(std::uint16_t index) const;
  std::pair<std::string, std::string> name_and_type(std::uint16_t index) const;

  /// Appends an entry verbatim (used by the parser). Returns its index.
  std::uint16_t append(CpEntry entry);

  // find-or-add helpers used by the assembler and code generator
  std::uint16_t add_utf8(std::string_view s);
  std::uint16_t add_class(std::string_view internal_name);
  std::uint16_t add_string(std::string_view s);
  std::uint16_t add_integer(std::int32_t v);
  std::uint16_t add_float(float v);
  std::uint16_t add_long(std::int64_t v);
  std::uint16_t add_double(double v);
  std::uint16_t add_name_and_type(std::string_view name, std::string_view desc);
  std::uint16_t add_field_ref(std::string_view owner, std::string_view name, std::string_view desc);
  std::uint16_t add_method_ref(std::string_view owner, std::string_view name, std::string_view desc);

  const std::vector<CpEntry>& entries() const { return entries_; }

 private:
  std::uint16_t find_or_add(const CpEntry& e);
  std::vector<CpEntry> entries_;
};

/// One decoded instruction. Branch targets are absolute code offsets.
struct Instr {
  std::uint32_t offset = 0;
  Opcode op = Opcode::nop;
  bool wide = false;
  std::int32_t a = 0;       // immediate, local slot, pool index or array type
  std::int32_t b = 0;       // iinc increment, multianewarray dims, invokeinterface count
  std::int32_t target = 0;  // branch target / switch default
  std::int32_t low = 0;     // tableswitch low key
  std::vector<std::pair<std::int32_t, std::int32_t>> cases;  // (key, target)

  /// Encoded size when placed at `at` (switch padding depends on it).
  std::uint32_t size_at(std::uint32_t at) const;
  std::uint32_t size() const { return size_at(offset); }
  /// Local slot touched by loads, stores, iinc and ret (implicit _n forms included).
  std::optional<int> local_slot() const;

  friend bool operator==(const Instr&, const Instr&) = default;
};

struct Attribute {
  std::uint16_t name_index = 0;
  std::vector<std::uint8_t> data;
  friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct ExceptionEntry {
  std::uint16_t start_pc = 0, end_pc = 0, handler_pc = 0, catch_type = 0;
  friend bool operator==(const ExceptionEntry&, const ExceptionEntry&) = default;
};

struct CodeAttribute {
  std::uint16_t name_index = 0;
  std::uint16_t max_stack = 0;
  std::uint16_t max_locals = 0;
  std::vector<std::uint8_t> bytes;  // original code array
  std::vector<Instr> instrs;
  std::vector<ExceptionEntry> exception_table;
  std::vector<Attribute> attributes;  // LineNumberTable etc., opaque
  /// Set when `instrs` no longer matches `bytes`; emission re-encodes and
  /// recomputes lengths, max_stack and max_locals.
  bool modified = false;
};

struct FieldEntry {
  std::uint16_t access = 0;
  std::uint16_t name_index = 0;
  std::uint16_t descriptor_index = 0;
  std::vector<Attribute> attributes;
};

struct MethodEntry {
  std::uint16_t access = 0;
  std::uint16_t name_index = 0;
  std::uint16_t descriptor_index = 0;
  /// Non-Code attributes in file order; the Code attribute sits at `code_position`.
  std::vector<Attribute> attributes;
  std::optional<CodeAttribute> code;
  std::size_t code_position = 0;

  bool is_static() const { return (access & 0x0008) != 0; }
  bool is_abstract() const { return (access & 0x0400) != 0; }
  bool is_native() const { return (access & 0x0100) != 0; }
};

namespace access {
inline constexpr std::uint16_t kPublic = 0x0001;
inline constexpr std::uint16_t kPrivate = 0x0002;
inline constexpr std::uint16_t kStatic = 0x0008;
inline constexpr std::uint16_t kFinal = 0x0010;
inline constexpr std::uint16_t kSuper = 0x0020;
inline constexpr std::uint16_t kAbstract = 0x0400;
}  // namespace access

struct ClassModel {
  std::uint32_t magic = kClassMagic;
  std::uint16_t minor_version = 0;
  std::uint16_t major_version = kRewriteMajorVersion;
  ConstantPool pool;
  std::uint16_t access_flags = 0;
  std::uint16_t this_class = 0;
  std::uint16_t super_class = 0;
  std::vector<std::uint16_t> interfaces;
  std::vector<FieldEntry> fields;
  std::vector<MethodEntry> methods;
  std::vector<Attribute> attributes;

  std::string name() const { return pool.class_name(this_class); }
  std::string super_name() const { return super_class ? pool.class_name(super_class) : std::string(); }
  std::string method_name(const MethodEntry& m) const { return pool.utf8(m.name_index); }
  std::string method_descriptor(const MethodEntry& m) const { return pool.utf8(m.descriptor_index); }
  std::string field_name(const FieldEntry& f) const { return pool.utf8(f.name_index); }
  std::string field_descriptor(const FieldEntry& f) const { return pool.utf8(f.descriptor_index); }

  const MethodEntry* find_method(std::string_view name, std::string_view desc) const;
  MethodEntry* find_method(std::string_view name, std::string_view desc);
  /// Looks up by name alone; throws NoSuchMethod when absent or ambiguous.
  const MethodEntry& method_by_name(std::string_view name) const;
  const FieldEntry* find_field(std::string_view name) const;
};

/// Parses a classfile. Throws MalformedClassfile or UnsupportedVersion.
ClassModel parse_class(std::span<const std::uint8_t> bytes);
/// Serializes a model. Unmodified code is written back verbatim; modified
/// code is re-encoded. Throws InconsistentModel on dangling references.
std::vector<std::uint8_t> emit_class(const ClassModel& model);

/// Decoded instructions of `name`+`desc`. Throws NoSuchMethod / AbstractMethod.
const std::vector<Instr>& get_code(const ClassModel& model, std::string_view name, std::string_view desc);

std::vector<Instr> decode_code(std::span<const std::uint8_t> code);
/// Encodes instructions at their recorded offsets; offsets must tile exactly.
std::vector<std::uint8_t> encode_code(const std::vector<Instr>& instrs);

/// Replaces a method's code. Emission recomputes the derived header fields
/// and drops the code's debug attributes.
void set_code(MethodEntry& method, std::vector<Instr> instrs);

struct StackEffect {
  int pops = 0;
  int pushes = 0;
};
/// Operand-stack effect in slots (long/double count two).
StackEffect stack_effect(const Instr& in, const ConstantPool& pool);
int compute_max_stack(const std::vector<Instr>& code, const ConstantPool& pool,
                      const std::vector<ExceptionEntry>& handlers = {});
int compute_max_locals(const std::vector<Instr>& code, std::string_view descriptor, bool is_static);

/// Checks offsets tile, branch targets land on instruction starts, and pool
/// operands have the expected kinds. Throws InconsistentModel.
void validate_code(const std::vector<Instr>& code, const ConstantPool& pool);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace bcpar
