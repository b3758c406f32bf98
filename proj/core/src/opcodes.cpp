#include "bcpar/opcodes.hpp"

#include <array>

#include "bcpar/error.hpp"

namespace bcpar {
namespace {

constexpr std::array<OpcodeInfo, 256> make_table() {
  std::array<OpcodeInfo, 256> t{};
  for (auto& e : t) e = OpcodeInfo{"<undefined>", 1, OperandFormat::None, false, false};
#define BCPAR_X(name, value, len, fmt, sup) \
  t[value] = OpcodeInfo{#name, len, OperandFormat::fmt, sup, true};
  BCPAR_OPCODES(BCPAR_X)
#undef BCPAR_X
  // the enum spells these with a trailing underscore
  t[0xa7].name = "goto";
  t[0xb1].name = "return";
  t[0xbb].name = "new";
  return t;
}

constexpr auto kTable = make_table();

}  // namespace

const OpcodeInfo& opcode_info(Opcode op) { return kTable[static_cast<std::uint8_t>(op)]; }
const OpcodeInfo& opcode_info(std::uint8_t raw) { return kTable[raw]; }

std::optional<Opcode> opcode_from_name(std::string_view name) {
  for (int i = 0; i < 256; ++i)
    if (kTable[i].defined && kTable[i].name == name) return static_cast<Opcode>(i);
  return std::nullopt;
}

Kind elem_stack_kind(ElemKind e) {
  switch (e) {
    case ElemKind::Long: return Kind::Long;
    case ElemKind::Float: return Kind::Float;
    case ElemKind::Double: return Kind::Double;
    case ElemKind::Ref: return Kind::Ref;
    default: return Kind::Int;
  }
}

char kind_char(Kind k) {
  switch (k) {
    case Kind::Int: return 'I';
    case Kind::Long: return 'J';
    case Kind::Float: return 'F';
    case Kind::Double: return 'D';
    case Kind::Ref: return 'A';
    case Kind::Void: return 'V';
  }
  return '?';
}

bool is_conditional_branch(Opcode op) {
  auto v = static_cast<std::uint8_t>(op);
  return (v >= 0x99 && v <= 0xa6) || op == Opcode::ifnull || op == Opcode::ifnonnull;
}

bool is_branch(Opcode op) {
  return is_conditional_branch(op) || op == Opcode::goto_ || op == Opcode::goto_w ||
         op == Opcode::jsr || op == Opcode::jsr_w;
}

bool is_return(Opcode op) {
  auto v = static_cast<std::uint8_t>(op);
  return v >= 0xac && v <= 0xb1;
}

bool ends_block(Opcode op) {
  return op == Opcode::goto_ || op == Opcode::goto_w || is_return(op) || op == Opcode::athrow ||
         op == Opcode::tableswitch || op == Opcode::lookupswitch || op == Opcode::ret;
}

namespace {
constexpr Kind kFamily[5] = {Kind::Int, Kind::Long, Kind::Float, Kind::Double, Kind::Ref};
}

std::optional<Kind> load_kind(Opcode op) {
  auto v = static_cast<std::uint8_t>(op);
  if (v >= 0x15 && v <= 0x19) return kFamily[v - 0x15];
  if (v >= 0x1a && v <= 0x2d) return kFamily[(v - 0x1a) / 4];
  return std::nullopt;
}

std::optional<Kind> store_kind(Opcode op) {
  auto v = static_cast<std::uint8_t>(op);
  if (v >= 0x36 && v <= 0x3a) return kFamily[v - 0x36];
  if (v >= 0x3b && v <= 0x4e) return kFamily[(v - 0x3b) / 4];
  return std::nullopt;
}

std::optional<int> implicit_slot(Opcode op) {
  auto v = static_cast<std::uint8_t>(op);
  if (v >= 0x1a && v <= 0x2d) return (v - 0x1a) % 4;
  if (v >= 0x3b && v <= 0x4e) return (v - 0x3b) % 4;
  return std::nullopt;
}

namespace {
constexpr ElemKind kElems[8] = {ElemKind::Int,  ElemKind::Long, ElemKind::Float, ElemKind::Double,
                                ElemKind::Ref,  ElemKind::Byte, ElemKind::Char,  ElemKind::Short};
}

std::optional<ElemKind> array_load_kind(Opcode op) {
  auto v = static_cast<std::uint8_t>(op);
  if (v >= 0x2e && v <= 0x35) return kElems[v - 0x2e];
  return std::nullopt;
}

std::optional<ElemKind> array_store_kind(Opcode op) {
  auto v = static_cast<std::uint8_t>(op);
  if (v >= 0x4f && v <= 0x56) return kElems[v - 0x4f];
  return std::nullopt;
}

namespace {
int family_index(Kind k) {
  switch (k) {
    case Kind::Int: return 0;
    case Kind::Long: return 1;
    case Kind::Float: return 2;
    case Kind::Double: return 3;
    case Kind::Ref: return 4;
    case Kind::Void: break;
  }
  throw InconsistentModel("no load/store opcode for void");
}
int elem_index(ElemKind e) {
  for (int i = 0; i < 8; ++i)
    if (kElems[i] == e) return i;
  return 0;
}
}  // namespace

Opcode load_op(Kind k) { return static_cast<Opcode>(0x15 + family_index(k)); }
Opcode store_op(Kind k) { return static_cast<Opcode>(0x36 + family_index(k)); }
Opcode array_load_op(ElemKind e) { return static_cast<Opcode>(0x2e + elem_index(e)); }
Opcode array_store_op(ElemKind e) { return static_cast<Opcode>(0x4f + elem_index(e)); }
Opcode return_op(Kind k) {
  if (k == Kind::Void) return Opcode::return_;
  return static_cast<Opcode>(0xac + family_index(k));
}

Kind descriptor_kind(std::string_view d) {
  if (d.empty()) throw MalformedClassfile("empty descriptor");
  switch (d[0]) {
    case 'B': case 'C': case 'S': case 'Z': case 'I': return Kind::Int;
    case 'J': return Kind::Long;
    case 'F': return Kind::Float;
    case 'D': return Kind::Double;
    case 'V': return Kind::Void;
    case 'L': case '[': return Kind::Ref;
    default: throw MalformedClassfile("bad descriptor '" + std::string(d) + "'");
  }
}

ElemKind descriptor_elem_kind(std::string_view d) {
  if (d.empty()) throw MalformedClassfile("empty descriptor");
  switch (d[0]) {
    case 'B': case 'Z': return ElemKind::Byte;
    case 'C': return ElemKind::Char;
    case 'S': return ElemKind::Short;
    case 'I': return ElemKind::Int;
    case 'J': return ElemKind::Long;
    case 'F': return ElemKind::Float;
    case 'D': return ElemKind::Double;
    default: return ElemKind::Ref;
  }
}

namespace {
std::size_t field_descriptor_end(std::string_view d, std::size_t pos) {
  std::size_t p = pos;
  while (p < d.size() && d[p] == '[') ++p;
  if (p >= d.size()) throw MalformedClassfile("truncated descriptor '" + std::string(d) + "'");
  if (d[p] == 'L') {
    auto semi = d.find(';', p);
    if (semi == std::string_view::npos)
      throw MalformedClassfile("unterminated class descriptor '" + std::string(d) + "'");
    return semi + 1;
  }
  if (std::string_view("BCDFIJSZ").find(d[p]) == std::string_view::npos)
    throw MalformedClassfile("bad descriptor '" + std::string(d) + "'");
  return p + 1;
}
}  // namespace

MethodSignature parse_method_descriptor(std::string_view d) {
  if (d.empty() || d[0] != '(') throw MalformedClassfile("bad method descriptor '" + std::string(d) + "'");
  MethodSignature sig;
  std::size_t p = 1;
  while (p < d.size() && d[p] != ')') {
    auto end = field_descriptor_end(d, p);
    sig.params.emplace_back(d.substr(p, end - p));
    p = end;
  }
  if (p >= d.size()) throw MalformedClassfile("unterminated method descriptor '" + std::string(d) + "'");
  sig.ret = std::string(d.substr(p + 1));
  if (sig.ret != "V") {
    if (field_descriptor_end(d, p + 1) != d.size())
      throw MalformedClassfile("bad return descriptor '" + std::string(d) + "'");
  }
  return sig;
}

int MethodSignature::arg_slots(bool is_static) const {
  int n = is_static ? 0 : 1;
  for (const auto& p : params) n += slot_width(descriptor_kind(p));
  return n;
}

}  // namespace bcpar
