#include "bcpar/classfile.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "bcpar/error.hpp"

namespace bcpar {
namespace {

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : buf_(b) {}

  std::uint8_t u1() {
    need(1);
    return buf_[pos_++];
  }
  std::uint16_t u2() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>((buf_[pos_] << 8) | buf_[pos_ + 1]);
    pos_ += 2;
    return v;
  }
  std::uint32_t u4() {
    need(4);
    std::uint32_t v = (std::uint32_t(buf_[pos_]) << 24) | (std::uint32_t(buf_[pos_ + 1]) << 16) |
                      (std::uint32_t(buf_[pos_ + 2]) << 8) | std::uint32_t(buf_[pos_ + 3]);
    pos_ += 4;
    return v;
  }
  std::vector<std::uint8_t> bytes(std::size_t n) {
    need(n);
    std::vector<std::uint8_t> out(buf_.begin() + pos_, buf_.begin() + pos_ + n);
    pos_ += n;
    return out;
  }
  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n) const {
    if (buf_.size() - pos_ < n)
      throw MalformedClassfile("truncated at byte " + std::to_string(pos_));
  }
  std::span<const std::uint8_t> buf_;
  std::size_t pos_ = 0;
};

class Writer {
 public:
  void u1(std::uint32_t v) { out_.push_back(static_cast<std::uint8_t>(v)); }
  void u2(std::uint32_t v) {
    u1(v >> 8);
    u1(v);
  }
  void u4(std::uint32_t v) {
    u2(v >> 16);
    u2(v);
  }
  void bytes(std::span<const std::uint8_t> b) { out_.insert(out_.end(), b.begin(), b.end()); }
  std::vector<std::uint8_t>& out() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

std::int32_t s2(std::span<const std::uint8_t> c, std::size_t p) {
  return static_cast<std::int16_t>((c[p] << 8) | c[p + 1]);
}
std::int32_t s4(std::span<const std::uint8_t> c, std::size_t p) {
  return static_cast<std::int32_t>((std::uint32_t(c[p]) << 24) | (std::uint32_t(c[p + 1]) << 16) |
                                   (std::uint32_t(c[p + 2]) << 8) | std::uint32_t(c[p + 3]));
}

std::uint32_t switch_pad(std::uint32_t at) { return (4 - ((at + 1) % 4)) % 4; }

}  // namespace

// ---------------------------------------------------------------------------
// constant pool

std::string_view cp_tag_name(CpTag tag) {
  switch (tag) {
    case CpTag::Unusable: return "Unusable";
    case CpTag::Utf8: return "Utf8";
    case CpTag::Integer: return "Integer";
    case CpTag::Float: return "Float";
    case CpTag::Long: return "Long";
    case CpTag::Double: return "Double";
    case CpTag::Class: return "Class";
    case CpTag::String: return "String";
    case CpTag::Fieldref: return "Fieldref";
    case CpTag::Methodref: return "Methodref";
    case CpTag::InterfaceMethodref: return "InterfaceMethodref";
    case CpTag::NameAndType: return "NameAndType";
    case CpTag::MethodHandle: return "MethodHandle";
    case CpTag::MethodType: return "MethodType";
    case CpTag::Dynamic: return "Dynamic";
    case CpTag::InvokeDynamic: return "InvokeDynamic";
    case CpTag::Module: return "Module";
    case CpTag::Package: return "Package";
  }
  return "?";
}

bool ConstantPool::valid(std::uint16_t index) const {
  return index > 0 && index < entries_.size() && entries_[index].tag != CpTag::Unusable;
}

const CpEntry& ConstantPool::at(std::uint16_t index) const {
  if (!valid(index)) throw MalformedClassfile("bad constant pool index " + std::to_string(index));
  return entries_[index];
}

const CpEntry& ConstantPool::expect(std::uint16_t index, CpTag tag) const {
  const auto& e = at(index);
  if (e.tag != tag)
    throw MalformedClassfile("constant pool index " + std::to_string(index) + " is " +
                             std::string(cp_tag_name(e.tag)) + ", expected " +
                             std::string(cp_tag_name(tag)));
  return e;
}

const std::string& ConstantPool::utf8(std::uint16_t index) const { return expect(index, CpTag::Utf8).utf8; }

const std::string& ConstantPool::class_name(std::uint16_t index) const {
  return utf8(expect(index, CpTag::Class).a);
}

std::pair<std::string, std::string> ConstantPool::name_and_type(std::uint16_t index) const {
  const auto& nt = expect(index, CpTag::NameAndType);
  return {utf8(nt.a), utf8(nt.b)};
}

MemberRef ConstantPool::member_ref(std::uint16_t index) const {
  const auto& e = at(index);
  if (e.tag != CpTag::Fieldref && e.tag != CpTag::Methodref && e.tag != CpTag::InterfaceMethodref)
    throw MalformedClassfile("constant pool index " + std::to_string(index) + " is not a member reference");
  auto [name, desc] = name_and_type(e.b);
  return MemberRef{class_name(e.a), std::move(name), std::move(desc)};
}

std::uint16_t ConstantPool::append(CpEntry entry) {
  if (entries_.size() >= 0xFFFF) throw InconsistentModel("constant pool overflow");
  bool wide = entry.tag == CpTag::Long || entry.tag == CpTag::Double;
  entries_.push_back(std::move(entry));
  auto idx = static_cast<std::uint16_t>(entries_.size() - 1);
  if (wide) entries_.push_back(CpEntry{});
  return idx;
}

std::uint16_t ConstantPool::find_or_add(const CpEntry& e) {
  for (std::size_t i = 1; i < entries_.size(); ++i)
    if (entries_[i] == e) return static_cast<std::uint16_t>(i);
  return append(e);
}

std::uint16_t ConstantPool::add_utf8(std::string_view s) {
  CpEntry e;
  e.tag = CpTag::Utf8;
  e.utf8 = std::string(s);
  return find_or_add(e);
}

std::uint16_t ConstantPool::add_class(std::string_view name) {
  CpEntry e;
  e.tag = CpTag::Class;
  e.a = add_utf8(name);
  return find_or_add(e);
}

std::uint16_t ConstantPool::add_string(std::string_view s) {
  CpEntry e;
  e.tag = CpTag::String;
  e.a = add_utf8(s);
  return find_or_add(e);
}

std::uint16_t ConstantPool::add_integer(std::int32_t v) {
  CpEntry e;
  e.tag = CpTag::Integer;
  e.bits = static_cast<std::uint32_t>(v);
  return find_or_add(e);
}

std::uint16_t ConstantPool::add_float(float v) {
  CpEntry e;
  e.tag = CpTag::Float;
  e.bits = std::bit_cast<std::uint32_t>(v);
  return find_or_add(e);
}

std::uint16_t ConstantPool::add_long(std::int64_t v) {
  CpEntry e;
  e.tag = CpTag::Long;
  e.bits = static_cast<std::uint64_t>(v);
  return find_or_add(e);
}

std::uint16_t ConstantPool::add_double(double v) {
  CpEntry e;
  e.tag = CpTag::Double;
  e.bits = std::bit_cast<std::uint64_t>(v);
  return find_or_add(e);
}

std::uint16_t ConstantPool::add_name_and_type(std::string_view name, std::string_view desc) {
  CpEntry e;
  e.tag = CpTag::NameAndType;
  e.a = add_utf8(name);
  e.b = add_utf8(desc);
  return find_or_add(e);
}

std::uint16_t ConstantPool::add_field_ref(std::string_view owner, std::string_view name, std::string_view desc) {
  CpEntry e;
  e.tag = CpTag::Fieldref;
  e.a = add_class(owner);
  e.b = add_name_and_type(name, desc);
  return find_or_add(e);
}

std::uint16_t ConstantPool::add_method_ref(std::string_view owner, std::string_view name, std::string_view desc) {
  CpEntry e;
  e.tag = CpTag::Methodref;
  e.a = add_class(owner);
  e.b = add_name_and_type(name, desc);
  return find_or_add(e);
}

namespace {

void validate_pool(const ConstantPool& pool) {
  const auto& es = pool.entries();
  for (std::size_t i = 1; i < es.size(); ++i) {
    const auto& e = es[i];
    switch (e.tag) {
      case CpTag::Class:
      case CpTag::String:
      case CpTag::MethodType:
      case CpTag::Module:
      case CpTag::Package:
        pool.expect(e.a, CpTag::Utf8);
        break;
      case CpTag::Fieldref:
      case CpTag::Methodref:
      case CpTag::InterfaceMethodref:
        pool.expect(e.a, CpTag::Class);
        pool.expect(e.b, CpTag::NameAndType);
        break;
      case CpTag::NameAndType:
        pool.expect(e.a, CpTag::Utf8);
        pool.expect(e.b, CpTag::Utf8);
        break;
      case CpTag::MethodHandle: {
        const auto& ref = pool.at(e.a);
        if (ref.tag != CpTag::Fieldref && ref.tag != CpTag::Methodref && ref.tag != CpTag::InterfaceMethodref)
          throw MalformedClassfile("method handle " + std::to_string(i) + " references a non-member");
        break;
      }
      case CpTag::Dynamic:
      case CpTag::InvokeDynamic:
        pool.expect(e.b, CpTag::NameAndType);
        break;
      default:
        break;
    }
  }
}

void check_pool_operand(const Instr& in, const ConstantPool& pool) {
  auto idx = static_cast<std::uint16_t>(in.a);
  switch (in.op) {
    case Opcode::ldc:
    case Opcode::ldc_w: {
      auto t = pool.at(idx).tag;
      if (t != CpTag::Integer && t != CpTag::Float && t != CpTag::String && t != CpTag::Class &&
          t != CpTag::MethodType && t != CpTag::MethodHandle && t != CpTag::Dynamic)
        throw MalformedClassfile("ldc of non-loadable constant at offset " + std::to_string(in.offset));
      break;
    }
    case Opcode::ldc2_w: {
      auto t = pool.at(idx).tag;
      if (t != CpTag::Long && t != CpTag::Double && t != CpTag::Dynamic)
        throw MalformedClassfile("ldc2_w of non-wide constant at offset " + std::to_string(in.offset));
      break;
    }
    case Opcode::getstatic:
    case Opcode::putstatic:
    case Opcode::getfield:
    case Opcode::putfield:
      pool.expect(idx, CpTag::Fieldref);
      break;
    case Opcode::invokevirtual:
      pool.expect(idx, CpTag::Methodref);
      break;
    case Opcode::invokespecial:
    case Opcode::invokestatic: {
      auto t = pool.at(idx).tag;
      if (t != CpTag::Methodref && t != CpTag::InterfaceMethodref)
        throw MalformedClassfile("invoke of non-method at offset " + std::to_string(in.offset));
      break;
    }
    case Opcode::invokeinterface:
      pool.expect(idx, CpTag::InterfaceMethodref);
      break;
    case Opcode::invokedynamic:
      pool.expect(idx, CpTag::InvokeDynamic);
      break;
    case Opcode::new_:
    case Opcode::anewarray:
    case Opcode::checkcast:
    case Opcode::instanceof:
    case Opcode::multianewarray:
      pool.expect(idx, CpTag::Class);
      break;
    default:
      break;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// instructions

std::uint32_t Instr::size_at(std::uint32_t at) const {
  const auto& info = opcode_info(op);
  if (wide) return op == Opcode::iinc ? 6 : 4;
  if (op == Opcode::tableswitch) return 1 + switch_pad(at) + 12 + 4 * static_cast<std::uint32_t>(cases.size());
  if (op == Opcode::lookupswitch) return 1 + switch_pad(at) + 8 + 8 * static_cast<std::uint32_t>(cases.size());
  return info.length;
}

std::optional<int> Instr::local_slot() const {
  if (auto s = implicit_slot(op)) return s;
  if (load_kind(op) || store_kind(op) || op == Opcode::iinc || op == Opcode::ret) return a;
  return std::nullopt;
}

std::vector<Instr> decode_code(std::span<const std::uint8_t> c) {
  std::vector<Instr> out;
  std::size_t p = 0;
  auto need = [&](std::size_t n) {
    if (c.size() - p < n) throw MalformedClassfile("truncated instruction at offset " + std::to_string(p));
  };
  while (p < c.size()) {
    Instr in;
    in.offset = static_cast<std::uint32_t>(p);
    const auto& info = opcode_info(c[p]);
    if (!info.defined) throw MalformedClassfile("undefined opcode 0x" + std::to_string(c[p]) + " at offset " + std::to_string(p));
    in.op = static_cast<Opcode>(c[p]);
    auto here = static_cast<std::int32_t>(p);
    switch (info.format) {
      case OperandFormat::None:
        p += 1;
        break;
      case OperandFormat::S1:
        need(2);
        in.a = static_cast<std::int8_t>(c[p + 1]);
        p += 2;
        break;
      case OperandFormat::U1:
      case OperandFormat::Pool1:
      case OperandFormat::Local:
        need(2);
        in.a = c[p + 1];
        p += 2;
        break;
      case OperandFormat::S2:
        need(3);
        in.a = s2(c, p + 1);
        p += 3;
        break;
      case OperandFormat::Pool2:
        need(3);
        in.a = (c[p + 1] << 8) | c[p + 2];
        p += 3;
        break;
      case OperandFormat::Iinc:
        need(3);
        in.a = c[p + 1];
        in.b = static_cast<std::int8_t>(c[p + 2]);
        p += 3;
        break;
      case OperandFormat::Branch2:
        need(3);
        in.target = here + s2(c, p + 1);
        p += 3;
        break;
      case OperandFormat::Branch4:
        need(5);
        in.target = here + s4(c, p + 1);
        p += 5;
        break;
      case OperandFormat::MultiANewArray:
        need(4);
        in.a = (c[p + 1] << 8) | c[p + 2];
        in.b = c[p + 3];
        p += 4;
        break;
      case OperandFormat::InvokeInterface:
        need(5);
        in.a = (c[p + 1] << 8) | c[p + 2];
        in.b = c[p + 3];
        if (c[p + 4] != 0) throw MalformedClassfile("invokeinterface trailing byte not zero");
        p += 5;
        break;
      case OperandFormat::InvokeDynamic:
        need(5);
        in.a = (c[p + 1] << 8) | c[p + 2];
        if (c[p + 3] != 0 || c[p + 4] != 0) throw MalformedClassfile("invokedynamic trailing bytes not zero");
        p += 5;
        break;
      case OperandFormat::TableSwitch: {
        auto pad = switch_pad(in.offset);
        need(1 + pad + 12);
        for (std::uint32_t k = 0; k < pad; ++k)
          if (c[p + 1 + k] != 0) throw MalformedClassfile("non-zero switch padding");
        std::size_t q = p + 1 + pad;
        in.target = here + s4(c, q);
        std::int32_t lo = s4(c, q + 4), hi = s4(c, q + 8);
        if (hi < lo) throw MalformedClassfile("tableswitch high < low");
        std::size_t n = static_cast<std::size_t>(std::int64_t(hi) - lo + 1);
        q += 12;
        if ((c.size() - q) / 4 < n) throw MalformedClassfile("truncated tableswitch");
        in.low = lo;
        for (std::size_t k = 0; k < n; ++k) in.cases.emplace_back(lo + static_cast<std::int32_t>(k), here + s4(c, q + 4 * k));
        p = q + 4 * n;
        break;
      }
      case OperandFormat::LookupSwitch: {
        auto pad = switch_pad(in.offset);
        need(1 + pad + 8);
        for (std::uint32_t k = 0; k < pad; ++k)
          if (c[p + 1 + k] != 0) throw MalformedClassfile("non-zero switch padding");
        std::size_t q = p + 1 + pad;
        in.target = here + s4(c, q);
        std::int32_t n = s4(c, q + 4);
        if (n < 0) throw MalformedClassfile("negative lookupswitch count");
        q += 8;
        if ((c.size() - q) / 8 < static_cast<std::size_t>(n)) throw MalformedClassfile("truncated lookupswitch");
        for (std::int32_t k = 0; k < n; ++k) in.cases.emplace_back(s4(c, q + 8 * k), here + s4(c, q + 8 * k + 4));
        p = q + 8 * static_cast<std::size_t>(n);
        break;
      }
      case OperandFormat::Wide: {
        need(4);
        const auto& inner = opcode_info(c[p + 1]);
        auto op = static_cast<Opcode>(c[p + 1]);
        in.op = op;
        in.wide = true;
        if (op == Opcode::iinc) {
          need(6);
          in.a = (c[p + 2] << 8) | c[p + 3];
          in.b = s2(c, p + 4);
          p += 6;
        } else if (inner.format == OperandFormat::Local) {
          in.a = (c[p + 2] << 8) | c[p + 3];
          p += 4;
        } else {
          throw MalformedClassfile("wide applied to " + std::string(inner.name));
        }
        break;
      }
    }
    out.push_back(std::move(in));
  }
  return out;
}

namespace {

void put_s4(std::vector<std::uint8_t>& o, std::int32_t v) {
  auto u = static_cast<std::uint32_t>(v);
  o.push_back(u >> 24);
  o.push_back(u >> 16);
  o.push_back(u >> 8);
  o.push_back(u);
}

void check_tiling_and_targets(const std::vector<Instr>& code) {
  std::uint32_t expect = 0;
  std::vector<std::uint32_t> starts;
  starts.reserve(code.size());
  for (const auto& in : code) {
    if (in.offset != expect)
      throw InconsistentModel("instruction offset " + std::to_string(in.offset) + " does not follow previous (expected " +
                              std::to_string(expect) + ")");
    starts.push_back(in.offset);
    expect += in.size();
  }
  auto on_boundary = [&](std::int32_t t) {
    return t >= 0 && std::binary_search(starts.begin(), starts.end(), static_cast<std::uint32_t>(t));
  };
  for (const auto& in : code) {
    bool has_target = is_branch(in.op) || in.op == Opcode::tableswitch || in.op == Opcode::lookupswitch;
    if (has_target && !on_boundary(in.target))
      throw InconsistentModel("branch at offset " + std::to_string(in.offset) + " targets " + std::to_string(in.target) +
                              ", which is not an instruction boundary");
    for (const auto& [k, t] : in.cases)
      if (!on_boundary(t))
        throw InconsistentModel("switch at offset " + std::to_string(in.offset) + " targets a non-boundary");
  }
}

}  // namespace

std::vector<std::uint8_t> encode_code(const std::vector<Instr>& code) {
  check_tiling_and_targets(code);
  std::vector<std::uint8_t> o;
  for (const auto& in : code) {
    auto op = static_cast<std::uint8_t>(in.op);
    const auto& info = opcode_info(in.op);
    auto rel = [&](std::int32_t t) { return t - static_cast<std::int32_t>(in.offset); };
    if (in.wide) {
      o.push_back(0xc4);
      o.push_back(op);
      o.push_back(static_cast<std::uint8_t>(in.a >> 8));
      o.push_back(static_cast<std::uint8_t>(in.a));
      if (in.op == Opcode::iinc) {
        o.push_back(static_cast<std::uint8_t>(in.b >> 8));
        o.push_back(static_cast<std::uint8_t>(in.b));
      }
      continue;
    }
    o.push_back(op);
    switch (info.format) {
      case OperandFormat::None:
        break;
      case OperandFormat::S1:
      case OperandFormat::U1:
      case OperandFormat::Pool1:
      case OperandFormat::Local:
        if (info.format != OperandFormat::S1 && (in.a < 0 || in.a > 0xFF))
          throw InconsistentModel("operand out of range at offset " + std::to_string(in.offset));
        o.push_back(static_cast<std::uint8_t>(in.a));
        break;
      case OperandFormat::S2:
      case OperandFormat::Pool2:
        o.push_back(static_cast<std::uint8_t>(in.a >> 8));
        o.push_back(static_cast<std::uint8_t>(in.a));
        break;
      case OperandFormat::Iinc:
        o.push_back(static_cast<std::uint8_t>(in.a));
        o.push_back(static_cast<std::uint8_t>(in.b));
        break;
      case OperandFormat::Branch2: {
        auto d = rel(in.target);
        if (d < -32768 || d > 32767) throw InconsistentModel("branch offset out of 16-bit range");
        o.push_back(static_cast<std::uint8_t>(d >> 8));
        o.push_back(static_cast<std::uint8_t>(d));
        break;
      }
      case OperandFormat::Branch4:
        put_s4(o, rel(in.target));
        break;
      case OperandFormat::MultiANewArray:
        o.push_back(static_cast<std::uint8_t>(in.a >> 8));
        o.push_back(static_cast<std::uint8_t>(in.a));
        o.push_back(static_cast<std::uint8_t>(in.b));
        break;
      case OperandFormat::InvokeInterface:
        o.push_back(static_cast<std::uint8_t>(in.a >> 8));
        o.push_back(static_cast<std::uint8_t>(in.a));
        o.push_back(static_cast<std::uint8_t>(in.b));
        o.push_back(0);
        break;
      case OperandFormat::InvokeDynamic:
        o.push_back(static_cast<std::uint8_t>(in.a >> 8));
        o.push_back(static_cast<std::uint8_t>(in.a));
        o.push_back(0);
        o.push_back(0);
        break;
      case OperandFormat::TableSwitch:
        for (std::uint32_t k = 0; k < switch_pad(in.offset); ++k) o.push_back(0);
        put_s4(o, rel(in.target));
        put_s4(o, in.low);
        put_s4(o, in.low + static_cast<std::int32_t>(in.cases.size()) - 1);
        for (const auto& [k, t] : in.cases) put_s4(o, rel(t));
        break;
      case OperandFormat::LookupSwitch:
        for (std::uint32_t k = 0; k < switch_pad(in.offset); ++k) o.push_back(0);
        put_s4(o, rel(in.target));
        put_s4(o, static_cast<std::int32_t>(in.cases.size()));
        for (const auto& [k, t] : in.cases) {
          put_s4(o, k);
          put_s4(o, rel(t));
        }
        break;
      case OperandFormat::Wide:
        throw InconsistentModel("bare wide opcode in instruction list");
    }
  }
  return o;
}

void validate_code(const std::vector<Instr>& code, const ConstantPool& pool) {
  check_tiling_and_targets(code);
  try {
    for (const auto& in : code) check_pool_operand(in, pool);
  } catch (const MalformedClassfile& e) {
    throw InconsistentModel(e.what());
  }
}

void set_code(MethodEntry& method, std::vector<Instr> instrs) {
  if (!method.code) method.code.emplace();
  method.code->instrs = std::move(instrs);
  method.code->modified = true;
  method.code->attributes.clear();
}

// ---------------------------------------------------------------------------
// stack accounting

StackEffect stack_effect(const Instr& in, const ConstantPool& pool) {
  using O = Opcode;
  auto v = static_cast<std::uint8_t>(in.op);
  if (auto k = load_kind(in.op)) return {0, slot_width(*k)};
  if (auto k = store_kind(in.op)) return {slot_width(*k), 0};
  if (auto e = array_load_kind(in.op)) return {2, slot_width(elem_stack_kind(*e))};
  if (auto e = array_store_kind(in.op)) return {2 + slot_width(elem_stack_kind(*e)), 0};
  if (v >= 0x60 && v <= 0x73) {  // add..rem
    bool wide = (v - 0x60) % 4 == 1 || (v - 0x60) % 4 == 3;
    return wide ? StackEffect{4, 2} : StackEffect{2, 1};
  }
  if (v >= 0x74 && v <= 0x77) {  // neg
    int w = (v == 0x75 || v == 0x77) ? 2 : 1;
    return {w, w};
  }
  if (v >= 0x78 && v <= 0x7d) {  // shifts
    bool wide = (v - 0x78) % 2 == 1;
    return wide ? StackEffect{3, 2} : StackEffect{2, 1};
  }
  if (v >= 0x7e && v <= 0x83) {  // and/or/xor
    bool wide = (v - 0x7e) % 2 == 1;
    return wide ? StackEffect{4, 2} : StackEffect{2, 1};
  }
  switch (in.op) {
    case O::nop: return {0, 0};
    case O::aconst_null: case O::iconst_m1: case O::iconst_0: case O::iconst_1: case O::iconst_2:
    case O::iconst_3: case O::iconst_4: case O::iconst_5: case O::fconst_0: case O::fconst_1:
    case O::fconst_2: case O::bipush: case O::sipush: case O::ldc: case O::ldc_w:
      return {0, 1};
    case O::lconst_0: case O::lconst_1: case O::dconst_0: case O::dconst_1: case O::ldc2_w:
      return {0, 2};
    case O::pop: return {1, 0};
    case O::pop2: return {2, 0};
    case O::dup: return {1, 2};
    case O::dup_x1: return {2, 3};
    case O::dup_x2: return {3, 4};
    case O::dup2: return {2, 4};
    case O::dup2_x1: return {3, 5};
    case O::dup2_x2: return {4, 6};
    case O::swap: return {2, 2};
    case O::iinc: return {0, 0};
    case O::i2l: case O::i2d: case O::f2l: case O::f2d: return {1, 2};
    case O::i2f: case O::f2i: case O::i2b: case O::i2c: case O::i2s: return {1, 1};
    case O::l2i: case O::l2f: case O::d2i: case O::d2f: return {2, 1};
    case O::l2d: case O::d2l: return {2, 2};
    case O::lcmp: case O::dcmpl: case O::dcmpg: return {4, 1};
    case O::fcmpl: case O::fcmpg: return {2, 1};
    case O::ifeq: case O::ifne: case O::iflt: case O::ifge: case O::ifgt: case O::ifle:
    case O::ifnull: case O::ifnonnull:
      return {1, 0};
    case O::if_icmpeq: case O::if_icmpne: case O::if_icmplt: case O::if_icmpge: case O::if_icmpgt:
    case O::if_icmple: case O::if_acmpeq: case O::if_acmpne:
      return {2, 0};
    case O::goto_: case O::goto_w: return {0, 0};
    case O::jsr: case O::jsr_w: return {0, 1};
    case O::ret: return {0, 0};
    case O::tableswitch: case O::lookupswitch: return {1, 0};
    case O::ireturn: case O::freturn: case O::areturn: return {1, 0};
    case O::lreturn: case O::dreturn: return {2, 0};
    case O::return_: return {0, 0};
    case O::getstatic: return {0, slot_width(descriptor_kind(pool.member_ref(in.a).descriptor))};
    case O::putstatic: return {slot_width(descriptor_kind(pool.member_ref(in.a).descriptor)), 0};
    case O::getfield: return {1, slot_width(descriptor_kind(pool.member_ref(in.a).descriptor))};
    case O::putfield: return {1 + slot_width(descriptor_kind(pool.member_ref(in.a).descriptor)), 0};
    case O::invokevirtual: case O::invokespecial: case O::invokestatic: case O::invokeinterface: {
      auto sig = parse_method_descriptor(pool.member_ref(in.a).descriptor);
      return {sig.arg_slots(in.op == O::invokestatic), slot_width(descriptor_kind(sig.ret))};
    }
    case O::invokedynamic: {
      const auto& e = pool.at(static_cast<std::uint16_t>(in.a));
      auto sig = parse_method_descriptor(pool.name_and_type(e.b).second);
      return {sig.arg_slots(true), slot_width(descriptor_kind(sig.ret))};
    }
    case O::new_: return {0, 1};
    case O::newarray: case O::anewarray: case O::arraylength: case O::checkcast: case O::instanceof:
      return {1, 1};
    case O::athrow: case O::monitorenter: case O::monitorexit: return {1, 0};
    case O::multianewarray: return {in.b, 1};
    default: break;
  }
  throw InconsistentModel("no stack effect for opcode " + std::string(opcode_info(in.op).name));
}

int compute_max_stack(const std::vector<Instr>& code, const ConstantPool& pool,
                      const std::vector<ExceptionEntry>& handlers) {
  if (code.empty()) return 0;
  std::vector<int> depth(code.size(), -1);
  std::vector<std::size_t> work;
  auto index_of = [&](std::int32_t off) -> std::size_t {
    auto it = std::lower_bound(code.begin(), code.end(), off,
                               [](const Instr& in, std::int32_t o) { return static_cast<std::int32_t>(in.offset) < o; });
    if (it == code.end() || static_cast<std::int32_t>(it->offset) != off)
      throw InconsistentModel("branch target " + std::to_string(off) + " is not an instruction boundary");
    return static_cast<std::size_t>(it - code.begin());
  };
  auto flow = [&](std::size_t i, int d) {
    if (depth[i] < 0) {
      depth[i] = d;
      work.push_back(i);
    } else if (depth[i] != d) {
      throw InconsistentModel("inconsistent stack depth at offset " + std::to_string(code[i].offset));
    }
  };
  flow(0, 0);
  for (const auto& h : handlers) flow(index_of(h.handler_pc), 1);
  int max_depth = 0;
  while (!work.empty()) {
    auto i = work.back();
    work.pop_back();
    const auto& in = code[i];
    auto eff = stack_effect(in, pool);
    if (depth[i] < eff.pops)
      throw InconsistentModel("stack underflow at offset " + std::to_string(in.offset));
    int after = depth[i] - eff.pops + eff.pushes;
    max_depth = std::max({max_depth, after, depth[i]});
    if (is_branch(in.op) || in.op == Opcode::tableswitch || in.op == Opcode::lookupswitch) {
      flow(index_of(in.target), after);
      for (const auto& [k, t] : in.cases) flow(index_of(t), after);
    }
    if (!ends_block(in.op) && in.op != Opcode::jsr && in.op != Opcode::jsr_w) {
      if (i + 1 >= code.size()) throw InconsistentModel("control falls off the end of the code");
      flow(i + 1, after);
    }
  }
  return max_depth;
}

int compute_max_locals(const std::vector<Instr>& code, std::string_view descriptor, bool is_static) {
  int n = parse_method_descriptor(descriptor).arg_slots(is_static);
  for (const auto& in : code) {
    auto slot = in.local_slot();
    if (!slot) continue;
    int width = 1;
    if (auto k = load_kind(in.op)) width = slot_width(*k);
    if (auto k = store_kind(in.op)) width = slot_width(*k);
    n = std::max(n, *slot + width);
  }
  return n;
}

// ---------------------------------------------------------------------------
// class parse / emit

namespace {

std::vector<Attribute> read_attributes(Reader& r, const ConstantPool& pool) {
  std::vector<Attribute> out;
  auto n = r.u2();
  for (std::uint16_t i = 0; i < n; ++i) {
    Attribute a;
    a.name_index = r.u2();
    pool.expect(a.name_index, CpTag::Utf8);
    auto len = r.u4();
    a.data = r.bytes(len);
    out.push_back(std::move(a));
  }
  return out;
}

CodeAttribute read_code(std::uint16_t name_index, std::span<const std::uint8_t> data, const ConstantPool& pool) {
  Reader r(data);
  CodeAttribute c;
  c.name_index = name_index;
  c.max_stack = r.u2();
  c.max_locals = r.u2();
  auto len = r.u4();
  if (len == 0) throw MalformedClassfile("empty code array");
  c.bytes = r.bytes(len);
  c.instrs = decode_code(c.bytes);
  try {
    check_tiling_and_targets(c.instrs);
  } catch (const InconsistentModel& e) {
    throw MalformedClassfile(e.what());
  }
  for (const auto& in : c.instrs) check_pool_operand(in, pool);
  auto n = r.u2();
  for (std::uint16_t i = 0; i < n; ++i) {
    ExceptionEntry e;
    e.start_pc = r.u2();
    e.end_pc = r.u2();
    e.handler_pc = r.u2();
    e.catch_type = r.u2();
    if (e.catch_type) pool.expect(e.catch_type, CpTag::Class);
    if (e.start_pc >= e.end_pc || e.end_pc > len || e.handler_pc >= len)
      throw MalformedClassfile("exception table entry out of range");
    c.exception_table.push_back(e);
  }
  c.attributes = read_attributes(r, pool);
  if (!r.done()) throw MalformedClassfile("trailing bytes in Code attribute");
  return c;
}

void write_attributes(Writer& w, const std::vector<Attribute>& attrs) {
  w.u2(static_cast<std::uint32_t>(attrs.size()));
  for (const auto& a : attrs) {
    w.u2(a.name_index);
    w.u4(static_cast<std::uint32_t>(a.data.size()));
    w.bytes(a.data);
  }
}

std::vector<std::uint8_t> write_code(const CodeAttribute& c, const ConstantPool& pool, const MethodEntry& m) {
  Writer w;
  std::vector<std::uint8_t> code_bytes;
  std::uint16_t max_stack = c.max_stack, max_locals = c.max_locals;
  const std::vector<Attribute>* attrs = &c.attributes;
  static const std::vector<Attribute> kNone;
  if (c.modified) {
    validate_code(c.instrs, pool);
    code_bytes = encode_code(c.instrs);
    auto ms = compute_max_stack(c.instrs, pool, c.exception_table);
    auto ml = compute_max_locals(c.instrs, pool.utf8(m.descriptor_index), m.is_static());
    max_stack = static_cast<std::uint16_t>(ms);
    max_locals = static_cast<std::uint16_t>(std::max<int>(ml, c.max_locals));
    attrs = &kNone;
  }
  const auto& bytes = c.modified ? code_bytes : c.bytes;
  if (bytes.empty() || bytes.size() > 65535) throw InconsistentModel("code length out of range");
  w.u2(max_stack);
  w.u2(max_locals);
  w.u4(static_cast<std::uint32_t>(bytes.size()));
  w.bytes(bytes);
  w.u2(static_cast<std::uint32_t>(c.exception_table.size()));
  for (const auto& e : c.exception_table) {
    w.u2(e.start_pc);
    w.u2(e.end_pc);
    w.u2(e.handler_pc);
    w.u2(e.catch_type);
  }
  write_attributes(w, *attrs);
  return std::move(w.out());
}

}  // namespace

ClassModel parse_class(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  ClassModel m;
  m.magic = r.u4();
  if (m.magic != kClassMagic) throw MalformedClassfile("bad magic number");
  m.minor_version = r.u2();
  m.major_version = r.u2();
  if (m.major_version < kMinMajorVersion || m.major_version > kMaxMajorVersion)
    throw UnsupportedVersion("class version " + std::to_string(m.major_version) + "." +
                             std::to_string(m.minor_version) + " outside supported range " +
                             std::to_string(kMinMajorVersion) + "-" + std::to_string(kMaxMajorVersion));
  auto count = r.u2();
  if (count == 0) throw MalformedClassfile("constant pool count is zero");
  for (std::uint16_t i = 1; i < count; ++i) {
    CpEntry e;
    e.tag = static_cast<CpTag>(r.u1());
    switch (e.tag) {
      case CpTag::Utf8: {
        auto len = r.u2();
        auto b = r.bytes(len);
        e.utf8.assign(b.begin(), b.end());
        break;
      }
      case CpTag::Integer:
      case CpTag::Float:
        e.bits = r.u4();
        break;
      case CpTag::Long:
      case CpTag::Double: {
        std::uint64_t hi = r.u4();
        e.bits = (hi << 32) | r.u4();
        if (i + 1 >= count) throw MalformedClassfile("wide constant in last pool slot");
        ++i;
        break;
      }
      case CpTag::Class:
      case CpTag::String:
      case CpTag::MethodType:
      case CpTag::Module:
      case CpTag::Package:
        e.a = r.u2();
        break;
      case CpTag::Fieldref:
      case CpTag::Methodref:
      case CpTag::InterfaceMethodref:
      case CpTag::NameAndType:
      case CpTag::Dynamic:
      case CpTag::InvokeDynamic:
        e.a = r.u2();
        e.b = r.u2();
        break;
      case CpTag::MethodHandle:
        e.ref_kind = r.u1();
        e.a = r.u2();
        break;
      default:
        throw MalformedClassfile("unknown constant pool tag " + std::to_string(static_cast<int>(e.tag)) +
                                 " at index " + std::to_string(i));
    }
    m.pool.append(std::move(e));
  }
  validate_pool(m.pool);

  m.access_flags = r.u2();
  m.this_class = r.u2();
  m.pool.expect(m.this_class, CpTag::Class);
  m.super_class = r.u2();
  if (m.super_class) m.pool.expect(m.super_class, CpTag::Class);
  auto n_if = r.u2();
  for (std::uint16_t i = 0; i < n_if; ++i) {
    auto idx = r.u2();
    m.pool.expect(idx, CpTag::Class);
    m.interfaces.push_back(idx);
  }

  auto n_fields = r.u2();
  for (std::uint16_t i = 0; i < n_fields; ++i) {
    FieldEntry f;
    f.access = r.u2();
    f.name_index = r.u2();
    f.descriptor_index = r.u2();
    m.pool.expect(f.name_index, CpTag::Utf8);
    m.pool.expect(f.descriptor_index, CpTag::Utf8);
    f.attributes = read_attributes(r, m.pool);
    m.fields.push_back(std::move(f));
  }

  auto n_methods = r.u2();
  for (std::uint16_t i = 0; i < n_methods; ++i) {
    MethodEntry me;
    me.access = r.u2();
    me.name_index = r.u2();
    me.descriptor_index = r.u2();
    m.pool.expect(me.name_index, CpTag::Utf8);
    parse_method_descriptor(m.pool.expect(me.descriptor_index, CpTag::Utf8).utf8);
    auto attrs = read_attributes(r, m.pool);
    for (auto& a : attrs) {
      if (m.pool.utf8(a.name_index) == "Code") {
        if (me.code) throw MalformedClassfile("duplicate Code attribute");
        me.code = read_code(a.name_index, a.data, m.pool);
        me.code_position = me.attributes.size();
      } else {
        me.attributes.push_back(std::move(a));
      }
    }
    m.methods.push_back(std::move(me));
  }
  m.attributes = read_attributes(r, m.pool);
  if (!r.done()) throw MalformedClassfile("trailing bytes after class attributes");
  return m;
}

std::vector<std::uint8_t> emit_class(const ClassModel& m) {
  Writer w;
  const auto& pool = m.pool;
  auto check = [&](auto&& fn) {
    try {
      fn();
    } catch (const MalformedClassfile& e) {
      throw InconsistentModel(e.what());
    }
  };
  check([&] {
    validate_pool(pool);
    pool.expect(m.this_class, CpTag::Class);
    if (m.super_class) pool.expect(m.super_class, CpTag::Class);
    for (auto i : m.interfaces) pool.expect(i, CpTag::Class);
  });

  w.u4(m.magic);
  w.u2(m.minor_version);
  w.u2(m.major_version);
  w.u2(pool.count());
  const auto& es = pool.entries();
  for (std::size_t i = 1; i < es.size(); ++i) {
    const auto& e = es[i];
    if (e.tag == CpTag::Unusable) continue;
    w.u1(static_cast<std::uint8_t>(e.tag));
    switch (e.tag) {
      case CpTag::Utf8:
        if (e.utf8.size() > 0xFFFF) throw InconsistentModel("Utf8 constant too long");
        w.u2(static_cast<std::uint32_t>(e.utf8.size()));
        w.bytes(std::span(reinterpret_cast<const std::uint8_t*>(e.utf8.data()), e.utf8.size()));
        break;
      case CpTag::Integer:
      case CpTag::Float:
        w.u4(static_cast<std::uint32_t>(e.bits));
        break;
      case CpTag::Long:
      case CpTag::Double:
        w.u4(static_cast<std::uint32_t>(e.bits >> 32));
        w.u4(static_cast<std::uint32_t>(e.bits));
        break;
      case CpTag::Class:
      case CpTag::String:
      case CpTag::MethodType:
      case CpTag::Module:
      case CpTag::Package:
        w.u2(e.a);
        break;
      case CpTag::MethodHandle:
        w.u1(e.ref_kind);
        w.u2(e.a);
        break;
      default:
        w.u2(e.a);
        w.u2(e.b);
        break;
    }
  }
  w.u2(m.access_flags);
  w.u2(m.this_class);
  w.u2(m.super_class);
  w.u2(static_cast<std::uint32_t>(m.interfaces.size()));
  for (auto i : m.interfaces) w.u2(i);

  w.u2(static_cast<std::uint32_t>(m.fields.size()));
  for (const auto& f : m.fields) {
    check([&] {
      pool.expect(f.name_index, CpTag::Utf8);
      pool.expect(f.descriptor_index, CpTag::Utf8);
    });
    w.u2(f.access);
    w.u2(f.name_index);
    w.u2(f.descriptor_index);
    write_attributes(w, f.attributes);
  }

  w.u2(static_cast<std::uint32_t>(m.methods.size()));
  for (const auto& me : m.methods) {
    check([&] {
      pool.expect(me.name_index, CpTag::Utf8);
      pool.expect(me.descriptor_index, CpTag::Utf8);
    });
    w.u2(me.access);
    w.u2(me.name_index);
    w.u2(me.descriptor_index);
    std::vector<Attribute> attrs = me.attributes;
    if (me.code) {
      Attribute code;
      code.name_index = me.code->name_index;
      if (!pool.valid(code.name_index) || pool.at(code.name_index).tag != CpTag::Utf8 ||
          pool.utf8(code.name_index) != "Code")
        throw InconsistentModel("Code attribute name index does not name \"Code\"");
      code.data = write_code(*me.code, pool, me);
      auto pos = std::min(me.code_position, attrs.size());
      attrs.insert(attrs.begin() + static_cast<std::ptrdiff_t>(pos), std::move(code));
    }
    write_attributes(w, attrs);
  }
  write_attributes(w, m.attributes);
  return std::move(w.out());
}

// ---------------------------------------------------------------------------

const MethodEntry* ClassModel::find_method(std::string_view name, std::string_view desc) const {
  for (const auto& m : methods)
    if (pool.utf8(m.name_index) == name && pool.utf8(m.descriptor_index) == desc) return &m;
  return nullptr;
}

MethodEntry* ClassModel::find_method(std::string_view name, std::string_view desc) {
  for (auto& m : methods)
    if (pool.utf8(m.name_index) == name && pool.utf8(m.descriptor_index) == desc) return &m;
  return nullptr;
}

const MethodEntry& ClassModel::method_by_name(std::string_view name) const {
  const MethodEntry* hit = nullptr;
  for (const auto& m : methods) {
    if (pool.utf8(m.name_index) != name) continue;
    if (hit) throw NoSuchMethod("method name '" + std::string(name) + "' is overloaded; give a descriptor");
    hit = &m;
  }
  if (!hit) throw NoSuchMethod(std::string(name));
  return *hit;
}

const FieldEntry* ClassModel::find_field(std::string_view name) const {
  for (const auto& f : fields)
    if (pool.utf8(f.name_index) == name) return &f;
  return nullptr;
}

const std::vector<Instr>& get_code(const ClassModel& model, std::string_view name, std::string_view desc) {
  const auto* m = model.find_method(name, desc);
  if (!m) throw NoSuchMethod(std::string(name) + std::string(desc));
  if (!m->code) throw AbstractMethod(std::string(name) + std::string(desc) + " has no code");
  return m->code->instrs;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace bcpar
