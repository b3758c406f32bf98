#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bcpar {

// X(name, value, length, operand-format, supported)
//   length 0 marks variable-length instructions (switches, wide).
#define BCPAR_OPCODES(X)                          \
  X(nop, 0x00, 1, None, true)                     \
  X(aconst_null, 0x01, 1, None, true)             \
  X(iconst_m1, 0x02, 1, None, true)               \
  X(iconst_0, 0x03, 1, None, true)                \
  X(iconst_1, 0x04, 1, None, true)                \
  X(iconst_2, 0x05, 1, None, true)                \
  X(iconst_3, 0x06, 1, None, true)                \
  X(iconst_4, 0x07, 1, None, true)                \
  X(iconst_5, 0x08, 1, None, true)                \
  X(lconst_0, 0x09, 1, None, true)                \
  X(lconst_1, 0x0a, 1, None, true)                \
  X(fconst_0, 0x0b, 1, None, true)                \
  X(fconst_1, 0x0c, 1, None, true)                \
  X(fconst_2, 0x0d, 1, None, true)                \
  X(dconst_0, 0x0e, 1, None, true)                \
  X(dconst_1, 0x0f, 1, None, true)                \
  X(bipush, 0x10, 2, S1, true)                    \
  X(sipush, 0x11, 3, S2, true)                    \
  X(ldc, 0x12, 2, Pool1, true)                    \
  X(ldc_w, 0x13, 3, Pool2, true)                  \
  X(ldc2_w, 0x14, 3, Pool2, true)                 \
  X(iload, 0x15, 2, Local, true)                  \
  X(lload, 0x16, 2, Local, true)                  \
  X(fload, 0x17, 2, Local, true)                  \
  X(dload, 0x18, 2, Local, true)                  \
  X(aload, 0x19, 2, Local, true)                  \
  X(iload_0, 0x1a, 1, None, true)                 \
  X(iload_1, 0x1b, 1, None, true)                 \
  X(iload_2, 0x1c, 1, None, true)                 \
  X(iload_3, 0x1d, 1, None, true)                 \
  X(lload_0, 0x1e, 1, None, true)                 \
  X(lload_1, 0x1f, 1, None, true)                 \
  X(lload_2, 0x20, 1, None, true)                 \
  X(lload_3, 0x21, 1, None, true)                 \
  X(fload_0, 0x22, 1, None, true)                 \
  X(fload_1, 0x23, 1, None, true)                 \
  X(fload_2, 0x24, 1, None, true)                 \
  X(fload_3, 0x25, 1, None, true)                 \
  X(dload_0, 0x26, 1, None, true)                 \
  X(dload_1, 0x27, 1, None, true)                 \
  X(dload_2, 0x28, 1, None, true)                 \
  X(dload_3, 0x29, 1, None, true)                 \
  X(aload_0, 0x2a, 1, None, true)                 \
  X(aload_1, 0x2b, 1, None, true)                 \
  X(aload_2, 0x2c, 1, None, true)                 \
  X(aload_3, 0x2d, 1, None, true)                 \
  X(iaload, 0x2e, 1, None, true)                  \
  X(laload, 0x2f, 1, None, true)                  \
  X(faload, 0x30, 1, None, true)                  \
  X(daload, 0x31, 1, None, true)                  \
  X(aaload, 0x32, 1, None, true)                  \
  X(baload, 0x33, 1, None, true)                  \
  X(caload, 0x34, 1, None, true)                  \
  X(saload, 0x35, 1, None, true)                  \
  X(istore, 0x36, 2, Local, true)                 \
  X(lstore, 0x37, 2, Local, true)                 \
  X(fstore, 0x38, 2, Local, true)                 \
  X(dstore, 0x39, 2, Local, true)                 \
  X(astore, 0x3a, 2, Local, true)                 \
  X(istore_0, 0x3b, 1, None, true)                \
  X(istore_1, 0x3c, 1, None, true)                \
  X(istore_2, 0x3d, 1, None, true)                \
  X(istore_3, 0x3e, 1, None, true)                \
  X(lstore_0, 0x3f, 1, None, true)                \
  X(lstore_1, 0x40, 1, None, true)                \
  X(lstore_2, 0x41, 1, None, true)                \
  X(lstore_3, 0x42, 1, None, true)                \
  X(fstore_0, 0x43, 1, None, true)                \
  X(fstore_1, 0x44, 1, None, true)                \
  X(fstore_2, 0x45, 1, None, true)                \
  X(fstore_3, 0x46, 1, None, true)                \
  X(dstore_0, 0x47, 1, None, true)                \
  X(dstore_1, 0x48, 1, None, true)                \
  X(dstore_2, 0x49, 1, None, true)                \
  X(dstore_3, 0x4a, 1, None, true)                \
  X(astore_0, 0x4b, 1, None, true)                \
  X(astore_1, 0x4c, 1, None, true)                \
  X(astore_2, 0x4d, 1, None, true)                \
  X(astore_3, 0x4e, 1, None, true)                \
  X(iastore, 0x4f, 1, None, true)                 \
  X(lastore, 0x50, 1, None, true)                 \
  X(fastore, 0x51, 1, None, true)                 \
  X(dastore, 0x52, 1, None, true)                 \
  X(aastore, 0x53, 1, None, true)                 \
  X(bastore, 0x54, 1, None, true)                 \
  X(castore, 0x55, 1, None, true)                 \
  X(sastore, 0x56, 1, None, true)                 \
  X(pop, 0x57, 1, None, true)                     \
  X(pop2, 0x58, 1, None, true)                    \
  X(dup, 0x59, 1, None, true)                     \
  X(dup_x1, 0x5a, 1, None, true)                  \
  X(dup_x2, 0x5b, 1, None, true)                  \
  X(dup2, 0x5c, 1, None, true)                    \
  X(dup2_x1, 0x5d, 1, None, true)                 \
  X(dup2_x2, 0x5e, 1, None, true)                 \
  X(swap, 0x5f, 1, None, true)                    \
  X(iadd, 0x60, 1, None, true)                    \
  X(ladd, 0x61, 1, None, true)                    \
  X(fadd, 0x62, 1, None, true)                    \
  X(dadd, 0x63, 1, None, true)                    \
  X(isub, 0x64, 1, None, true)                    \
  X(lsub, 0x65, 1, None, true)                    \
  X(fsub, 0x66, 1, None, true)                    \
  X(dsub, 0x67, 1, None, true)                    \
  X(imul, 0x68, 1, None, true)                    \
  X(lmul, 0x69, 1, None, true)                    \
  X(fmul, 0x6a, 1, None, true)                    \
  X(dmul, 0x6b, 1, None, true)                    \
  X(idiv, 0x6c, 1, None, true)                    \
  X(ldiv, 0x6d, 1, None, true)                    \
  X(fdiv, 0x6e, 1, None, true)                    \
  X(ddiv, 0x6f, 1, None, true)                    \
  X(irem, 0x70, 1, None, true)                    \
  X(lrem, 0x71, 1, None, true)                    \
  X(frem, 0x72, 1, None, true)                    \
  X(drem, 0x73, 1, None, true)                    \
  X(ineg, 0x74, 1, None, true)                    \
  X(lneg, 0x75, 1, None, true)                    \
  X(fneg, 0x76, 1, None, true)                    \
  X(dneg, 0x77, 1, None, true)                    \
  X(ishl, 0x78, 1, None, true)                    \
  X(lshl, 0x79, 1, None, true)                    \
  X(ishr, 0x7a, 1, None, true)                    \
  X(lshr, 0x7b, 1, None, true)                    \
  X(iushr, 0x7c, 1, None, true)                   \
  X(lushr, 0x7d, 1, None, true)                   \
  X(iand, 0x7e, 1, None, true)                    \
  X(land, 0x7f, 1, None, true)                    \
  X(ior, 0x80, 1, None, true)                     \
  X(lor, 0x81, 1, None, true)                     \
  X(ixor, 0x82, 1, None, true)                    \
  X(lxor, 0x83, 1, None, true)                    \
  X(iinc, 0x84, 3, Iinc, true)                    \
  X(i2l, 0x85, 1, None, true)                     \
  X(i2f, 0x86, 1, None, true)                     \
  X(i2d, 0x87, 1, None, true)                     \
  X(l2i, 0x88, 1, None, true)                     \
  X(l2f, 0x89, 1, None, true)                     \
  X(l2d, 0x8a, 1, None, true)                     \
  X(f2i, 0x8b, 1, None, true)                     \
  X(f2l, 0x8c, 1, None, true)                     \
  X(f2d, 0x8d, 1, None, true)                     \
  X(d2i, 0x8e, 1, None, true)                     \
  X(d2l, 0x8f, 1, None, true)                     \
  X(d2f, 0x90, 1, None, true)                     \
  X(i2b, 0x91, 1, None, true)                     \
  X(i2c, 0x92, 1, None, true)                     \
  X(i2s, 0x93, 1, None, true)                     \
  X(lcmp, 0x94, 1, None, true)                    \
  X(fcmpl, 0x95, 1, None, true)                   \
  X(fcmpg, 0x96, 1, None, true)                   \
  X(dcmpl, 0x97, 1, None, true)                   \
  X(dcmpg, 0x98, 1, None, true)                   \
  X(ifeq, 0x99, 3, Branch2, true)                 \
  X(ifne, 0x9a, 3, Branch2, true)                 \
  X(iflt, 0x9b, 3, Branch2, true)                 \
  X(ifge, 0x9c, 3, Branch2, true)                 \
  X(ifgt, 0x9d, 3, Branch2, true)                 \
  X(ifle, 0x9e, 3, Branch2, true)                 \
  X(if_icmpeq, 0x9f, 3, Branch2, true)            \
  X(if_icmpne, 0xa0, 3, Branch2, true)            \
  X(if_icmplt, 0xa1, 3, Branch2, true)            \
  X(if_icmpge, 0xa2, 3, Branch2, true)            \
  X(if_icmpgt, 0xa3, 3, Branch2, true)            \
  X(if_icmple, 0xa4, 3, Branch2, true)            \
  X(if_acmpeq, 0xa5, 3, Branch2, true)            \
  X(if_acmpne, 0xa6, 3, Branch2, true)            \
  X(goto_, 0xa7, 3, Branch2, true)                \
  X(jsr, 0xa8, 3, Branch2, false)                 \
  X(ret, 0xa9, 2, Local, false)                   \
  X(tableswitch, 0xaa, 0, TableSwitch, false)     \
  X(lookupswitch, 0xab, 0, LookupSwitch, false)   \
  X(ireturn, 0xac, 1, None, true)                 \
  X(lreturn, 0xad, 1, None, true)                 \
  X(freturn, 0xae, 1, None, true)                 \
  X(dreturn, 0xaf, 1, None, true)                 \
  X(areturn, 0xb0, 1, None, true)                 \
  X(return_, 0xb1, 1, None, true)                 \
  X(getstatic, 0xb2, 3, Pool2, true)              \
  X(putstatic, 0xb3, 3, Pool2, true)              \
  X(getfield, 0xb4, 3, Pool2, true)               \
  X(putfield, 0xb5, 3, Pool2, true)               \
  X(invokevirtual, 0xb6, 3, Pool2, true)          \
  X(invokespecial, 0xb7, 3, Pool2, true)          \
  X(invokestatic, 0xb8, 3, Pool2, true)           \
  X(invokeinterface, 0xb9, 5, InvokeInterface, false) \
  X(invokedynamic, 0xba, 5, InvokeDynamic, false) \
  X(new_, 0xbb, 3, Pool2, true)                   \
  X(newarray, 0xbc, 2, U1, true)                  \
  X(anewarray, 0xbd, 3, Pool2, true)              \
  X(arraylength, 0xbe, 1, None, true)             \
  X(athrow, 0xbf, 1, None, false)                 \
  X(checkcast, 0xc0, 3, Pool2, false)             \
  X(instanceof, 0xc1, 3, Pool2, false)            \
  X(monitorenter, 0xc2, 1, None, false)           \
  X(monitorexit, 0xc3, 1, None, false)            \
  X(wide, 0xc4, 0, Wide, false)                   \
  X(multianewarray, 0xc5, 4, MultiANewArray, true) \
  X(ifnull, 0xc6, 3, Branch2, true)               \
  X(ifnonnull, 0xc7, 3, Branch2, true)            \
  X(goto_w, 0xc8, 5, Branch4, false)              \
  X(jsr_w, 0xc9, 5, Branch4, false)

enum class Opcode : std::uint8_t {
#define BCPAR_X(name, value, len, fmt, sup) name = value,
  BCPAR_OPCODES(BCPAR_X)
#undef BCPAR_X
};

enum class OperandFormat : std::uint8_t {
  None,
  S1,
  S2,
  U1,
  Pool1,
  Pool2,
  Local,
  Iinc,
  Branch2,
  Branch4,
  TableSwitch,
  LookupSwitch,
  InvokeInterface,
  InvokeDynamic,
  MultiANewArray,
  Wide,
};

struct OpcodeInfo {
  std::string_view name;
  std::uint8_t length;  // 0 = variable
  OperandFormat format;
  bool supported;       // inside the declared transformable subset
  bool defined;
};

const OpcodeInfo& opcode_info(Opcode op);
const OpcodeInfo& opcode_info(std::uint8_t raw);
std::optional<Opcode> opcode_from_name(std::string_view name);

/// Value category of primitive/reference kinds as they appear on the JVM stack.
enum class Kind : std::uint8_t { Int, Long, Float, Double, Ref, Void };

/// Storage kinds for array elements (byte/boolean share `Byte`).
enum class ElemKind : std::uint8_t { Int, Long, Float, Double, Ref, Byte, Char, Short };

inline int slot_width(Kind k) { return (k == Kind::Long || k == Kind::Double) ? 2 : (k == Kind::Void ? 0 : 1); }
Kind elem_stack_kind(ElemKind e);
char kind_char(Kind k);

bool is_branch(Opcode op);
bool is_conditional_branch(Opcode op);
bool is_return(Opcode op);
bool ends_block(Opcode op);  // goto, returns, athrow, switches

/// For xload/xstore families (including _n forms): the value kind moved.
std::optional<Kind> load_kind(Opcode op);
std::optional<Kind> store_kind(Opcode op);
/// Implicit slot of the _n forms (iload_2 -> 2); nullopt otherwise.
std::optional<int> implicit_slot(Opcode op);
std::optional<ElemKind> array_load_kind(Opcode op);
std::optional<ElemKind> array_store_kind(Opcode op);

Opcode load_op(Kind k);
Opcode store_op(Kind k);
Opcode array_load_op(ElemKind e);
Opcode array_store_op(ElemKind e);
Opcode return_op(Kind k);

/// Kind of a field/method descriptor element ("I", "[D", "Ljava/lang/Object;").
Kind descriptor_kind(std::string_view desc);
ElemKind descriptor_elem_kind(std::string_view elem_desc);
/// Parses "(args)ret" into parameter descriptors and the return descriptor.
struct MethodSignature {
  std::vector<std::string> params;
  std::string ret;
  int arg_slots(bool is_static) const;
};
MethodSignature parse_method_descriptor(std::string_view desc);

}  // namespace bcpar
