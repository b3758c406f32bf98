#include "kernels.hpp"

#include <limits>
#include <random>

#include "bcpar/decompile.hpp"
#include "bcpar/loopx.hpp"
#include "bcpar/parcodegen.hpp"

namespace bcpar::testkit {

namespace {

constexpr std::uint16_t kPubStatic = access::kPublic | access::kStatic;

void math(CodeBuilder& c, const char* name, const char* desc) {
  c.invoke(Opcode::invokestatic, "java/lang/Math", name, desc);
}

}  // namespace

Opcode negate_branch(Opcode op) {
  switch (op) {
    case Opcode::if_icmpge: return Opcode::if_icmplt;
    case Opcode::if_icmplt: return Opcode::if_icmpge;
    case Opcode::if_icmpgt: return Opcode::if_icmple;
    case Opcode::if_icmple: return Opcode::if_icmpgt;
    default: throw std::invalid_argument("not a loop comparison");
  }
}

void emit_for(CodeBuilder& c, const ForLoop& l, const Emit& body) {
  l.init();
  c.store(Kind::Int, l.ivar);
  Label cond = c.new_label();
  if (l.bottom) {
    Label top = c.new_label();
    c.jump(cond);
    c.bind(top);
    body();
    c.iinc(l.ivar, l.step);
    c.bind(cond);
    c.load(Kind::Int, l.ivar);
    l.bound();
    c.branch(negate_branch(l.exit), top);
    return;
  }
  Label out = c.new_label();
  c.bind(cond);
  c.load(Kind::Int, l.ivar);
  l.bound();
  c.branch(l.exit, out);
  body();
  c.iinc(l.ivar, l.step);
  c.jump(cond);
  c.bind(out);
}

// ------------------------------------------------------------------ MatMul

ClassModel matmul_class() {
  ClassBuilder b("MatMul");
  b.add_default_constructor();
  CodeBuilder c(b.pool());
  // a0 b1 n2 m3 p4 c5 i6 j7 k8
  c.load(Kind::Ref, 0);
  c.op(Opcode::arraylength);
  c.store(Kind::Int, 2);
  c.load(Kind::Ref, 1);
  c.push_int(0);
  c.array_load(ElemKind::Ref);
  c.op(Opcode::arraylength);
  c.store(Kind::Int, 3);
  c.load(Kind::Ref, 1);
  c.op(Opcode::arraylength);
  c.store(Kind::Int, 4);
  c.load(Kind::Int, 2);
  c.load(Kind::Int, 3);
  c.multi_new_array("[[D", 2);
  c.store(Kind::Ref, 5);
  auto zero = [&] { c.push_int(0); };
  emit_for(c, {6, zero, [&] { c.load(Kind::Int, 2); }}, [&] {
    emit_for(c, {7, zero, [&] { c.load(Kind::Int, 3); }}, [&] {
      emit_for(c, {8, zero, [&] { c.load(Kind::Int, 4); }}, [&] {
        // c[i][j] += a[i][k] * b[k][j];
        c.load(Kind::Ref, 5);
        c.load(Kind::Int, 6);
        c.array_load(ElemKind::Ref);
        c.load(Kind::Int, 7);
        c.op(Opcode::dup2);
        c.array_load(ElemKind::Double);
        c.load(Kind::Ref, 0);
        c.load(Kind::Int, 6);
        c.array_load(ElemKind::Ref);
        c.load(Kind::Int, 8);
        c.array_load(ElemKind::Double);
        c.load(Kind::Ref, 1);
        c.load(Kind::Int, 8);
        c.array_load(ElemKind::Ref);
        c.load(Kind::Int, 7);
        c.array_load(ElemKind::Double);
        c.op(Opcode::dmul);
        c.op(Opcode::dadd);
        c.array_store(ElemKind::Double);
      });
    });
  });
  c.load(Kind::Ref, 5);
  c.ret(Kind::Ref);
  b.add_method(kPubStatic, "multiply", "([[D[[D)[[D", c.finish());
  return std::move(b).build();
}

// --------------------------------------------------------------- Histogram

ClassModel histogram_class() {
  ClassBuilder b("Histogram");
  b.add_default_constructor();
  CodeBuilder c(b.pool());
  // data0 hist1 n2 i3; older goto-to-condition layout
  emit_for(c, {3, [&] { c.push_int(0); }, [&] { c.load(Kind::Int, 2); }, Opcode::if_icmpge, 1, true}, [&] {
    c.load(Kind::Ref, 1);
    c.load(Kind::Ref, 0);
    c.load(Kind::Int, 3);
    c.array_load(ElemKind::Int);
    c.op(Opcode::dup2);
    c.array_load(ElemKind::Int);
    c.push_int(1);
    c.op(Opcode::iadd);
    c.array_store(ElemKind::Int);
  });
  c.ret(Kind::Void);
  b.add_method(kPubStatic, "histogram", "([I[II)V", c.finish());
  return std::move(b).build();
}

// ------------------------------------------------------------------- NBody

ClassModel nbody_class() {
  ClassBuilder b("NBody");
  b.add_default_constructor();
  CodeBuilder c(b.pool());
  // x0 y1 vx2 vy3 m4 steps5 dt6 n8 t9 i10 ax11 ay13 j15 dx16 dy18 d2 20 inv22
  auto zero = [&] { c.push_int(0); };
  auto n = [&] { c.load(Kind::Int, 8); };
  auto dl = [&](int s) { c.load(Kind::Double, s); };
  auto elem = [&](int arr, int idx) {
    c.load(Kind::Ref, arr);
    c.load(Kind::Int, idx);
    c.array_load(ElemKind::Double);
  };
  // arr[i] += dt * v
  auto kick = [&](int arr, const Emit& v) {
    c.load(Kind::Ref, arr);
    c.load(Kind::Int, 10);
    c.op(Opcode::dup2);
    c.array_load(ElemKind::Double);
    dl(6);
    v();
    c.op(Opcode::dmul);
    c.op(Opcode::dadd);
    c.array_store(ElemKind::Double);
  };
  c.load(Kind::Ref, 0);
  c.op(Opcode::arraylength);
  c.store(Kind::Int, 8);
  emit_for(c, {9, zero, [&] { c.load(Kind::Int, 5); }}, [&] {
    emit_for(c, {10, zero, n}, [&] {
      c.op(Opcode::dconst_0);
      c.store(Kind::Double, 11);
      c.op(Opcode::dconst_0);
      c.store(Kind::Double, 13);
      emit_for(c, {15, zero, n}, [&] {
        elem(0, 15);
        elem(0, 10);
        c.op(Opcode::dsub);
        c.store(Kind::Double, 16);
        elem(1, 15);
        elem(1, 10);
        c.op(Opcode::dsub);
        c.store(Kind::Double, 18);
        dl(16);
        dl(16);
        c.op(Opcode::dmul);
        dl(18);
        dl(18);
        c.op(Opcode::dmul);
        c.op(Opcode::dadd);
        c.push_double(0.01);
        c.op(Opcode::dadd);
        c.store(Kind::Double, 20);
        elem(4, 15);
        dl(20);
        dl(20);
        math(c, "sqrt", "(D)D");
        c.op(Opcode::dmul);
        c.op(Opcode::ddiv);
        c.store(Kind::Double, 22);
        dl(11);
        dl(16);
        dl(22);
        c.op(Opcode::dmul);
        c.op(Opcode::dadd);
        c.store(Kind::Double, 11);
        dl(13);
        dl(18);
        dl(22);
        c.op(Opcode::dmul);
        c.op(Opcode::dadd);
        c.store(Kind::Double, 13);
      });
      kick(2, [&] { dl(11); });
      kick(3, [&] { dl(13); });
    });
    emit_for(c, {10, zero, n}, [&] {
      kick(0, [&] { elem(2, 10); });
      kick(1, [&] { elem(3, 10); });
    });
  });
  c.ret(Kind::Void);
  b.add_method(kPubStatic, "simulate", "([D[D[D[D[DID)V", c.finish());
  return std::move(b).build();
}

// --------------------------------------------------------------------- FFT

ClassModel fft_class() {
  ClassBuilder b("FFT");
  b.add_default_constructor();
  CodeBuilder c(b.pool());
  // re0 im1 n2 logn3 h4 tre5 tim6 s7 b8 ang9 wr11 wi13 ur15 ui17 vr19 vi21
  // dr23 di25 k27 r28 kk29 bb30
  auto zero = [&] { c.push_int(0); };
  auto il = [&](int s) { c.load(Kind::Int, s); };
  auto dl = [&](int s) { c.load(Kind::Double, s); };
  auto ds = [&](int s) { c.store(Kind::Double, s); };
  auto two_b = [&] {
    c.push_int(2);
    il(8);
    c.op(Opcode::imul);
  };
  il(2);
  c.push_int(1);
  c.op(Opcode::ishr);
  c.store(Kind::Int, 4);
  il(2);
  c.new_array(ElemKind::Double);
  c.store(Kind::Ref, 5);
  il(2);
  c.new_array(ElemKind::Double);
  c.store(Kind::Ref, 6);
  auto copy_back = [&] {
    emit_for(c, {27, zero, [&] { il(2); }}, [&] {
      for (int a = 0; a < 2; ++a) {
        c.load(Kind::Ref, a);
        il(27);
        c.load(Kind::Ref, 5 + a);
        il(27);
        c.array_load(ElemKind::Double);
        c.array_store(ElemKind::Double);
      }
    });
  };
  emit_for(c, {7, zero, [&] { il(3); }}, [&] {
    emit_for(c, {8, zero, [&] { il(4); }}, [&] {
      // ang = -2pi * ((b >> s) << s) / n
      c.push_double(-6.283185307179586);
      il(8);
      il(7);
      c.op(Opcode::ishr);
      il(7);
      c.op(Opcode::ishl);
      c.op(Opcode::i2d);
      c.op(Opcode::dmul);
      il(2);
      c.op(Opcode::i2d);
      c.op(Opcode::ddiv);
      ds(9);
      dl(9);
      math(c, "cos", "(D)D");
      ds(11);
      dl(9);
      math(c, "sin", "(D)D");
      ds(13);
      for (int a = 0; a < 2; ++a) {
        c.load(Kind::Ref, a);
        il(8);
        c.array_load(ElemKind::Double);
        ds(15 + 2 * a);
      }
      for (int a = 0; a < 2; ++a) {
        c.load(Kind::Ref, a);
        il(8);
        il(4);
        c.op(Opcode::iadd);
        c.array_load(ElemKind::Double);
        ds(19 + 2 * a);
      }
      for (int a = 0; a < 2; ++a) {
        c.load(Kind::Ref, 5 + a);
        two_b();
        dl(15 + 2 * a);
        dl(19 + 2 * a);
        c.op(Opcode::dadd);
        c.array_store(ElemKind::Double);
      }
      dl(15);
      dl(19);
      c.op(Opcode::dsub);
      ds(23);
      dl(17);
      dl(21);
      c.op(Opcode::dsub);
      ds(25);
      // tre[2b+1] = dr*wr - di*wi; tim[2b+1] = dr*wi + di*wr
      c.load(Kind::Ref, 5);
      two_b();
      c.push_int(1);
      c.op(Opcode::iadd);
      dl(23);
      dl(11);
      c.op(Opcode::dmul);
      dl(25);
      dl(13);
      c.op(Opcode::dmul);
      c.op(Opcode::dsub);
      c.array_store(ElemKind::Double);
      c.load(Kind::Ref, 6);
      two_b();
      c.push_int(1);
      c.op(Opcode::iadd);
      dl(23);
      dl(13);
      c.op(Opcode::dmul);
      dl(25);
      dl(11);
      c.op(Opcode::dmul);
      c.op(Opcode::dadd);
      c.array_store(ElemKind::Double);
    });
    copy_back();
  });
  // bit-reversal gather into tre/tim
  emit_for(c, {27, zero, [&] { il(2); }}, [&] {
    c.push_int(0);
    c.store(Kind::Int, 28);
    il(27);
    c.store(Kind::Int, 29);
    emit_for(c, {30, zero, [&] { il(3); }}, [&] {
      il(28);
      c.push_int(1);
      c.op(Opcode::ishl);
      il(29);
      c.push_int(1);
      c.op(Opcode::iand);
      c.op(Opcode::ior);
      c.store(Kind::Int, 28);
      il(29);
      c.push_int(1);
      c.op(Opcode::ishr);
      c.store(Kind::Int, 29);
    });
    for (int a = 0; a < 2; ++a) {
      c.load(Kind::Ref, 5 + a);
      il(27);
      c.load(Kind::Ref, a);
      il(28);
      c.array_load(ElemKind::Double);
      c.array_store(ElemKind::Double);
    }
  });
  copy_back();
  c.ret(Kind::Void);
  b.add_method(kPubStatic, "fft", "([D[DII)V", c.finish());
  return std::move(b).build();
}

// -------------------------------------------------------------- Reductions

namespace {

// acc = init; for (i = 0; i < n; i++) acc = combine(acc, a[i]); return acc;
void reduction_method(ClassBuilder& b, const char* name, const char* desc, Kind k, ElemKind ek,
                      const Emit& init, const std::function<void(CodeBuilder&)>& combine, CodeBuilder& c) {
  int acc = 2;
  int i = acc + slot_width(k);
  init();
  c.store(k, acc);
  emit_for(c, {i, [&] { c.push_int(0); }, [&] { c.load(Kind::Int, 1); }}, [&] {
    c.load(k, acc);
    c.load(Kind::Ref, 0);
    c.load(Kind::Int, i);
    c.array_load(ek);
    combine(c);
    c.store(k, acc);
  });
  c.load(k, acc);
  c.ret(k);
  b.add_method(kPubStatic, name, desc, c.finish());
}

}  // namespace

ClassModel reductions_class() {
  ClassBuilder b("Reductions");
  b.add_default_constructor();
  {
    CodeBuilder c(b.pool());
    reduction_method(b, "sum", "([DI)D", Kind::Double, ElemKind::Double, [&] { c.op(Opcode::dconst_0); },
                     [](CodeBuilder& cc) { cc.op(Opcode::dadd); }, c);
  }
  {
    CodeBuilder c(b.pool());
    reduction_method(b, "isum", "([II)I", Kind::Int, ElemKind::Int, [&] { c.push_int(0); },
                     [](CodeBuilder& cc) { cc.op(Opcode::iadd); }, c);
  }
  {
    CodeBuilder c(b.pool());
    reduction_method(b, "dmin", "([DI)D", Kind::Double, ElemKind::Double,
                     [&] { c.push_double(std::numeric_limits<double>::infinity()); },
                     [](CodeBuilder& cc) { math(cc, "min", "(DD)D"); }, c);
  }
  {
    CodeBuilder c(b.pool());
    reduction_method(b, "imax", "([II)I", Kind::Int, ElemKind::Int,
                     [&] { c.push_int(std::numeric_limits<std::int32_t>::min()); },
                     [](CodeBuilder& cc) { math(cc, "max", "(II)I"); }, c);
  }
  {
    CodeBuilder c(b.pool());
    reduction_method(b, "lsum", "([JI)J", Kind::Long, ElemKind::Long, [&] { c.op(Opcode::lconst_0); },
                     [](CodeBuilder& cc) { cc.op(Opcode::ladd); }, c);
  }
  {
    CodeBuilder c(b.pool());
    reduction_method(b, "fprod", "([FI)F", Kind::Float, ElemKind::Float, [&] { c.op(Opcode::fconst_1); },
                     [](CodeBuilder& cc) { cc.op(Opcode::fmul); }, c);
  }
  return std::move(b).build();
}

// ------------------------------------------------------------------- Loops

ClassModel loops_class() {
  ClassBuilder b("Loops");
  b.add_default_constructor();
  auto zero = [](CodeBuilder& c) { return [&c] { c.push_int(0); }; };
  auto one = [](CodeBuilder& c) { return [&c] { c.push_int(1); }; };
  auto load_n = [](CodeBuilder& c, int slot) { return [&c, slot] { c.load(Kind::Int, slot); }; };
  {
    // fill: a[i] = i
    CodeBuilder c(b.pool());
    emit_for(c, {2, zero(c), load_n(c, 1)}, [&] {
      c.load(Kind::Ref, 0);
      c.load(Kind::Int, 2);
      c.load(Kind::Int, 2);
      c.array_store(ElemKind::Int);
    });
    c.ret(Kind::Void);
    b.add_method(kPubStatic, "fill", "([II)V", c.finish());
  }
  {
    // prefix: for (i = 1; i < n; i++) a[i] += a[i-1]
    CodeBuilder c(b.pool());
    emit_for(c, {2, one(c), load_n(c, 1)}, [&] {
      c.load(Kind::Ref, 0);
      c.load(Kind::Int, 2);
      c.op(Opcode::dup2);
      c.array_load(ElemKind::Int);
      c.load(Kind::Ref, 0);
      c.load(Kind::Int, 2);
      c.push_int(1);
      c.op(Opcode::isub);
      c.array_load(ElemKind::Int);
      c.op(Opcode::iadd);
      c.array_store(ElemKind::Int);
    });
    c.ret(Kind::Void);
    b.add_method(kPubStatic, "prefix", "([II)V", c.finish());
  }
  {
    // recur: for (i = 1; i < n; i++) a[i] = a[i-1] + 1
    CodeBuilder c(b.pool());
    emit_for(c, {2, one(c), load_n(c, 1)}, [&] {
      c.load(Kind::Ref, 0);
      c.load(Kind::Int, 2);
      c.load(Kind::Ref, 0);
      c.load(Kind::Int, 2);
      c.push_int(1);
      c.op(Opcode::isub);
      c.array_load(ElemKind::Int);
      c.push_int(1);
      c.op(Opcode::iadd);
      c.array_store(ElemKind::Int);
    });
    c.ret(Kind::Void);
    b.add_method(kPubStatic, "recur", "([II)V", c.finish());
  }
  {
    // selfinc: a[i] = a[i] + 1
    CodeBuilder c(b.pool());
    emit_for(c, {2, zero(c), load_n(c, 1)}, [&] {
      c.load(Kind::Ref, 0);
      c.load(Kind::Int, 2);
      c.load(Kind::Ref, 0);
      c.load(Kind::Int, 2);
      c.array_load(ElemKind::Int);
      c.push_int(1);
      c.op(Opcode::iadd);
      c.array_store(ElemKind::Int);
    });
    c.ret(Kind::Void);
    b.add_method(kPubStatic, "selfinc", "([II)V", c.finish());
  }
  {
    // affine: a[2*i+3] = b[i]
    CodeBuilder c(b.pool());
    emit_for(c, {3, zero(c), load_n(c, 2)}, [&] {
      c.load(Kind::Ref, 0);
      c.push_int(2);
      c.load(Kind::Int, 3);
      c.op(Opcode::imul);
      c.push_int(3);
      c.op(Opcode::iadd);
      c.load(Kind::Ref, 1);
      c.load(Kind::Int, 3);
      c.array_load(ElemKind::Int);
      c.array_store(ElemKind::Int);
    });
    c.ret(Kind::Void);
    b.add_method(kPubStatic, "affine", "([I[II)V", c.finish());
  }
  {
    // skew: for (i = 1; i < n; i++) for (j = 0; j < n - 1; j++) a[i][j] = a[i-1][j+1]
    CodeBuilder c(b.pool());
    emit_for(c, {2, one(c), load_n(c, 1)}, [&] {
      emit_for(c, {3, zero(c), [&] {
                     c.load(Kind::Int, 1);
                     c.push_int(1);
                     c.op(Opcode::isub);
                   }},
               [&] {
                 c.load(Kind::Ref, 0);
                 c.load(Kind::Int, 2);
                 c.array_load(ElemKind::Ref);
                 c.load(Kind::Int, 3);
                 c.load(Kind::Ref, 0);
                 c.load(Kind::Int, 2);
                 c.push_int(1);
                 c.op(Opcode::isub);
                 c.array_load(ElemKind::Ref);
                 c.load(Kind::Int, 3);
                 c.push_int(1);
                 c.op(Opcode::iadd);
                 c.array_load(ElemKind::Int);
                 c.array_store(ElemKind::Int);
               });
    });
    c.ret(Kind::Void);
    b.add_method(kPubStatic, "skew", "([[II)V", c.finish());
  }
  {
    // copy2d: b[i][j] = a[i][j] * 3 + j
    CodeBuilder c(b.pool());
    emit_for(c, {3, zero(c), load_n(c, 2)}, [&] {
      emit_for(c, {4, zero(c), load_n(c, 2)}, [&] {
        c.load(Kind::Ref, 1);
        c.load(Kind::Int, 3);
        c.array_load(ElemKind::Ref);
        c.load(Kind::Int, 4);
        c.load(Kind::Ref, 0);
        c.load(Kind::Int, 3);
        c.array_load(ElemKind::Ref);
        c.load(Kind::Int, 4);
        c.array_load(ElemKind::Int);
        c.push_int(3);
        c.op(Opcode::imul);
        c.load(Kind::Int, 4);
        c.op(Opcode::iadd);
        c.array_store(ElemKind::Int);
      });
    });
    c.ret(Kind::Void);
    b.add_method(kPubStatic, "copy2d", "([[I[[II)V", c.finish());
  }
  {
    // rev: for (i = n - 1; i >= 0; i--) a[i] = a[i] * 2 + i
    CodeBuilder c(b.pool());
    ForLoop l{2, [&] {
                c.load(Kind::Int, 1);
                c.push_int(1);
                c.op(Opcode::isub);
              },
              zero(c), Opcode::if_icmplt, -1};
    emit_for(c, l, [&] {
      c.load(Kind::Ref, 0);
      c.load(Kind::Int, 2);
      c.load(Kind::Ref, 0);
      c.load(Kind::Int, 2);
      c.array_load(ElemKind::Int);
      c.push_int(2);
      c.op(Opcode::imul);
      c.load(Kind::Int, 2);
      c.op(Opcode::iadd);
      c.array_store(ElemKind::Int);
    });
    c.ret(Kind::Void);
    b.add_method(kPubStatic, "rev", "([II)V", c.finish());
  }
  return std::move(b).build();
}

ClassModel noloops_class() {
  ClassBuilder b("NoLoops");
  b.add_default_constructor();
  CodeBuilder c(b.pool());
  c.load(Kind::Int, 0);
  c.load(Kind::Int, 1);
  c.op(Opcode::iadd);
  c.ret(Kind::Int);
  b.add_method(kPubStatic, "add", "(II)I", c.finish());
  return std::move(b).build();
}

ClassModel conflict_class() {
  ClassBuilder b("Conflict");
  b.add_default_constructor();
  CodeBuilder c(b.pool());
  // for (i = 0; i < n; i++) a[0] = i;
  emit_for(c, {2, [&] { c.push_int(0); }, [&] { c.load(Kind::Int, 1); }}, [&] {
    c.load(Kind::Ref, 0);
    c.push_int(0);
    c.load(Kind::Int, 2);
    c.array_store(ElemKind::Int);
  });
  c.ret(Kind::Void);
  b.add_method(kPubStatic, "last", "([II)V", c.finish());
  return std::move(b).build();
}


/// Parallelizes Conflict.last although its loop carries an output
/// dependence, standing in for a broken certifier.
ParallelVariant injected_conflict_variant() {
  ClassModel m = conflict_class();
  const MethodEntry* me = m.find_method("last", "([II)V");
  auto stmts = decompile_method(m, *me);
  LoopForest forest = build_forest(me->code->instrs, stmts);
  TransformCandidate cand;
  cand.kind = TransformKind::Identity;
  cand.nest = forest.roots.at(0)->header.id;
  cand.parallel_level = cand.nest;
  cand.parallel_verdict = Verdict::IP;
  cand.certified = true;
  cand.certificate = "injected";
  CodegenOptions opts;
  opts.n_workers = 4;
  return parallelize(m, "last", "([II)V", {NestPlan{forest.roots[0], cand}}, opts);
}


std::vector<Fixture> generate_fixtures() {
  std::vector<Fixture> out;
  auto add = [&](const ClassModel& m) { out.push_back({m.name() + ".class", emit_class(m)}); };
  add(matmul_class());
  add(histogram_class());
  add(nbody_class());
  add(fft_class());
  add(reductions_class());
  add(loops_class());
  add(noloops_class());
  add(conflict_class());
  for (const auto& [name, bytes] : injected_conflict_variant().emit()) out.push_back({"conflict/" + name + ".class", bytes});
  return out;
}

// ------------------------------------------------------------ random class

ClassModel random_small_class(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  ClassBuilder b("rnd/Small" + std::to_string(seed));
  b.add_default_constructor();
  int nfields = pick(0, 3);
  for (int f = 0; f < nfields; ++f) {
    static const char* kDescs[] = {"I", "J", "D", "[I"};
    b.add_field(access::kPrivate | (pick(0, 1) ? access::kStatic : 0), "f" + std::to_string(f), kDescs[pick(0, 3)]);
  }
  int nmethods = pick(1, 4);
  for (int k = 0; k < nmethods; ++k) {
    CodeBuilder c(b.pool());
    int params = pick(1, 3);
    std::string desc = "(" + std::string(static_cast<std::size_t>(params), 'I') + ")I";
    int ops = pick(1, 12);
    c.load(Kind::Int, 0);
    static const Opcode kOps[] = {Opcode::iadd, Opcode::isub, Opcode::imul, Opcode::iand,
                                  Opcode::ior,  Opcode::ixor, Opcode::ishl, Opcode::ishr};
    for (int i = 0; i < ops; ++i) {
      if (pick(0, 2) == 0) c.push_int(pick(-40000, 40000));
      else c.load(Kind::Int, pick(0, params - 1));
      c.op(kOps[pick(0, 7)]);
    }
    if (pick(0, 1)) {
      int acc = params;
      int iv = params + 1;
      c.store(Kind::Int, acc);
      emit_for(c, {iv, [&] { c.push_int(0); }, [&] { c.load(Kind::Int, 0); }, Opcode::if_icmpge, 1, pick(0, 1) == 1},
               [&] { c.iinc(acc, pick(1, 5)); });
      c.load(Kind::Int, acc);
    }
    c.ret(Kind::Int);
    b.add_method(kPubStatic, "m" + std::to_string(k), desc, c.finish());
  }
  return std::move(b).build();
}

}  // namespace bcpar::testkit
