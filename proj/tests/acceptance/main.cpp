// Acceptance checks. One PASS/FAIL line per criterion; exit status is the
// number of failures. `--only <name>` runs a single criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcpar/analysis.hpp"
#include "bcpar/autotune.hpp"
#include "bcpar/decompile.hpp"
#include "bcpar/equivalence.hpp"
#include "bcpar/error.hpp"
#include "bcpar/ir_eval.hpp"
#include "bcpar/metrics.hpp"
#include "kernels.hpp"
#include "programs.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace bcpar;
using namespace bcpar::testkit;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// ------------------------------------------------------------------ table

struct PrintedRow {
  int p;
  double t, e, s;
};

Outcome matrix_table() {
  const std::map<std::int64_t, std::vector<PrintedRow>> table{
      {1024,
       {{1, 1.15, 1, 1}, {2, 0.78, 0.74, 1.48}, {4, 0.42, 0.68, 2.72}, {8, 0.30, 0.49, 3.90},
        {10, 0.37, 0.31, 3.10}, {12, 0.39, 0.24, 2.94}, {14, 0.42, 0.20, 2.76}, {16, 0.46, 0.16, 2.49}}},
      {4096,
       {{1, 463.41, 1, 1}, {2, 227.99, 1.02, 2.03}, {4, 114.42, 1.01, 4.05}, {8, 60.57, 0.96, 7.65},
        {10, 59.24, 0.78, 7.82}, {12, 57.50, 0.67, 8.06}, {14, 55.49, 0.60, 8.35}, {16, 54.98, 0.53, 8.43}}},
      {8192,
       {{1, 4248.56, 1, 1}, {2, 2180.12, 0.97, 1.95}, {4, 1087.61, 0.98, 3.91}, {8, 568.00, 0.93, 7.48},
        {16, 538.77, 0.49, 7.89}}},
  };
  std::vector<RunRecord> recs;
  for (const auto& [n, rows] : table)
    for (const auto& r : rows) recs.push_back({"matmul", n, r.p, r.t});
  auto rows = build_rows(recs);
  int checked = 0;
  std::vector<std::string> misses;
  for (const auto& row : rows) {
    for (const auto& want : table.at(row.n)) {
      if (want.p != row.p) continue;
      checked += 2;
      if (std::abs(row.e - want.e) > 0.01 + 1e-9)
        misses.push_back(std::to_string(row.n) + " P=" + std::to_string(row.p) + " E " + fmt("%.3f", row.e) +
                         " vs " + fmt("%.2f", want.e));
      if (std::abs(row.s - want.s) > 0.01 + 1e-9)
        misses.push_back(std::to_string(row.n) + " P=" + std::to_string(row.p) + " S " + fmt("%.3f", row.s) +
                         " vs " + fmt("%.2f", want.s));
    }
  }
  std::string d = std::to_string(checked - static_cast<int>(misses.size())) + "/" + std::to_string(checked) +
                  " printed values within 0.01";
  for (const auto& m : misses) d += "; " + m;
  return {misses.empty(), d};
}

// -------------------------------------------------------------- round trip

Outcome roundtrip() {
  int files = 0, bad = 0;
  std::string first_bad;
  for (const auto& e : fs::recursive_directory_iterator(BCPAR_FIXTURES_DIR)) {
    if (e.path().extension() != ".class") continue;
    ++files;
    auto bytes = read_file(e.path().string());
    try {
      if (emit_class(parse_class(bytes)) != bytes) throw std::runtime_error("bytes differ");
    } catch (const std::exception& ex) {
      if (!bad++) first_bad = e.path().filename().string() + ": " + ex.what();
    }
  }
  const int extra = 25;
  for (int s = 1; s <= extra; ++s) {
    auto bytes = emit_class(random_small_class(static_cast<std::uint64_t>(s)));
    try {
      if (emit_class(parse_class(bytes)) != bytes) throw std::runtime_error("bytes differ");
    } catch (const std::exception& ex) {
      if (!bad++) first_bad = "random " + std::to_string(s) + ": " + ex.what();
    }
  }
  std::string d = std::to_string(files) + " fixture classes + " + std::to_string(extra) + " generated, " +
                  std::to_string(bad) + " mismatches";
  if (bad) d += " (first: " + first_bad + ")";
  return {bad == 0 && files > 0, d};
}

// ------------------------------------------------------------- decompiler

Outcome decompiler_oracle() {
  const int count = 200;
  int bad = 0;
  std::size_t stmts_total = 0;
  std::string first_bad;
  for (int s = 1; s <= count; ++s) {
    auto seed = static_cast<std::uint64_t>(s);
    StraightLine sl = random_straight_line(seed);
    ClassPath cp;
    cp.add_ref(sl.model);
    std::string why;
    try {
      Heap h1, h2;
      auto a1 = straight_line_args(h1, seed);
      auto a2 = straight_line_args(h2, seed);
      ExecResult r1 = exec_method(cp, sl.owner, sl.method, sl.desc, a1, h1);
      const MethodEntry& me = sl.model.method_by_name(sl.method);
      auto stmts = decompile_method(sl.model, me);
      stmts_total += stmts.size();
      std::vector<Value> locals(static_cast<std::size_t>(compute_max_locals(me.code->instrs, sl.desc, true)));
      for (std::size_t k = 0; k < a2.size(); ++k) locals[k] = a2[k];
      IrEvalResult r2 = eval_ir(stmts, locals, h2, cp);
      if (r1.trap.kind != r2.trap.kind) why = "trap " + r1.trap.detail + " vs " + r2.trap.detail;
      else if (r1.ret != r2.ret) why = "return value";
      for (std::size_t k = 0; k < a1.size() && why.empty(); ++k) {
        const auto& d1 = h1.array(a1[k])->data;
        const auto& d2 = h2.array(a2[k])->data;
        for (std::size_t i = 0; i < d1.size() && why.empty(); ++i)
          if (!(d1[i] == d2[i])) why = "arg" + std::to_string(k) + "[" + std::to_string(i) + "] " + to_string(d1[i]) +
                                       " vs " + to_string(d2[i]);
      }
    } catch (const std::exception& ex) {
      why = ex.what();
    }
    if (!why.empty() && !bad++) first_bad = "seed " + std::to_string(s) + ": " + why;
  }
  std::string d = std::to_string(count - bad) + "/" + std::to_string(count) + " methods agree bitwise (" +
                  std::to_string(stmts_total) + " statements)";
  if (bad) d += "; first: " + first_bad;
  return {bad == 0, d};
}

// -------------------------------------------------------------- dependence

Outcome dependence_soundness() {
  const int count = 500;
  int unsound = 0, mismatched = 0, rejected = 0;
  long pairs = 0, oracle_no = 0, over = 0;
  std::string first_bad;
  auto note = [&](const std::string& s) {
    if (first_bad.empty()) first_bad = s;
  };
  for (int s = 1; s <= count; ++s) {
    AffineNest nest = random_affine_nest(static_cast<std::uint64_t>(s));
    ClassReport rep = analyze_class(nest.model);
    const MethodReport* mr = rep.method(nest.method);
    if (!mr || mr->nests.size() != 1) {
      ++rejected;
      note("seed " + std::to_string(s) + ": nest not analyzed");
      continue;
    }
    const auto& acc = mr->nests[0].analysis.accesses;
    // Match each element access to the generated reference it came from.
    std::vector<const RefSpec*> ref(acc.size(), nullptr);
    std::vector<const StmtSpec*> owner(acc.size(), nullptr);
    std::vector<std::set<const RefSpec*>> used(nest.stmts.size());
    for (std::size_t a = 0; a < acc.size(); ++a) {
      const AffineAccess& x = acc[a];
      if (x.array == "local2" && x.dims.size() == 1) continue;  // row of c
      auto order = static_cast<std::size_t>(x.order);
      if (order >= nest.stmts.size()) {
        ++mismatched;
        note("seed " + std::to_string(s) + ": access order out of range");
        continue;
      }
      const StmtSpec& st = nest.stmts[order];
      std::vector<const RefSpec*> pool;
      if (x.kind == AccessKind::Write) pool.push_back(&st.target);
      else
        for (const auto& r : st.reads) pool.push_back(&r);
      for (const RefSpec* r : pool) {
        if ("local" + std::to_string(r->array) != x.array || r->dims.size() != x.dims.size() || used[order].count(r))
          continue;
        bool same = !x.non_affine;
        for (std::size_t d = 0; d < r->dims.size() && same; ++d) {
          std::vector<std::int64_t> want(r->dims[d].begin(), r->dims[d].end() - 1);
          same = x.dims[d].coeffs == want && x.dims[d].constant == r->dims[d].back() && x.dims[d].params.empty();
        }
        if (!same) continue;
        ref[a] = r;
        owner[a] = &st;
        used[order].insert(r);
        break;
      }
      if (!ref[a]) {
        ++mismatched;
        note("seed " + std::to_string(s) + ": no generated match for " + x.to_string());
      }
    }
    for (std::size_t a = 0; a < acc.size(); ++a) {
      for (std::size_t b = a; b < acc.size(); ++b) {
        if (!ref[a] || !ref[b] || ref[a]->array != ref[b]->array) continue;
        if (!ref[a]->write && !ref[b]->write) continue;
        if (a == b && !ref[a]->write) continue;
        ++pairs;
        bool found = false;
        auto ia = iterations(nest, owner[a]->loops), ib = iterations(nest, owner[b]->loops);
        for (const auto& x : ia) {
          auto sx = subscripts(*ref[a], x);
          for (const auto& y : ib) {
            if (a == b && x == y) continue;
            if (sx == subscripts(*ref[b], y)) {
              found = true;
              break;
            }
          }
          if (found) break;
        }
        DependenceResult res = test_dependence(acc, static_cast<int>(a), static_cast<int>(b));
        if (found && res.exists == DepExists::No) {
          ++unsound;
          note("seed " + std::to_string(s) + ": missed " + acc[a].to_string() + " / " + acc[b].to_string());
        }
        if (!found) {
          ++oracle_no;
          if (res.exists == DepExists::Maybe) ++over;
        }
      }
    }
  }
  double rate = oracle_no ? static_cast<double>(over) / static_cast<double>(oracle_no) : 0.0;
  std::string d = std::to_string(count) + " nests, " + std::to_string(pairs) + " pairs, " +
                  std::to_string(unsound) + " unsound, over-approximation " + fmt("%.1f", rate * 100) + "% (" +
                  std::to_string(over) + "/" + std::to_string(oracle_no) + " independent pairs)";
  if (mismatched || rejected)
    d += ", " + std::to_string(mismatched) + " extraction mismatches, " + std::to_string(rejected) + " rejected";
  if (!first_bad.empty()) d += "; first: " + first_bad;
  return {unsound == 0 && mismatched == 0 && rejected == 0, d};
}

// ------------------------------------------------------------ end to end

struct Kernel {
  std::string name, file, method, desc;
  std::int64_t n = 16;
  double tol = 1e-9;
  InputSpec inputs;
  json expected;
};

std::vector<Kernel> load_manifest() {
  std::ifstream in(fixture_path("manifest.json"));
  json m = json::parse(in);
  std::vector<Kernel> out;
  for (const auto& k : m.at("kernels")) {
    Kernel x;
    x.name = k.at("name");
    x.file = k.at("file");
    x.method = k.at("method");
    x.desc = k.at("descriptor");
    x.n = k.at("n");
    x.tol = k.at("tolerance");
    x.inputs = parse_input_spec(k.at("inputs").dump());
    x.expected = k.at("expected");
    out.push_back(std::move(x));
  }
  return out;
}

Outcome end_to_end() {
  int variants = 0, failed = 0;
  std::string first_bad, per_kernel;
  for (const Kernel& k : load_manifest()) {
    ClassModel m = load_fixture(k.file);
    ClassReport rep = analyze_class(m);
    const MethodReport* mr = rep.method(k.method);
    EquivalenceConfig cfg;
    cfg.n = k.n;
    cfg.tolerance = k.tol;
    cfg.inputs = k.inputs;
    int kv = 0;
    double dev = 0;
    auto check = [&](const ParallelVariant& v, const std::string& what) {
      ++variants;
      ++kv;
      EquivalenceVerdict e = check_equivalence(v, nullptr, cfg);
      dev = std::max(dev, e.max_deviation);
      if (!e.pass || e.schedules_run != cfg.n_schedules) {
        std::string why = !e.error.empty() ? e.error : e.witness ? "differs at " + e.witness->location : "incomplete";
        if (!failed++) first_bad = k.name + " " + what + ": " + why;
      }
    };
    for (std::size_t nest = 0; nest < mr->nests.size(); ++nest) {
      const NestReport& nr = mr->nests[nest];
      for (const auto& c : nr.candidates) {
        try {
          check(parallelize(m, k.method, k.desc, {NestPlan{apply(c, *nr.nest), c}}),
                "nest " + std::to_string(nest) + " " + c.describe());
        } catch (const std::exception& ex) {
          if (!failed++) first_bad = k.name + " " + c.describe() + ": " + ex.what();
        }
      }
    }
    // The tuned rewrite of the whole method.
    MeasureConfig mc;
    mc.inputs = k.inputs;
    InterpMeasurer meas(mc);
    PipelineConfig pc;
    pc.r = k.n;
    ClassParallelization cpz = parallelize_class(m, rep, meas, pc);
    for (const auto& v : cpz.variants) check(v, "tuned");
    per_kernel += (per_kernel.empty() ? "" : ", ") + k.name + " " + std::to_string(kv);
    if (dev > 0) per_kernel += " (max dev " + fmt("%.1e", dev) + ")";
  }
  std::string d = std::to_string(variants - failed) + "/" + std::to_string(variants) +
                  " variants equivalent under 20 schedules [" + per_kernel + "]";
  if (failed) d += "; first: " + first_bad;
  return {failed == 0 && variants > 0, d};
}

// -------------------------------------------------------------- xform

struct XformSubject {
  std::string file;
  std::int64_t n;
  std::map<std::string, InputSpec> inputs;  // by method; default generator otherwise
};

Outcome transformation_legality() {
  std::vector<XformSubject> subjects;
  for (const Kernel& k : load_manifest()) subjects.push_back({k.file, k.n, {{k.method, k.inputs}}});
  subjects.push_back({"Reductions.class", 16, {}});
  subjects.push_back(
      {"Loops.class", 16, {{"affine", parse_input_spec(R"({"params":[{"dims":[40]},{"dims":["n"]},{"value":"n"}]})")}}});

  AnalysisOptions ao;
  ao.tile_sizes = {3, 4, 32};  // small tiles split the test sizes, 3 leaves a ragged tile
  int cands = 0, failed = 0;
  std::map<std::string, int> kinds;
  std::string first_bad;
  for (const auto& sub : subjects) {
    ClassModel m = load_fixture(sub.file);
    ClassReport rep = analyze_class(m, ao);
    ClassPath orig;
    orig.add_ref(m);
    for (const auto& mr : rep.methods) {
      for (const auto& nr : mr.nests) {
        for (const auto& c : nr.candidates) {
          ++cands;
          ++kinds[std::string(transform_kind_name(c.kind))];
          std::string why;
          try {
            ClassModel rw = rewrite_serial(m, mr.name, mr.desc, *apply(c, *nr.nest));
            ClassPath cp;
            cp.add_ref(rw);
            EquivalenceConfig cfg;
            cfg.n_schedules = 1;
            cfg.tolerance = 0;  // serial order is kept, so results are bit-identical
            cfg.n = sub.n;
            if (auto it = sub.inputs.find(mr.name); it != sub.inputs.end()) cfg.inputs = it->second;
            for (std::uint64_t seed : {1u, 2u, 3u}) {
              cfg.seed = seed;
              EquivalenceVerdict e = check_equivalence({&orig, m.name(), mr.name, mr.desc, mr.is_static},
                                                       {&cp, rw.name(), mr.name, mr.desc, mr.is_static}, cfg);
              if (!e.pass) {
                why = !e.error.empty() ? e.error : "differs at " + e.witness->location;
                break;
              }
            }
          } catch (const std::exception& ex) {
            why = ex.what();
          }
          if (!why.empty() && !failed++) first_bad = sub.file + " " + mr.name + " " + c.describe() + ": " + why;
        }
      }
    }
  }

  // The skewed nest: interchange must be refused, and forcing it must
  // change the result.
  bool skew_rejected = false, skew_breaks = false;
  {
    ClassModel m = load_fixture("Loops.class");
    ClassReport rep = analyze_class(m, ao);
    const NestReport& nr = nest_of(rep, "skew");
    auto names = described(nr);
    bool offered = std::any_of(names.begin(), names.end(), [](const std::string& s) { return s.find("interchange") == 0; });
    TransformCandidate c;
    c.kind = TransformKind::Interchange;
    c.nest = 0;
    c.level_a = 0;
    c.level_b = 1;
    c.parallel_level = 1;
    XformOptions xo;
    xo.live_after_nest = [](int) { return false; };
    skew_rejected = !offered && !legality(c, *nr.nest, nr.analysis, xo);
    c.certified = true;
    ClassModel rw = rewrite_serial(m, "skew", "([[II)V", *apply(c, *nr.nest));
    ClassPath po, pr;
    po.add_ref(m);
    pr.add_ref(rw);
    EquivalenceConfig cfg;
    cfg.n_schedules = 1;
    cfg.n = 6;
    skew_breaks = !check_equivalence({&po, "Loops", "skew", "([[II)V", true}, {&pr, "Loops", "skew", "([[II)V", true}, cfg).pass;
  }
  std::string d = std::to_string(cands - failed) + "/" + std::to_string(cands) + " candidates preserve results (";
  bool firstk = true;
  for (const auto& [k, n] : kinds) {
    d += (firstk ? "" : ", ") + std::to_string(n) + " " + k;
    firstk = false;
  }
  d += "); skew interchange ";
  d += skew_rejected ? "rejected" : "ACCEPTED";
  d += skew_breaks ? " and forcing it changes the result" : ", forcing it does not change the result";
  if (failed) d += "; first: " + first_bad;
  return {failed == 0 && cands > 0 && skew_rejected && skew_breaks, d};
}

// -------------------------------------------------------------- autotune

class ScriptedMeasurer : public Measurer {
 public:
  explicit ScriptedMeasurer(std::vector<double> costs) : costs_(std::move(costs)) {}
  double measure(const ParallelVariant&) override { return costs_.at(next_++); }
  double measure_serial(const ClassModel&, const std::string&, const std::string&) override { return 0; }
  std::string name() const override { return "scripted"; }

 private:
  std::vector<double> costs_;
  std::size_t next_ = 0;
};

Outcome autotuner() {
  // Every cost vector over {1..k} for k <= 5 covers all orderings and ties.
  long vectors = 0, wrong = 0;
  for (int k = 1; k <= 5; ++k) {
    std::vector<double> v(static_cast<std::size_t>(k), 1.0);
    for (;;) {
      ++vectors;
      std::size_t want = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
      if (select_min(v) != want) ++wrong;
      std::size_t i = 0;
      while (i < v.size() && v[i] == k) v[i++] = 1;
      if (i == v.size()) break;
      v[i] += 1;
    }
  }
  // The same through tune() on five real candidates.
  ClassModel loops = load_fixture("Loops.class");
  AnalysisOptions ao;
  ao.tile_sizes = {4, 8, 16, 32};
  ClassReport lrep = analyze_class(loops, ao);
  const NestReport& fill = nest_of(lrep, "fill");
  long tuned = 0, tuned_wrong = 0;
  if (fill.candidates.size() == 5) {
    for (std::vector<double> base : {std::vector<double>{1, 2, 3, 4, 5}, {1, 1, 2, 2, 3}, {2, 2, 2, 1, 1}}) {
      std::sort(base.begin(), base.end());
      do {
        ++tuned;
        ScriptedMeasurer sm(base);
        TuneResult res = tune(loops, "fill", "([II)V", fill.nest, fill.candidates, sm, {});
        std::size_t want = static_cast<std::size_t>(std::min_element(base.begin(), base.end()) - base.begin());
        if (res.selected != want) ++tuned_wrong;
      } while (std::next_permutation(base.begin(), base.end()));
    }
  } else {
    tuned_wrong = 1;
  }

  // Interp backend on matmul: tune at r = 16, compare all candidates at 64.
  ClassModel mm = load_fixture("MatMul.class");
  ClassReport rep = analyze_class(mm);
  const NestReport& nr = nest_of(rep, "multiply");
  MeasureConfig mc;
  mc.r = 16;
  InterpMeasurer meas(mc);
  TuneConfig tc;
  tc.r = 16;
  TuneResult res = tune(mm, "multiply", "([[D[[D)[[D", nr.nest, nr.candidates, meas, tc);
  bool full_ok = res.selected.has_value();
  std::string chosen = full_ok ? res.best()->candidate.describe() : "none";
  double chosen_cost = 0, best_other = 1e300;
  if (full_ok) {
    meas.set_scale(64);
    for (const auto& t : res.trials) {
      if (!t.variant) continue;
      double c = meas.measure(*t.variant);
      if (t.index == *res.selected) chosen_cost = c;
      else best_other = std::min(best_other, c);
    }
    full_ok = chosen_cost <= best_other;
  }
  std::string d = "select_min " + std::to_string(vectors - wrong) + "/" + std::to_string(vectors) +
                  " cost vectors, tune() " + std::to_string(tuned - tuned_wrong) + "/" + std::to_string(tuned) +
                  " permutations; matmul picks " + chosen + " at r=16, cost at 64 " + fmt("%.0f", chosen_cost) +
                  " vs best other " + fmt("%.0f", best_other);
  return {wrong == 0 && tuned_wrong == 0 && full_ok, d};
}

// -------------------------------------------------------------- manifest

Outcome verdict_manifest() {
  int loops = 0, bad = 0;
  std::string first_bad;
  for (const Kernel& k : load_manifest()) {
    ClassModel m = load_fixture(k.file);
    ClassReport rep = analyze_class(m);
    const MethodReport* mr = rep.method(k.method);
    for (const auto& want : k.expected.at("loops")) {
      ++loops;
      int id = want.at("id");
      const LevelVerdict* lv = nullptr;
      for (const auto& nr : mr->nests)
        if (!lv) lv = nr.analysis.pt.level(id);
      std::string why;
      std::string verdict = want.at("verdict");
      std::string got = lv ? std::string(verdict_name(lv->verdict)) : "missing";
      if (got == "Serial" || got == "serial") got = "serial";
      if (got != verdict) why = "verdict " + got + ", expected " + verdict;
      if (lv && want.contains("reductions")) {
        std::vector<std::string> ops;
        for (const auto& r : lv->reductions) ops.emplace_back(reduction_op_name(r.op));
        if (ops != want.at("reductions").get<std::vector<std::string>>()) why = "reductions differ";
      }
      if (!why.empty() && !bad++) first_bad = k.name + " loop " + std::to_string(id) + ": " + why;
    }
  }
  std::string d = std::to_string(loops - bad) + "/" + std::to_string(loops) + " loop verdicts match";
  if (bad) d += "; first: " + first_bad;
  return {bad == 0 && loops > 0, d};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bcpar acceptance checks"};
  std::string only;
  app.add_option("--only", only, "run a single criterion");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"matrix_table_arithmetic", matrix_table},
      {"classfile_roundtrip", roundtrip},
      {"decompiler_oracle", decompiler_oracle},
      {"dependence_soundness", dependence_soundness},
      {"end_to_end_equivalence", end_to_end},
      {"transformation_legality", transformation_legality},
      {"autotuner", autotuner},
      {"verdict_manifest", verdict_manifest},
  };
  int failures = 0, ran = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && only != name) continue;
    ++ran;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << " (" << fmt("%.2f", secs) << " s): " << o.detail << "\n";
    std::cout.flush();
    if (!o.pass) ++failures;
  }
  if (!ran) {
    std::cerr << "unknown criterion: " << only << "\n";
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
