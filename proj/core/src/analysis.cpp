#include "bcpar/analysis.hpp"

#include <json.hpp>

#include "bcpar/decompile.hpp"
#include "bcpar/error.hpp"
#include "bcpar/flow.hpp"

namespace bcpar {

using ojson = nlohmann::ordered_json;

std::size_t ClassReport::loop_count() const {
  std::size_t n = 0;
  for (const auto& m : methods)
    for (const auto& nr : m.nests) for_each_loop(*nr.nest, [&](const NormalizedLoop&, int) { ++n; });
  return n;
}

std::size_t ClassReport::candidate_count() const {
  std::size_t n = 0;
  for (const auto& m : methods)
    for (const auto& nr : m.nests) n += nr.candidates.size();
  return n;
}

const MethodReport* ClassReport::method(const std::string& name) const {
  for (const auto& m : methods)
    if (m.name == name) return &m;
  return nullptr;
}

ClassReport analyze_class(const ClassModel& model, const AnalysisOptions& opts) {
  ClassReport rep;
  rep.class_name = model.name();
  rep.major_version = model.major_version;
  for (const auto& me : model.methods) {
    MethodReport mr;
    mr.name = model.method_name(me);
    mr.desc = model.method_descriptor(me);
    mr.is_static = me.is_static();
    if (!me.code) {
      mr.skipped = "no code";
      rep.methods.push_back(std::move(mr));
      continue;
    }
    try {
      const CodeAttribute& code = *me.code;
      mr.stmts = decompile_method(model, me);
      LoopForest forest = build_forest(code.instrs, mr.stmts);
      mr.rejected = forest.rejected;
      int max_locals = std::max<int>(code.max_locals, compute_max_locals(code.instrs, mr.desc, mr.is_static));
      Liveness live(code.instrs, max_locals);
      for (const auto& root : forest.roots) {
        NestReport nr;
        nr.nest = root;
        auto region_end = static_cast<std::int32_t>(root->region_end);
        auto live_after = [&live, region_end, max_locals](int slot) {
          return slot < max_locals && live.live_at(region_end, slot);
        };
        ClassifyOptions co;
        co.live_after_nest = live_after;
        co.fm = opts.fm;
        nr.analysis = analyze_nest(*root, co);
        XformOptions xo;
        xo.tile_sizes = opts.tile_sizes;
        xo.free_slot = max_locals;
        xo.live_after_nest = live_after;
        xo.fm = opts.fm;
        nr.candidates = enumerate(*root, nr.analysis, xo);
        mr.nests.push_back(std::move(nr));
      }
    } catch (const Error& e) {
      mr.skipped = e.what();
      mr.nests.clear();
    }
    rep.methods.push_back(std::move(mr));
  }
  return rep;
}

namespace {

ojson loop_json(const NormalizedLoop& l, int depth, const ParallelismType& pt) {
  ojson o;
  o["id"] = l.header.id;
  o["depth"] = depth;
  o["ivar"] = l.header.ivar;
  o["init"] = to_string(*l.header.init);
  o["rel"] = std::string(rel_name(l.header.rel));
  o["bound"] = to_string(*l.header.bound);
  o["step"] = l.header.step;
  o["trip_count"] = l.trip_count_expr();
  o["layout"] = std::string(layout_name(l.layout));
  if (const LevelVerdict* lv = pt.level(l.header.id)) {
    o["verdict"] = std::string(verdict_name(lv->verdict));
    auto reds = ojson::array();
    for (const auto& r : lv->reductions) {
      reds.push_back(ojson{{"op", std::string(reduction_op_name(r.op))}, {"lvalue", r.lvalue()}, {"type", r.type}});
    }
    o["reductions"] = reds;
    o["private"] = lv->private_scalars;
    o["reasons"] = lv->reasons;
  }
  return o;
}

}  // namespace

std::string ClassReport::to_json() const {
  ojson j;
  j["class"] = class_name;
  j["major_version"] = major_version;
  auto ms = ojson::array();
  bool any_parallel = false;
  for (const auto& m : methods) {
    ojson mo;
    mo["name"] = m.name;
    mo["descriptor"] = m.desc;
    if (!m.skipped.empty()) mo["skipped"] = m.skipped;
    if (!m.rejected.empty()) mo["rejected_loops"] = m.rejected;
    auto ns = ojson::array();
    for (const auto& nr : m.nests) {
      ojson no;
      no["root"] = nr.nest->header.id;
      no["summary"] = nr.analysis.pt.summary();
      auto loops = ojson::array();
      for_each_loop(*nr.nest, [&](const NormalizedLoop& l, int d) {
        loops.push_back(loop_json(l, d, nr.analysis.pt));
        if (const LevelVerdict* lv = nr.analysis.pt.level(l.header.id); lv && lv->verdict != Verdict::Serial)
          any_parallel = true;
      });
      no["loops"] = loops;
      auto accs = ojson::array();
      for (const auto& a : nr.analysis.accesses) accs.push_back(a.to_string());
      no["accesses"] = accs;
      auto deps = ojson::array();
      for (const auto& d : nr.analysis.deps) {
        if (d.exists == DepExists::No) continue;
        ojson dobj;
        dobj["source"] = nr.analysis.accesses[static_cast<std::size_t>(d.source)].to_string();
        dobj["sink"] = nr.analysis.accesses[static_cast<std::size_t>(d.sink)].to_string();
        dobj["carried_by"] = std::vector<int>(d.carried_by.begin(), d.carried_by.end());
        dobj["loop_independent"] = d.loop_independent;
        std::vector<std::string> kinds;
        for (auto k : d.classes) kinds.emplace_back(dep_kind_name(k));
        dobj["kinds"] = kinds;
        deps.push_back(dobj);
      }
      no["dependences"] = deps;
      if (!nr.analysis.pt.assumptions.empty()) no["assumptions"] = nr.analysis.pt.assumptions;
      auto cands = ojson::array();
      for (const auto& c : nr.candidates)
        cands.push_back(ojson{{"transform", c.describe()}, {"verdict", std::string(verdict_name(c.parallel_verdict))},
                              {"certificate", c.certificate}});
      no["candidates"] = cands;
      ns.push_back(no);
    }
    mo["nests"] = ns;
    ms.push_back(mo);
  }
  j["methods"] = ms;
  j["parallelizable"] = any_parallel;
  if (!any_parallel) j["note"] = "no parallelizable loop found";
  return j.dump(2) + "\n";
}

std::map<std::string, std::vector<std::uint8_t>> ClassParallelization::emit() const {
  std::map<std::string, std::vector<std::uint8_t>> out;
  out[driver.name()] = emit_class(driver);
  for (const auto& t : tasks) out[t.name()] = emit_class(t);
  return out;
}

std::string ClassParallelization::tune_report_json() const {
  ojson j;
  j["class"] = driver.name();
  auto arr = ojson::array();
  for (const auto& t : tunings) {
    ojson o;
    o["method"] = t.method;
    o["descriptor"] = t.desc;
    o["nest"] = t.nest;
    o["tuning"] = ojson::parse(t.result.report_json());
    arr.push_back(o);
  }
  j["nests"] = arr;
  j["warnings"] = warnings;
  j["changed"] = changed;
  return j.dump(2) + "\n";
}

ClassParallelization parallelize_class(const ClassModel& model, const ClassReport& report, Measurer& measurer,
                                       const PipelineConfig& cfg) {
  ClassParallelization out;
  out.driver = model;
  int next_task = cfg.codegen.first_task_index;
  for (const auto& mr : report.methods) {
    std::vector<NestPlan> chosen;
    measurer.set_scale(cfg.r);
    if (cfg.inputs_for) measurer.set_inputs(cfg.inputs_for(mr.name, mr.desc));
    for (const auto& nr : mr.nests) {
      if (nr.candidates.empty()) continue;
      TuneConfig tc;
      tc.codegen = cfg.codegen;
      tc.codegen.first_task_index = next_task;
      tc.r = cfg.r;
      tc.fixed_plans = chosen;
      NestTuning nt{mr.name, mr.desc, nr.nest->header.id, tune(out.driver, mr.name, mr.desc, nr.nest, nr.candidates, measurer, tc)};
      for (const auto& w : nt.result.warnings) out.warnings.push_back(mr.name + ": " + w);
      if (const TrialRecord* best = nt.result.best()) chosen.push_back(best->variant->plans.back());
      out.tunings.push_back(std::move(nt));
    }
    if (chosen.empty()) continue;
    CodegenOptions co = cfg.codegen;
    co.first_task_index = next_task;
    try {
      ParallelVariant v = parallelize(out.driver, mr.name, mr.desc, chosen, co);
      out.driver = v.driver;
      for (const auto& t : v.tasks) out.tasks.push_back(t);
      next_task += static_cast<int>(v.tasks.size());
      for (const auto& w : v.warnings) out.warnings.push_back(mr.name + ": " + w);
      out.variants.push_back(std::move(v));
      out.changed = true;
    } catch (const Error& e) {
      out.warnings.push_back(mr.name + ": combined rewrite failed, left unchanged: " + e.what());
    }
  }
  return out;
}

}  // namespace bcpar
