#include "bcpar/autotune.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "bcpar/assembler.hpp"
#include "bcpar/error.hpp"

namespace bcpar {

namespace fs = std::filesystem;

std::string_view backend_name(Backend b) { return b == Backend::Interp ? "interp" : "jvm"; }

Backend parse_backend(std::string_view s) {
  if (s == "interp") return Backend::Interp;
  if (s == "jvm") return Backend::Jvm;
  throw std::invalid_argument("unknown backend '" + std::string(s) + "'");
}

std::optional<std::size_t> select_min(const std::vector<double>& costs) {
  if (costs.empty()) return std::nullopt;
  std::size_t best = 0;
  for (std::size_t i = 1; i < costs.size(); ++i)
    if (costs[i] < costs[best]) best = i;
  return best;
}

// ----------------------------------------------------------------- interp

std::uint64_t InterpMeasurer::cost_of(const StepProfile& p) const {
  return p.driver_steps + p.max_task_sum() + cfg_.task_overhead * p.task_count();
}

namespace {

double run_interp(const ClassPath& cp, const std::string& owner, const std::string& method, const std::string& desc,
                  const MeasureConfig& cfg, const InterpMeasurer& m) {
  const ClassModel* model = cp.find(owner);
  const MethodEntry* me = model ? model->find_method(method, desc) : nullptr;
  if (!me) throw MeasurementFailure("no method " + owner + "." + method + desc);
  GeneratedInput in = generate_inputs(owner, desc, me->is_static(), cfg.inputs, cfg.r, cfg.seed);
  ExecResult res = exec_method(cp, owner, method, desc, in.args, in.heap, cfg.exec);
  if (res.trap)
    throw MeasurementFailure(std::string(trap_name(res.trap.kind)) + " while measuring " + method + ": " +
                             res.trap.detail);
  return static_cast<double>(m.cost_of(res.profile));
}

void add_support(ClassPath& cp, const ClassPath* support, const std::string& skip) {
  if (!support) return;
  for (const auto& name : support->names())
    if (name != skip)
      if (const ClassModel* c = support->find(name)) cp.add_ref(*c);
}

}  // namespace

double InterpMeasurer::measure(const ParallelVariant& v) {
  ClassPath cp;
  add_support(cp, support_, v.driver.name());
  add_variant(cp, v);
  return run_interp(cp, v.driver.name(), v.method, v.descriptor, cfg_, *this);
}

double InterpMeasurer::measure_serial(const ClassModel& model, const std::string& method, const std::string& desc) {
  ClassPath cp;
  add_support(cp, support_, model.name());
  cp.add_ref(model);
  return run_interp(cp, model.name(), method, desc, cfg_, *this);
}

// -------------------------------------------------------------------- jvm

std::string find_java() {
  const char* path = std::getenv("PATH");
  if (!path) return {};
  std::stringstream ss(path);
  std::string dir;
  while (std::getline(ss, dir, ':')) {
    if (dir.empty()) continue;
    fs::path p = fs::path(dir) / "java";
    if (::access(p.c_str(), X_OK) == 0 && fs::is_regular_file(p)) return p.string();
  }
  return {};
}

ClassModel make_harness_class(const std::string& owner, const std::string& method, const std::string& desc,
                              bool is_static, const InputSpec& spec, std::int64_t n, int repeats) {
  ClassBuilder b("BcparHarness");
  b.add_default_constructor();
  CodeBuilder c(b.pool());
  auto sig = parse_method_descriptor(desc);
  int next = 1;
  std::vector<std::pair<Kind, int>> slots;
  if (!is_static) {
    c.new_object(owner);
    c.op(Opcode::dup);
    c.invoke(Opcode::invokespecial, owner, "<init>", "()V");
    c.store(Kind::Ref, next);
    slots.emplace_back(Kind::Ref, next++);
  }
  for (std::size_t i = 0; i < sig.params.size(); ++i) {
    const std::string& p = sig.params[i];
    const ParamSpec* ps = i < spec.params.size() ? &spec.params[i] : nullptr;
    Kind k = descriptor_kind(p);
    if (p[0] == '[') {
      auto rank = static_cast<std::size_t>(std::count(p.begin(), p.end(), '['));
      ElemKind leaf = descriptor_elem_kind(p.substr(rank));
      std::vector<std::int32_t> dims;
      if (ps && !ps->dims.empty()) {
        for (const auto& d : ps->dims) dims.push_back(static_cast<std::int32_t>(eval_scale(d, n)));
      } else if (leaf != ElemKind::Ref) {
        dims.assign(rank, static_cast<std::int32_t>(n));
      }
      if (dims.empty()) {
        c.push_null();
      } else {
        for (auto d : dims) c.push_int(d);
        if (dims.size() == 1 && rank == 1 && leaf != ElemKind::Ref) c.new_array(leaf);
        else c.multi_new_array(p, static_cast<int>(dims.size()));
      }
    } else {
      double v = (ps && !ps->value.empty()) ? eval_scale(ps->value, n) : static_cast<double>(n);
      switch (k) {
        case Kind::Int: c.push_int(static_cast<std::int32_t>(v)); break;
        case Kind::Long: c.push_long(static_cast<std::int64_t>(v)); break;
        case Kind::Float: c.push_float(static_cast<float>(v)); break;
        case Kind::Double: c.push_double(v); break;
        default: c.push_null(); break;
      }
    }
    c.store(k, next);
    slots.emplace_back(k, next);
    next += slot_width(k);
  }
  int counter = next++;
  int t0 = next;
  next += 2;
  c.push_int(0);
  c.store(Kind::Int, counter);
  Label body = c.new_label(), cond = c.new_label();
  c.jump(cond);
  c.bind(body);
  c.invoke(Opcode::invokestatic, "java/lang/System", "nanoTime", "()J");
  c.store(Kind::Long, t0);
  for (auto [k, s] : slots) c.load(k, s);
  c.invoke(is_static ? Opcode::invokestatic : Opcode::invokevirtual, owner, method, desc);
  Kind rk = descriptor_kind(sig.ret);
  if (rk != Kind::Void) c.op(slot_width(rk) == 2 ? Opcode::pop2 : Opcode::pop);
  c.field(Opcode::getstatic, "java/lang/System", "out", "Ljava/io/PrintStream;");
  c.invoke(Opcode::invokestatic, "java/lang/System", "nanoTime", "()J");
  c.load(Kind::Long, t0);
  c.op(Opcode::lsub);
  c.invoke(Opcode::invokevirtual, "java/io/PrintStream", "println", "(J)V");
  c.iinc(counter, 1);
  c.bind(cond);
  c.load(Kind::Int, counter);
  c.push_int(repeats);
  c.branch(Opcode::if_icmplt, body);
  c.ret(Kind::Void);
  b.add_method(access::kPublic | access::kStatic, "main", "([Ljava/lang/String;)V", c.finish());
  return std::move(b).build();
}

JvmMeasurer::JvmMeasurer(MeasureConfig cfg) : Measurer(std::move(cfg)), java_(find_java()) {
  if (java_.empty()) throw BackendUnavailable("no java executable on PATH");
}

double JvmMeasurer::run(const std::map<std::string, std::vector<std::uint8_t>>& classes, const std::string& owner,
                        const std::string& method, const std::string& desc, bool is_static) {
  static std::atomic<int> counter{0};
  fs::path dir = fs::temp_directory_path() /
                 ("bcpar-jvm-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::create_directories(dir);
  auto all = classes;
  all["BcparHarness"] = emit_class(make_harness_class(owner, method, desc, is_static, cfg_.inputs, cfg_.r, cfg_.repeats));
  for (const auto& [name, bytes] : all) {
    fs::path p = dir / (name + ".class");
    fs::create_directories(p.parent_path());
    write_file(p.string(), bytes);
  }
  std::string cmd = "\"" + java_ + "\" -cp \"" + dir.string() + "\" BcparHarness 2>&1";
  std::vector<double> times;
  std::string out;
  if (FILE* f = ::popen(cmd.c_str(), "r")) {
    char buf[256];
    while (std::fgets(buf, sizeof buf, f)) out += buf;
    int rc = ::pclose(f);
    std::stringstream ss(out);
    std::string line;
    while (std::getline(ss, line)) {
      try {
        std::size_t used = 0;
        long long ns = std::stoll(line, &used);
        if (used == line.size()) times.push_back(static_cast<double>(ns) / 1e6);
      } catch (const std::exception&) {
      }
    }
    if (rc != 0) times.clear();
  }
  std::error_code ec;
  fs::remove_all(dir, ec);
  if (times.empty()) throw MeasurementFailure("jvm run failed: " + out.substr(0, 400));
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

double JvmMeasurer::measure(const ParallelVariant& v) {
  const MethodEntry* m = v.driver.find_method(v.method, v.descriptor);
  return run(v.emit(), v.driver.name(), v.method, v.descriptor, m ? m->is_static() : true);
}

double JvmMeasurer::measure_serial(const ClassModel& model, const std::string& method, const std::string& desc) {
  const MethodEntry* m = model.find_method(method, desc);
  if (!m) throw MeasurementFailure("no method " + method + desc);
  return run({{model.name(), emit_class(model)}}, model.name(), method, desc, m->is_static());
}

std::unique_ptr<Measurer> make_measurer(Backend b, const MeasureConfig& cfg, const ClassPath* support) {
  if (b == Backend::Jvm) return std::make_unique<JvmMeasurer>(cfg);
  return std::make_unique<InterpMeasurer>(cfg, support);
}

// ------------------------------------------------------------------- tune

TuneResult tune(const ClassModel& model, const std::string& method, const std::string& desc,
                const std::shared_ptr<const NormalizedLoop>& nest, const std::vector<TransformCandidate>& candidates,
                Measurer& measurer, const TuneConfig& cfg) {
  TuneResult res;
  if (candidates.empty()) {
    res.warnings.push_back(NoCandidates("no legal candidate for " + method + desc + "; left unchanged").what());
    return res;
  }
  std::vector<double> costs;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    TrialRecord rec;
    rec.index = i;
    rec.candidate = candidates[i];
    rec.r = cfg.r;
    try {
      std::shared_ptr<const NormalizedLoop> applied = apply(candidates[i], *nest);
      std::vector<NestPlan> plans = cfg.fixed_plans;
      plans.push_back({applied, candidates[i]});
      auto v = std::make_shared<ParallelVariant>(parallelize(model, method, desc, plans, cfg.codegen));
      rec.variant = v;
      rec.cost = measurer.measure(*v);
      costs.push_back(rec.cost);
      kept.push_back(i);
    } catch (const Error& e) {
      rec.excluded = true;
      rec.warning = e.what();
      res.warnings.push_back("candidate " + std::to_string(i) + " (" + candidates[i].describe() + ") excluded: " + e.what());
    }
    res.trials.push_back(std::move(rec));
  }
  if (auto m = select_min(costs)) res.selected = kept[*m];
  else res.warnings.push_back("every candidate failed; method left unchanged");
  return res;
}

std::string TuneResult::report_json() const {
  nlohmann::ordered_json j;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& t : trials) {
    nlohmann::ordered_json o;
    o["index"] = t.index;
    o["candidate"] = t.candidate.describe();
    o["kind"] = std::string(transform_kind_name(t.candidate.kind));
    o["nest"] = t.candidate.nest;
    o["parallel_level"] = t.candidate.parallel_level;
    o["verdict"] = std::string(verdict_name(t.candidate.parallel_verdict));
    if (t.candidate.tile_size) o["tile_size"] = t.candidate.tile_size;
    o["certificate"] = t.candidate.certificate;
    o["r"] = t.r;
    o["cost"] = t.cost;
    o["excluded"] = t.excluded;
    if (!t.warning.empty()) o["warning"] = t.warning;
    arr.push_back(o);
  }
  j["trials"] = arr;
  j["selected"] = selected ? nlohmann::ordered_json(*selected) : nlohmann::ordered_json(nullptr);
  j["warnings"] = warnings;
  return j.dump(2);
}

}  // namespace bcpar
