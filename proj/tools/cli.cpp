#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcpar/analysis.hpp"
#include "bcpar/autotune.hpp"
#include "bcpar/classfile.hpp"
#include "bcpar/equivalence.hpp"
#include "bcpar/error.hpp"
#include "bcpar/metrics.hpp"

namespace bcpar::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

struct Options {
  std::string workers = "4";
  std::string chunks = "block";
  std::vector<int> tiles{32, 64, 128};
  std::int64_t r = 64;
  std::string backend = "interp";
  int schedules = 20;
  double tol = 1e-9;
  std::uint64_t seed = 42;
  std::string out;
  bool csv = false;
  std::string inputs;
  std::int64_t n = 16;
  std::string method;
  std::uint64_t overhead = 1000;
  bool interleaved = false;

  // positional / command specific
  std::string class_path;
  std::string variant_dir;
  std::vector<std::int64_t> sizes{16, 32};
  std::vector<int> procs{1, 2, 4};
  int repeats = 5;
  std::string aggregate = "mean";
  std::string label;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream o(p, std::ios::binary);
  if (!o) throw std::runtime_error("cannot write " + p.string());
  o << text;
}

/// Writes to --out when given, else to `out`.
void emit_text(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) out << text;
  else write_text(o.out, text);
}

ClassModel load_class(const std::string& path) { return parse_class(read_file(path)); }

/// Accepts {"params": [...]}, {"<method>": {"params": [...]}, ...} or a
/// fixture manifest {"kernels": [{"method": ..., "inputs": ..., "n": ...}]}.
struct InputsFile {
  std::map<std::string, InputSpec> per_method;
  std::map<std::string, std::int64_t> scale;
  std::optional<InputSpec> all;

  InputSpec spec_for(const std::string& method) const {
    if (auto it = per_method.find(method); it != per_method.end()) return it->second;
    return all.value_or(InputSpec{});
  }
};

InputsFile load_inputs(const std::string& path) {
  InputsFile f;
  if (path.empty()) return f;
  auto j = nlohmann::json::parse(slurp(path));
  if (j.contains("params")) {
    f.all = parse_input_spec(j.dump());
  } else if (j.contains("kernels")) {
    for (const auto& k : j["kernels"]) {
      std::string m = k.at("method").get<std::string>();
      if (k.contains("inputs")) f.per_method[m] = parse_input_spec(k["inputs"].dump());
      if (k.contains("n")) f.scale[m] = k["n"].get<std::int64_t>();
    }
  } else {
    for (const auto& [m, spec] : j.items()) f.per_method[m] = parse_input_spec(spec.dump());
  }
  return f;
}

MeasureConfig measure_config(const Options& o) {
  MeasureConfig mc;
  mc.r = o.r;
  mc.task_overhead = o.overhead;
  mc.seed = o.seed;
  return mc;
}

PipelineConfig pipeline_config(const Options& o, int workers_override = 0) {
  PipelineConfig pc;
  if (workers_override > 0) {
    pc.codegen.n_workers = workers_override;
  } else if (o.workers == "auto") {
    pc.codegen.runtime_workers = true;
  } else {
    pc.codegen.n_workers = std::stoi(o.workers);
    if (pc.codegen.n_workers < 1) throw std::invalid_argument("--workers must be >= 1 or 'auto'");
  }
  if (o.chunks == "block") pc.codegen.strategy = ChunkStrategy::Block;
  else if (o.chunks == "cyclic") pc.codegen.strategy = ChunkStrategy::Cyclic;
  else throw std::invalid_argument("--chunks must be block or cyclic");
  pc.analysis.tile_sizes = o.tiles;
  pc.r = o.r;
  return pc;
}

// ---------------------------------------------------------------- analyze

int cmd_analyze(const Options& o, std::ostream& out, std::ostream&) {
  ClassModel model = load_class(o.class_path);
  AnalysisOptions ao;
  ao.tile_sizes = o.tiles;
  emit_text(o, out, analyze_class(model, ao).to_json());
  return kOk;
}

// ------------------------------------------------------------ parallelize

void write_classes(const fs::path& dir, const std::map<std::string, std::vector<std::uint8_t>>& classes,
                   std::ostream& out) {
  for (const auto& [name, bytes] : classes) {
    fs::path p = dir / (name + ".class");
    fs::create_directories(p.parent_path());
    write_file(p.string(), bytes);
    out << "wrote " << p.string() << "\n";
  }
}

int cmd_parallelize(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.out.empty()) throw std::invalid_argument("parallelize needs --out <dir>");
  std::vector<std::uint8_t> original = read_file(o.class_path);
  ClassModel model = parse_class(original);
  PipelineConfig pc = pipeline_config(o);
  ClassReport report = analyze_class(model, pc.analysis);
  fs::path dir = o.out;
  fs::create_directories(dir);
  auto passthrough = [&](const std::string& why, const std::string& report_json) {
    err << "warning: " << why << "; copying " << model.name() << " unchanged\n";
    write_classes(dir, {{model.name(), original}}, out);
    write_text(dir / "tune-report.json", report_json);
    return kNoCandidate;
  };
  if (report.candidate_count() == 0) {
    ojson j;
    j["class"] = model.name();
    j["nests"] = ojson::array();
    j["warnings"] = {"no parallelizable loop"};
    j["changed"] = false;
    return passthrough("no parallelizable loop", j.dump(2) + "\n");
  }
  InputsFile inputs = load_inputs(o.inputs);
  pc.inputs_for = [&inputs](const std::string& m, const std::string&) { return inputs.spec_for(m); };
  auto measurer = make_measurer(parse_backend(o.backend), measure_config(o));
  ClassParallelization result = parallelize_class(model, report, *measurer, pc);
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";
  if (!result.changed) return passthrough("every candidate failed", result.tune_report_json());
  write_classes(dir, result.emit(), out);
  write_text(dir / "tune-report.json", result.tune_report_json());
  out << "wrote " << (dir / "tune-report.json").string() << "\n";
  return kOk;
}

// ----------------------------------------------------------------- verify

std::vector<std::shared_ptr<const ClassModel>> load_dir(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".class") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<std::shared_ptr<const ClassModel>> out;
  for (const auto& f : files) out.push_back(std::make_shared<const ClassModel>(load_class(f.string())));
  return out;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  auto original = std::make_shared<const ClassModel>(load_class(o.class_path));
  ClassPath serial_cp;
  serial_cp.add(original);
  ClassPath variant_cp;
  for (auto& m : load_dir(o.variant_dir)) variant_cp.add(m);
  const ClassModel* driver = variant_cp.find(original->name());
  if (!driver) {
    err << "error: " << o.variant_dir << " has no class " << original->name() << "\n";
    return kError;
  }
  std::vector<std::pair<std::string, std::string>> methods;
  for (const auto& me : driver->methods) {
    std::string name = driver->method_name(me);
    std::string desc = driver->method_descriptor(me);
    bool rewritten = driver->find_method(name + "$serial", desc) != nullptr;
    if (o.method.empty() ? rewritten : name == o.method) methods.emplace_back(name, desc);
  }
  if (methods.empty()) {
    err << "error: no rewritten method to verify\n";
    return kError;
  }
  InputsFile inputs = load_inputs(o.inputs);
  ojson report = ojson::array();
  bool ok = true;
  for (const auto& [name, desc] : methods) {
    const MethodEntry* me = original->find_method(name, desc);
    if (!me) {
      err << "error: original has no method " << name << desc << "\n";
      return kError;
    }
    EquivalenceConfig cfg;
    cfg.n_schedules = o.schedules;
    cfg.tolerance = o.tol;
    cfg.seed = o.seed;
    auto sc = inputs.scale.find(name);
    cfg.n = sc != inputs.scale.end() ? sc->second : o.n;
    cfg.inputs = inputs.spec_for(name);
    cfg.interleaved = o.interleaved;
    RunTarget s{&serial_cp, original->name(), name, desc, me->is_static()};
    RunTarget v{&variant_cp, original->name(), name, desc, me->is_static()};
    EquivalenceVerdict verdict = check_equivalence(s, v, cfg);
    ojson j;
    j["method"] = name;
    j["descriptor"] = desc;
    j["pass"] = verdict.pass;
    j["schedules_run"] = verdict.schedules_run;
    j["tolerance"] = o.tol;
    j["max_deviation"] = verdict.max_deviation;
    if (verdict.witness) {
      j["witness"] = ojson{{"schedule", verdict.witness->schedule},
                           {"location", verdict.witness->location},
                           {"expected", verdict.witness->expected},
                           {"actual", verdict.witness->actual}};
    }
    if (!verdict.error.empty()) j["error"] = verdict.error;
    report.push_back(j);
    if (!verdict.error.empty()) {
      emit_text(o, out, report.dump(2) + "\n");
      err << "error: " << verdict.error << "\n";
      return kError;
    }
    ok = ok && verdict.pass;
  }
  emit_text(o, out, report.dump(2) + "\n");
  if (!ok) err << "verification failed\n";
  return ok ? kOk : kVerifyFailed;
}

// ------------------------------------------------------------------ bench

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

double aggregate(std::vector<double> v, const std::string& how) {
  if (how == "median") {
    std::sort(v.begin(), v.end());
    return v.size() % 2 ? v[v.size() / 2] : (v[v.size() / 2 - 1] + v[v.size() / 2]) / 2;
  }
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
  ClassModel model = load_class(o.class_path);
  MeasureConfig mc = measure_config(o);
  std::unique_ptr<Measurer> measurer = make_measurer(parse_backend(o.backend), mc);
  InputsFile inputs = load_inputs(o.inputs);
  PipelineConfig pc = pipeline_config(o);
  ClassReport report = analyze_class(model, pc.analysis);
  const MethodReport* target = nullptr;
  for (const auto& m : report.methods) {
    bool has = std::any_of(m.nests.begin(), m.nests.end(), [](const NestReport& n) { return !n.candidates.empty(); });
    if (o.method.empty() ? has : m.name == o.method) {
      target = &m;
      break;
    }
  }
  if (!target) {
    err << "error: no method to benchmark\n";
    return kNoCandidate;
  }
  ClassReport only = report;
  for (auto& m : only.methods)
    if (m.name != target->name || m.desc != target->desc) m.nests.clear();
  measurer->set_inputs(inputs.spec_for(target->name));
  std::string label = o.label.empty() ? lower(model.name()) : o.label;
  std::vector<RunRecord> records;
  int repeats = std::max(1, o.repeats);
  for (std::int64_t n : o.sizes) {
    for (int p : o.procs) {
      std::vector<double> samples;
      if (p == 1) {
        measurer->set_scale(n);
        for (int k = 0; k < repeats; ++k) samples.push_back(measurer->measure_serial(model, target->name, target->desc));
      } else {
        PipelineConfig ppc = pipeline_config(o, p);
        ppc.r = std::min(o.r, n);
        ClassParallelization cp = parallelize_class(model, only, *measurer, ppc);
        if (cp.variants.empty()) {
          err << "error: no variant for P=" << p << "\n";
          return kNoCandidate;
        }
        measurer->set_scale(n);
        for (int k = 0; k < repeats; ++k) samples.push_back(measurer->measure(cp.variants.front()));
      }
      records.push_back({label, n, p, aggregate(samples, o.aggregate)});
    }
  }
  emit_text(o, out, emit_report(records, o.csv ? ReportFormat::Csv : ReportFormat::Json));
  return kOk;
}

// ----------------------------------------------------------------- report

int cmd_report(const Options& o, std::ostream& out, std::ostream&) {
  auto records = parse_records_json(slurp(o.class_path));
  emit_text(o, out, emit_report(records, o.csv ? ReportFormat::Csv : ReportFormat::Json));
  return kOk;
}

int exit_code_for(const Error& e) {
  const std::string& k = e.kind();
  if (k == "MalformedClassfile") return kMalformed;
  if (k == "UnsupportedVersion") return kUnsupportedVersion;
  if (k == "BackendUnavailable") return kBackendUnavailable;
  if (k == "NoCandidates") return kNoCandidate;
  return kError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"bcpar: find and parallelize loops in JVM classfiles"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file; command-line flags override it");
  app.add_option("--workers", o.workers, "worker count, or 'auto' for availableProcessors()")->capture_default_str();
  app.add_option("--chunks", o.chunks, "block or cyclic")->capture_default_str();
  app.add_option("--tiles", o.tiles, "tile sizes offered to the autotuner")->delimiter(',')->capture_default_str();
  app.add_option("--r", o.r, "problem scale for autotuning trials")->capture_default_str();
  app.add_option("--backend", o.backend, "interp or jvm")->capture_default_str();
  app.add_option("--schedules", o.schedules, "task orders tried by verify")->capture_default_str();
  app.add_option("--tol", o.tol, "relative float tolerance; 0 compares bits")->capture_default_str();
  app.add_option("--seed", o.seed, "seed for inputs and schedules")->capture_default_str();
  app.add_option("--out", o.out, "output file or directory");
  app.add_flag("--csv", o.csv, "CSV instead of JSON where supported");
  app.add_option("--inputs", o.inputs, "input spec JSON (or a fixture manifest)");
  app.add_option("--n", o.n, "problem scale for verify")->capture_default_str();
  app.add_option("--method", o.method, "restrict to one method");
  app.add_option("--overhead", o.overhead, "interp cost charged per task")->capture_default_str();
  app.add_flag("--interleaved", o.interleaved, "verify with random context switches");

  auto* analyze = app.add_subcommand("analyze", "report loops, dependences and candidates as JSON");
  analyze->add_option("class", o.class_path)->required();
  auto* par = app.add_subcommand("parallelize", "tune and emit the parallel classes");
  par->add_option("class", o.class_path)->required();
  auto* verify = app.add_subcommand("verify", "compare a rewritten class with the original under many schedules");
  verify->add_option("original", o.class_path)->required();
  verify->add_option("variant_dir", o.variant_dir)->required();
  auto* bench = app.add_subcommand("bench", "measure T(N,P) and report speedup and efficiency");
  bench->add_option("class", o.class_path)->required();
  bench->add_option("--sizes", o.sizes, "problem sizes")->delimiter(',')->capture_default_str();
  bench->add_option("--procs", o.procs, "worker counts; 1 runs the serial method")->delimiter(',')->capture_default_str();
  bench->add_option("--repeats", o.repeats, "runs per cell")->capture_default_str();
  bench->add_option("--aggregate", o.aggregate, "mean or median")->capture_default_str();
  bench->add_option("--label", o.label, "benchmark column (default: lower-case class name)");
  auto* report = app.add_subcommand("report", "turn run records (JSON) into the T/E/S table");
  report->add_option("records", o.class_path)->required();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }
  try {
    if (*analyze) return cmd_analyze(o, out, err);
    if (*par) return cmd_parallelize(o, out, err);
    if (*verify) return cmd_verify(o, out, err);
    if (*bench) return cmd_bench(o, out, err);
    if (*report) return cmd_report(o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

}  // namespace bcpar::cli
