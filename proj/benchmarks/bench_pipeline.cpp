#include <benchmark/benchmark.h>

#include <string>

#include "bcpar/analysis.hpp"
#include "bcpar/autotune.hpp"
#include "bcpar/decompile.hpp"
#include "bcpar/equivalence.hpp"
#include "bcpar/fm.hpp"
#include "bcpar/interp.hpp"
#include "bcpar/parcodegen.hpp"

using namespace bcpar;

namespace {

const std::vector<std::uint8_t>& bytes_of(const std::string& file) {
  static std::map<std::string, std::vector<std::uint8_t>> cache;
  auto it = cache.find(file);
  if (it == cache.end()) it = cache.emplace(file, read_file(std::string(BCPAR_FIXTURES_DIR) + "/" + file)).first;
  return it->second;
}

void BM_Parse(benchmark::State& st, std::string file) {
  const auto& bytes = bytes_of(file);
  for (auto _ : st) benchmark::DoNotOptimize(parse_class(bytes));
  st.SetBytesProcessed(static_cast<std::int64_t>(st.iterations() * bytes.size()));
}
BENCHMARK_CAPTURE(BM_Parse, matmul, std::string("MatMul.class"));
BENCHMARK_CAPTURE(BM_Parse, jpype_context, std::string("real/JPypeContext.class"));

void BM_Emit(benchmark::State& st) {
  ClassModel m = parse_class(bytes_of("real/JPypeContext.class"));
  for (auto _ : st) benchmark::DoNotOptimize(emit_class(m));
}
BENCHMARK(BM_Emit);

void BM_Decompile(benchmark::State& st) {
  ClassModel m = parse_class(bytes_of("FFT.class"));
  const MethodEntry& me = m.method_by_name("fft");
  for (auto _ : st) benchmark::DoNotOptimize(decompile_method(m, me));
}
BENCHMARK(BM_Decompile);

void BM_Analyze(benchmark::State& st, std::string file) {
  ClassModel m = parse_class(bytes_of(file));
  for (auto _ : st) benchmark::DoNotOptimize(analyze_class(m));
}
BENCHMARK_CAPTURE(BM_Analyze, matmul, std::string("MatMul.class"));
BENCHMARK_CAPTURE(BM_Analyze, nbody, std::string("NBody.class"));
BENCHMARK_CAPTURE(BM_Analyze, fft, std::string("FFT.class"));

// Dependence system of a 3-deep nest: two iteration vectors, bounds and
// one subscript equality.
void BM_FourierMotzkin(benchmark::State& st) {
  InequalitySystem s;
  for (const char* v : {"i", "j", "k", "i'", "j'", "k'"}) s.add_var(v);
  for (int v = 0; v < 6; ++v) {
    std::vector<std::int64_t> c(6, 0);
    c[static_cast<std::size_t>(v)] = 1;
    s.add_le(c, 63);
    s.add_ge(c, 0);
  }
  s.add_eq({1, 2, -1, -1, -2, 1}, 0);
  s.add_le({1, 0, 0, -1, 0, 0}, -1);
  for (auto _ : st) benchmark::DoNotOptimize(fm_eliminate(s));
}
BENCHMARK(BM_FourierMotzkin);

void BM_Parallelize(benchmark::State& st) {
  ClassModel m = parse_class(bytes_of("MatMul.class"));
  ClassReport r = analyze_class(m);
  const NestReport& nr = r.method("multiply")->nests.at(0);
  NestPlan plan{apply(nr.candidates.at(0), *nr.nest), nr.candidates.at(0)};
  for (auto _ : st) benchmark::DoNotOptimize(parallelize(m, "multiply", "([[D[[D)[[D", {plan}));
}
BENCHMARK(BM_Parallelize);

void BM_InterpMatMul(benchmark::State& st) {
  ClassModel m = parse_class(bytes_of("MatMul.class"));
  ClassPath cp;
  cp.add_ref(m);
  auto n = st.range(0);
  std::uint64_t steps = 0;
  for (auto _ : st) {
    GeneratedInput in = generate_inputs("MatMul", "([[D[[D)[[D", true, {}, n, 1);
    ExecResult r = exec_method(cp, "MatMul", "multiply", "([[D[[D)[[D", in.args, in.heap);
    steps += r.steps;
  }
  st.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_InterpMatMul)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_ParallelMatMul(benchmark::State& st) {
  ClassModel m = parse_class(bytes_of("MatMul.class"));
  ClassReport r = analyze_class(m);
  const NestReport& nr = r.method("multiply")->nests.at(0);
  CodegenOptions o;
  o.n_workers = static_cast<int>(st.range(0));
  ParallelVariant v = parallelize(m, "multiply", "([[D[[D)[[D", {NestPlan{apply(nr.candidates.at(0), *nr.nest), nr.candidates.at(0)}}, o);
  MeasureConfig mc;
  mc.r = 16;
  InterpMeasurer meas(mc);
  double cost = 0;
  for (auto _ : st) cost = meas.measure(v);
  st.counters["model_cost"] = cost;
}
BENCHMARK(BM_ParallelMatMul)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_CheckEquivalence(benchmark::State& st) {
  ClassModel m = parse_class(bytes_of("Histogram.class"));
  ClassReport r = analyze_class(m);
  const NestReport& nr = r.method("histogram")->nests.at(0);
  ParallelVariant v = parallelize(m, "histogram", "([I[II)V", {NestPlan{apply(nr.candidates.at(0), *nr.nest), nr.candidates.at(0)}});
  EquivalenceConfig cfg;
  cfg.n = 512;
  cfg.inputs = parse_input_spec(R"({"params":[{"range":[0,16]},{"dims":[16]},{"value":"n"}]})");
  for (auto _ : st) benchmark::DoNotOptimize(check_equivalence(v, nullptr, cfg));
}
BENCHMARK(BM_CheckEquivalence)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
