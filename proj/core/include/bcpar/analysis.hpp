#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bcpar/autotune.hpp"
#include "bcpar/depcheck.hpp"
#include "bcpar/loopx.hpp"
#include "bcpar/xform.hpp"

namespace bcpar {

struct NestReport {
  std::shared_ptr<const NormalizedLoop> nest;
  NestAnalysis analysis;
  std::vector<TransformCandidate> candidates;
};

struct MethodReport {
  std::string name, desc;
  bool is_static = true;
  std::string skipped;  // non-empty when the method was not analyzed
  std::vector<Stmt> stmts;
  std::vector<std::string> rejected;
  std::vector<NestReport> nests;
};

struct AnalysisOptions {
  std::vector<int> tile_sizes{32, 64, 128};
  FmOptions fm;
};

struct ClassReport {
  std::string class_name;
  int major_version = 0;
  std::vector<MethodReport> methods;

  std::size_t loop_count() const;
  std::size_t candidate_count() const;
  const MethodReport* method(const std::string& name) const;
  std::string to_json() const;
};

/// decompile -> loop forest -> dependence analysis -> candidates, per method.
/// Per-method failures are recorded in `skipped`, never thrown.
ClassReport analyze_class(const ClassModel& model, const AnalysisOptions& opts = {});

/// Inputs used to measure a method during tuning.
using InputsFor = std::function<InputSpec(const std::string& method, const std::string& desc)>;

struct PipelineConfig {
  CodegenOptions codegen;
  AnalysisOptions analysis;
  std::int64_t r = 64;
  InputsFor inputs_for;  // unset: the measurer's inputs are used as they are
};

struct NestTuning {
  std::string method, desc;
  int nest = -1;
  TuneResult result;
};

struct ClassParallelization {
  ClassModel driver;
  std::vector<ClassModel> tasks;
  std::vector<NestTuning> tunings;
  std::vector<std::string> warnings;
  std::vector<ParallelVariant> variants;  // one per rewritten method, in order
  bool changed = false;

  std::map<std::string, std::vector<std::uint8_t>> emit() const;
  std::string tune_report_json() const;
};

/// Tunes every nest with candidates and rewrites the class. Methods are
/// handled in declaration order, nests in textual order; each nest is tuned
/// with the already selected plans of earlier nests in place.
ClassParallelization parallelize_class(const ClassModel& model, const ClassReport& report, Measurer& measurer,
                                       const PipelineConfig& cfg);

}  // namespace bcpar
