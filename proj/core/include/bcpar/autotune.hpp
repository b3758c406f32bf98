#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "bcpar/equivalence.hpp"
#include "bcpar/parcodegen.hpp"
#include "bcpar/xform.hpp"

namespace bcpar {

enum class Backend { Interp, Jvm };
std::string_view backend_name(Backend b);
Backend parse_backend(std::string_view s);  // throws std::invalid_argument

struct MeasureConfig {
  std::int64_t r = 64;                 // problem scale handed to the input generator
  std::uint64_t task_overhead = 1000;  // interp: cost charged per started task
  std::uint64_t seed = 42;
  InputSpec inputs;
  ExecConfig exec;
  int repeats = 5;                     // jvm: median of this many runs
};

/// Cost of one run. Interp costs are step counts, JVM costs milliseconds.
class Measurer {
 public:
  explicit Measurer(MeasureConfig cfg = {}) : cfg_(std::move(cfg)) {}
  virtual ~Measurer() = default;
  virtual double measure(const ParallelVariant& v) = 0;
  /// Cost of the untouched method (the `$serial` copy inside `v.driver` is
  /// not used; `model` is measured directly).
  virtual double measure_serial(const ClassModel& model, const std::string& method, const std::string& desc) = 0;
  virtual std::string name() const = 0;

  const MeasureConfig& config() const { return cfg_; }
  void set_scale(std::int64_t r) { cfg_.r = r; }
  void set_inputs(InputSpec spec) { cfg_.inputs = std::move(spec); }

 protected:
  MeasureConfig cfg_;
};

/// Deterministic step-count model: driver steps + per batch the largest
/// task + overhead per task.
class InterpMeasurer : public Measurer {
 public:
  explicit InterpMeasurer(MeasureConfig cfg, const ClassPath* support = nullptr)
      : Measurer(std::move(cfg)), support_(support) {}
  double measure(const ParallelVariant& v) override;
  double measure_serial(const ClassModel& model, const std::string& method, const std::string& desc) override;
  std::string name() const override { return "interp"; }

  /// Cost of a finished run's profile.
  std::uint64_t cost_of(const StepProfile& p) const;

 private:
  const ClassPath* support_;
};

/// Runs emitted classes on a JVM found on PATH. The constructor throws
/// BackendUnavailable when there is none.
class JvmMeasurer : public Measurer {
 public:
  explicit JvmMeasurer(MeasureConfig cfg);
  double measure(const ParallelVariant& v) override;
  double measure_serial(const ClassModel& model, const std::string& method, const std::string& desc) override;
  std::string name() const override { return "jvm"; }

 private:
  double run(const std::map<std::string, std::vector<std::uint8_t>>& classes, const std::string& owner,
             const std::string& method, const std::string& desc, bool is_static);
  std::string java_;
};

/// Path of `java` on PATH, empty when absent.
std::string find_java();

/// Class `BcparHarness` whose main builds inputs for `desc` at scale n, calls
/// the method `repeats` times and prints each elapsed nanoTime delta.
ClassModel make_harness_class(const std::string& owner, const std::string& method, const std::string& desc,
                              bool is_static, const InputSpec& spec, std::int64_t n, int repeats);

std::unique_ptr<Measurer> make_measurer(Backend b, const MeasureConfig& cfg, const ClassPath* support = nullptr);

struct TrialRecord {
  std::size_t index = 0;
  TransformCandidate candidate;
  std::shared_ptr<const ParallelVariant> variant;  // null when building failed
  double cost = 0;
  std::int64_t r = 0;
  bool excluded = false;
  std::string warning;
};

/// Index of the smallest cost, first on ties. Empty input -> nullopt.
std::optional<std::size_t> select_min(const std::vector<double>& costs);

struct TuneConfig {
  CodegenOptions codegen;
  std::int64_t r = 64;
  /// Plans for other nests of the same method that stay in every variant.
  std::vector<NestPlan> fixed_plans;
};

struct TuneResult {
  std::vector<TrialRecord> trials;
  std::optional<std::size_t> selected;  // index into trials
  std::vector<std::string> warnings;

  const TrialRecord* best() const { return selected ? &trials[*selected] : nullptr; }
  std::string report_json() const;
};

/// Builds and measures one variant per candidate, keeps the cheapest.
/// No candidates -> empty result with a NoCandidates warning.
TuneResult tune(const ClassModel& model, const std::string& method, const std::string& desc,
                const std::shared_ptr<const NormalizedLoop>& nest, const std::vector<TransformCandidate>& candidates,
                Measurer& measurer, const TuneConfig& cfg);

}  // namespace bcpar
