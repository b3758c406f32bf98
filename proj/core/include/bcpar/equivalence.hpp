#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bcpar/interp.hpp"
#include "bcpar/parcodegen.hpp"

namespace bcpar {

/// How to build one parameter. Sizes and values are written as "n",
/// "log2n", or a literal number; n is the problem scale.
struct ParamSpec {
  std::vector<std::string> dims;  // arrays: one entry per dimension
  std::optional<double> lo, hi;   // arrays: element range [lo, hi)
  std::string value;              // scalars
};

struct InputSpec {
  std::vector<ParamSpec> params;
  bool empty() const { return params.empty(); }
};

/// {"params": [{"dims": ["n", 16], "range": [0, 16]}, {"value": "n"}, ...]}
InputSpec parse_input_spec(const std::string& json_text);
std::string input_spec_to_json(const InputSpec& spec);

struct GeneratedInput {
  Heap heap;
  std::vector<Value> args;  // receiver first for instance methods
};

/// Deterministic inputs for `desc`. Without a spec: int scalars are n,
/// arrays are n long per dimension with int elements in [0, n) and floating
/// elements in [-1, 1), other references are null.
GeneratedInput generate_inputs(const std::string& owner, const std::string& desc, bool is_static,
                               const InputSpec& spec, std::int64_t n, std::uint64_t seed);

/// Evaluates "n", "log2n" or a number.
double eval_scale(const std::string& text, std::int64_t n);

struct RunTarget {
  const ClassPath* classes = nullptr;
  std::string owner, method, desc;
  bool is_static = true;
};

struct EquivalenceConfig {
  int n_schedules = 20;
  /// Relative tolerance for float/double values; 0 compares bits.
  double tolerance = 1e-9;
  std::uint64_t seed = 42;
  std::int64_t n = 16;
  InputSpec inputs;
  ExecConfig exec;
  bool interleaved = false;  // random context switches instead of run-to-completion
};

struct Witness {
  std::vector<int> schedule;
  std::string location;  // "return", "arg1[3][2]", "trap"
  std::string expected, actual;
};

struct EquivalenceVerdict {
  bool pass = false;
  int schedules_run = 0;
  double max_deviation = 0;  // largest relative float difference seen
  std::optional<Witness> witness;
  std::string error;         // serial run failed, etc.
};

/// Runs `serial` once and `variant` under n_schedules seeded permutations of
/// task order, comparing the return value and everything reachable from the
/// arguments.
EquivalenceVerdict check_equivalence(const RunTarget& serial, const RunTarget& variant, const EquivalenceConfig& cfg);

/// Compares `<method>$serial` with `<method>` inside the variant's classes.
/// `support` supplies other classes the code refers to (may be null).
EquivalenceVerdict check_equivalence(const ParallelVariant& v, const ClassPath* support, const EquivalenceConfig& cfg);

/// Adds the variant's driver and task classes (non-owning).
void add_variant(ClassPath& cp, const ParallelVariant& v);

/// Structural comparison of two values in two heaps. Returns the first
/// difference as (location, expected, actual); updates max_dev.
std::optional<Witness> compare_values(const Heap& ha, Value a, const Heap& hb, Value b, const std::string& where,
                                      double tolerance, double& max_dev);

}  // namespace bcpar
