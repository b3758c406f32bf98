#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "bcpar/classfile.hpp"
#include "bcpar/value.hpp"

namespace bcpar {

struct ArrayObject {
  std::string type;  // array descriptor, e.g. "[D"
  ElemKind elem = ElemKind::Int;
  std::vector<Value> data;
};

struct InstanceObject {
  std::string class_name;
  std::map<std::string, Value> fields;  // absent = default value
};

/// Object store. Handle 0 is null; handle h refers to objects()[h-1].
class Heap {
 public:
  /// Allocates a zero-filled array. `length` must be non-negative.
  Value new_array(const std::string& type, std::int32_t length);
  /// Nested allocation for multianewarray; dims.size() <= rank of `type`.
  Value new_multi_array(const std::string& type, std::span<const std::int32_t> dims);
  Value new_instance(const std::string& class_name);

  bool valid(Value ref) const { return ref.tag == Value::Tag::Ref && ref.ref() != 0 && ref.ref() <= objects_.size(); }
  ArrayObject* array(Value ref);
  const ArrayObject* array(Value ref) const;
  InstanceObject* instance(Value ref);
  const InstanceObject* instance(Value ref) const;

  std::map<std::string, Value>& statics() { return statics_; }
  const std::map<std::string, Value>& statics() const { return statics_; }
  std::size_t size() const { return objects_.size(); }

 private:
  std::vector<std::variant<ArrayObject, InstanceObject>> objects_;
  std::map<std::string, Value> statics_;
};

/// Classes visible to the interpreter. Entries are shared, never copied.
class ClassPath {
 public:
  void add(std::shared_ptr<const ClassModel> model);
  /// Non-owning registration; the caller keeps `model` alive.
  void add_ref(const ClassModel& model);
  const ClassModel* find(std::string_view name) const;
  std::vector<std::string> names() const;

 private:
  std::map<std::string, std::shared_ptr<const ClassModel>, std::less<>> classes_;
};

enum class TrapKind {
  None,
  ArrayIndexOutOfBounds,
  NullPointer,
  Arithmetic,
  NegativeArraySize,
  StepBudgetExceeded,
  Unsupported,
  Linkage,
  StackOverflow,
};

std::string_view trap_name(TrapKind k);

struct Trap {
  TrapKind kind = TrapKind::None;
  std::string detail;
  int task = -1;  // index of the offending task in start order, -1 = driver
  explicit operator bool() const { return kind != TrapKind::None; }
};

struct ExecConfig {
  std::uint64_t step_budget = 1'000'000'000;
  int available_processors = 4;
  std::size_t trace_limit = 0;  // instructions logged; 0 disables tracing
  std::size_t max_frames = 1024;
};

/// How started threads are run when the driver joins them. Threads started
/// since the last join form a batch.
struct Schedule {
  enum class Mode { RunToCompletion, Interleaved };
  Mode mode = Mode::RunToCompletion;
  /// Order of batch members; indices beyond the batch are ignored and
  /// members missing from the permutation run afterwards in start order.
  std::vector<int> permutation;
  std::uint64_t seed = 0;  // Interleaved: context-switch decisions
  int max_quantum = 64;

  static Schedule in_order() { return {}; }
  static Schedule permuted(std::vector<int> p) {
    Schedule s;
    s.permutation = std::move(p);
    return s;
  }
};

struct BatchProfile {
  std::vector<std::uint64_t> task_steps;  // in start order
};

struct StepProfile {
  std::uint64_t driver_steps = 0;
  std::vector<BatchProfile> batches;

  std::uint64_t total() const;
  std::uint64_t max_task_sum() const;  // sum over batches of the largest task
  std::size_t task_count() const;
};

struct ExecResult {
  std::optional<Value> ret;
  Trap trap;
  std::uint64_t steps = 0;
  StepProfile profile;
  std::vector<std::string> trace;
};

/// Deterministic interpreter for the supported subset. Threads are simulated:
/// `Thread.start` queues a task, `Thread.join` runs the queued batch.
class Interpreter {
 public:
  Interpreter(const ClassPath& classes, Heap& heap, ExecConfig config = {}, Schedule schedule = {});
  ~Interpreter();
  Interpreter(const Interpreter&) = delete;
  Interpreter& operator=(const Interpreter&) = delete;

  /// Runs `owner.name(desc)` with one Value per declared parameter (receiver
  /// first for instance methods).
  ExecResult invoke(std::string_view owner, std::string_view name, std::string_view desc,
                    const std::vector<Value>& args);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

ExecResult exec_method(const ClassPath& classes, std::string_view owner, std::string_view name,
                       std::string_view desc, const std::vector<Value>& args, Heap& heap,
                       const ExecConfig& config = {}, const Schedule& schedule = {});

}  // namespace bcpar
