#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bcpar {

/// coeffs · x <= bound, or == bound when `equality` is set.
struct LinearRow {
  std::vector<std::int64_t> coeffs;
  std::int64_t bound = 0;
  bool equality = false;
  friend bool operator==(const LinearRow&, const LinearRow&) = default;
};

struct InequalitySystem {
  std::vector<std::string> vars;
  std::vector<LinearRow> rows;

  int add_var(std::string name);
  int var_index(const std::string& name) const;  // -1 when absent
  /// Rows are padded to the current variable count.
  void add_le(std::vector<std::int64_t> coeffs, std::int64_t bound);
  void add_ge(std::vector<std::int64_t> coeffs, std::int64_t bound);
  void add_eq(std::vector<std::int64_t> coeffs, std::int64_t bound);
  std::string to_string() const;
};

enum class FmVerdict { Infeasible, FeasibleRational };
std::string_view fm_verdict_name(FmVerdict v);

struct FmOptions {
  std::size_t row_cap = 10000;
  /// Elimination order (variable indices). Empty: cheapest variable first.
  std::vector<int> order;
};

struct FmResult {
  FmVerdict verdict = FmVerdict::FeasibleRational;
  bool capped = false;    // gave up on row count or coefficient overflow
  std::size_t peak_rows = 0;
};

/// Fourier-Motzkin elimination over the rationals. Equalities are
/// substituted away first, then inequality pairs are combined variable by
/// variable. Infeasible only when a row `0 <= negative` (or `0 == nonzero`)
/// appears, so the result is conservative for integer systems.
FmResult fm_eliminate(const InequalitySystem& sys, const FmOptions& opts = {});

}  // namespace bcpar
