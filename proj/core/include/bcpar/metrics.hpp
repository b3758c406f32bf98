#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bcpar {

/// S = t1 / tp. Throws NonPositiveTime.
double speedup(double t1, double tp);
/// E = t1 / (p * tp). Throws NonPositiveTime; p must be >= 1.
double efficiency(double t1, double tp, int p);

/// One measured cell: benchmark label, problem size, processor count, time.
struct RunRecord {
  std::string benchmark;
  std::int64_t n = 0;
  int p = 1;
  double t = 0;
};

struct ReportRow {
  std::string benchmark;
  std::int64_t n = 0;
  int p = 1;
  double t = 0, e = 0, s = 0;
};

enum class ReportFormat { Csv, Json };

/// Rows sorted by (benchmark, N, P). T(N,1) comes from the P=1 record of the
/// same benchmark and N; a missing baseline throws std::invalid_argument.
/// Empty input throws EmptyInput.
std::vector<ReportRow> build_rows(const std::vector<RunRecord>& records);

/// CSV `benchmark,N,P,T,E,S` rounded half-up to 2 decimals; JSON keeps
/// full precision.
std::string emit_report(const std::vector<RunRecord>& records, ReportFormat fmt);
std::string rows_to_csv(const std::vector<ReportRow>& rows);
std::string rows_to_json(const std::vector<ReportRow>& rows);

std::vector<ReportRow> parse_report_csv(const std::string& text);
std::vector<ReportRow> parse_report_json(const std::string& text);
/// {"records": [{"benchmark":..., "N":..., "P":..., "T":...}]} or a bare array.
std::vector<RunRecord> parse_records_json(const std::string& text);

double round_half_up(double x, int decimals = 2);
std::string format_fixed(double x, int decimals = 2);

}  // namespace bcpar
