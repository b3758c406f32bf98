#include "bcpar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "bcpar/error.hpp"

namespace bcpar {

double speedup(double t1, double tp) {
  if (!(t1 > 0) || !(tp > 0)) throw NonPositiveTime("times must be positive");
  return t1 / tp;
}

double efficiency(double t1, double tp, int p) {
  if (p < 1) throw std::invalid_argument("processor count must be >= 1");
  return speedup(t1, tp) / p;
}

double round_half_up(double x, int decimals) {
  double scale = std::pow(10.0, decimals);
  double y = std::fabs(x) * scale;
  double r = std::floor(y + 0.5 + 1e-9) / scale;
  return std::copysign(r, x);
}

std::string format_fixed(double x, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, round_half_up(x, decimals));
  std::string s = buf;
  if (s.starts_with("-") && std::stod(s) == 0) s.erase(0, 1);
  return s;
}

std::vector<ReportRow> build_rows(const std::vector<RunRecord>& records) {
  if (records.empty()) throw EmptyInput("no run records");
  std::map<std::pair<std::string, std::int64_t>, double> base;
  for (const auto& r : records)
    if (r.p == 1) base[{r.benchmark, r.n}] = r.t;
  std::vector<ReportRow> rows;
  for (const auto& r : records) {
    auto it = base.find({r.benchmark, r.n});
    if (it == base.end())
      throw std::invalid_argument("no P=1 record for " + r.benchmark + " N=" + std::to_string(r.n));
    ReportRow row{r.benchmark, r.n, r.p, r.t, 0, 0};
    row.s = speedup(it->second, r.t);
    row.e = row.s / r.p;
    rows.push_back(row);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ReportRow& a, const ReportRow& b) {
    return std::tie(a.benchmark, a.n, a.p) < std::tie(b.benchmark, b.n, b.p);
  });
  return rows;
}

std::string rows_to_csv(const std::vector<ReportRow>& rows) {
  std::string out = "benchmark,N,P,T,E,S\n";
  for (const auto& r : rows) {
    out += r.benchmark + "," + std::to_string(r.n) + "," + std::to_string(r.p) + "," + format_fixed(r.t) + "," +
           format_fixed(r.e) + "," + format_fixed(r.s) + "\n";
  }
  return out;
}

std::string rows_to_json(const std::vector<ReportRow>& rows) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json o;
    o["benchmark"] = r.benchmark;
    o["N"] = r.n;
    o["P"] = r.p;
    o["T"] = r.t;
    o["E"] = r.e;
    o["S"] = r.s;
    arr.push_back(o);
  }
  nlohmann::ordered_json j;
  j["rows"] = arr;
  return j.dump(2) + "\n";
}

std::string emit_report(const std::vector<RunRecord>& records, ReportFormat fmt) {
  auto rows = build_rows(records);
  return fmt == ReportFormat::Csv ? rows_to_csv(rows) : rows_to_json(rows);
}

std::vector<ReportRow> parse_report_csv(const std::string& text) {
  std::vector<ReportRow> rows;
  std::stringstream ss(text);
  std::string line;
  bool header = true;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      if (line != "benchmark,N,P,T,E,S") throw std::invalid_argument("unexpected CSV header: " + line);
      header = false;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (f.size() != 6) throw std::invalid_argument("bad CSV row: " + line);
    rows.push_back({f[0], std::stoll(f[1]), std::stoi(f[2]), std::stod(f[3]), std::stod(f[4]), std::stod(f[5])});
  }
  return rows;
}

std::vector<ReportRow> parse_report_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  std::vector<ReportRow> rows;
  for (const auto& o : j.at("rows")) {
    rows.push_back({o.at("benchmark").get<std::string>(), o.at("N").get<std::int64_t>(), o.at("P").get<int>(),
                    o.at("T").get<double>(), o.at("E").get<double>(), o.at("S").get<double>()});
  }
  return rows;
}

std::vector<RunRecord> parse_records_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  const auto& arr = j.is_array() ? j : j.at("records");
  std::vector<RunRecord> out;
  for (const auto& o : arr) {
    out.push_back({o.at("benchmark").get<std::string>(), o.at("N").get<std::int64_t>(), o.at("P").get<int>(),
                   o.at("T").get<double>()});
  }
  return out;
}

}  // namespace bcpar
