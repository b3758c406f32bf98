#pragma once

#include <string>
#include <vector>

#include "bcpar/analysis.hpp"
#include "bcpar/classfile.hpp"
#include "bcpar/interp.hpp"
#include "bcpar/parcodegen.hpp"

namespace bcpar::testkit {

inline std::string fixture_path(const std::string& rel) { return std::string(BCPAR_FIXTURES_DIR) + "/" + rel; }

inline ClassModel load_fixture(const std::string& rel) { return parse_class(read_file(fixture_path(rel))); }

inline Value int_array(Heap& h, const std::vector<std::int32_t>& v) {
  Value a = h.new_array("[I", static_cast<std::int32_t>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) h.array(a)->data[i] = Value::of_int(v[i]);
  return a;
}

inline Value double_array(Heap& h, const std::vector<double>& v) {
  Value a = h.new_array("[D", static_cast<std::int32_t>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) h.array(a)->data[i] = Value::of_double(v[i]);
  return a;
}

inline Value double_matrix(Heap& h, const std::vector<std::vector<double>>& m) {
  Value outer = h.new_array("[[D", static_cast<std::int32_t>(m.size()));
  for (std::size_t i = 0; i < m.size(); ++i) h.array(outer)->data[i] = double_array(h, m[i]);
  return outer;
}

inline std::vector<std::int32_t> ints_of(const Heap& h, Value a) {
  std::vector<std::int32_t> out;
  for (const auto& v : h.array(a)->data) out.push_back(v.i());
  return out;
}

inline std::vector<double> doubles_of(const Heap& h, Value a) {
  std::vector<double> out;
  for (const auto& v : h.array(a)->data) out.push_back(v.d());
  return out;
}

inline const NestReport& nest_of(const ClassReport& r, const std::string& method, std::size_t k = 0) {
  return r.method(method)->nests.at(k);
}

inline const TransformCandidate* find_candidate(const NestReport& nr, const std::string& describe) {
  for (const auto& c : nr.candidates)
    if (c.describe() == describe) return &c;
  return nullptr;
}

inline std::vector<std::string> described(const NestReport& nr) {
  std::vector<std::string> out;
  for (const auto& c : nr.candidates) out.push_back(c.describe());
  return out;
}

/// Parallelizes one candidate of nest k of `method`.
inline ParallelVariant variant_for(const ClassModel& m, const ClassReport& r, const std::string& method,
                                   const std::string& cand, CodegenOptions opts = {}, std::size_t k = 0) {
  const NestReport& nr = nest_of(r, method, k);
  const TransformCandidate* c = find_candidate(nr, cand);
  if (!c) throw std::runtime_error("no candidate " + cand);
  const MethodReport* mr = r.method(method);
  return parallelize(m, method, mr->desc, {NestPlan{apply(*c, *nr.nest), *c}}, opts);
}

}  // namespace bcpar::testkit
