#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "bcpar/analysis.hpp"
#include "bcpar/autotune.hpp"
#include "bcpar/error.hpp"
#include "testutil.hpp"

using namespace bcpar;
using namespace bcpar::testkit;

namespace {

/// Hands out preset costs in call order.
class ScriptedMeasurer : public Measurer {
 public:
  explicit ScriptedMeasurer(std::vector<double> costs) : costs_(std::move(costs)) {}
  double measure(const ParallelVariant&) override { return costs_.at(next_++); }
  double measure_serial(const ClassModel&, const std::string&, const std::string&) override { return 0; }
  std::string name() const override { return "scripted"; }

 private:
  std::vector<double> costs_;
  std::size_t next_ = 0;
};

const NestReport& matmul_nest() {
  static ClassModel m = load_fixture("MatMul.class");
  static ClassReport r = analyze_class(m);
  return nest_of(r, "multiply");
}

const ClassModel& matmul_model() {
  static ClassModel m = load_fixture("MatMul.class");
  return m;
}

}  // namespace

TEST(Autotune, SelectMin) {
  EXPECT_EQ(select_min({5, 3}), 1u);
  EXPECT_EQ(select_min({3, 3}), 0u);
  EXPECT_EQ(select_min({4, 2, 9, 2}), 1u);
  EXPECT_FALSE(select_min({}).has_value());
}

TEST(Autotune, SelectMinAllPermutations) {
  for (std::vector<double> base : {std::vector<double>{1, 2, 3, 4, 5}, {1, 1, 2, 2, 3}, {7, 7, 7}, {2, 1}}) {
    std::sort(base.begin(), base.end());
    do {
      double lo = *std::min_element(base.begin(), base.end());
      std::size_t first = static_cast<std::size_t>(std::find(base.begin(), base.end(), lo) - base.begin());
      EXPECT_EQ(select_min(base), first);
    } while (std::next_permutation(base.begin(), base.end()));
  }
}

TEST(Autotune, TuneFollowsMeasuredCosts) {
  const NestReport& nr = matmul_nest();
  std::vector<TransformCandidate> cands(nr.candidates.begin(), nr.candidates.begin() + 4);
  ScriptedMeasurer m({9, 4, 4, 6});
  TuneResult res = tune(matmul_model(), "multiply", "([[D[[D)[[D", nr.nest, cands, m, {});
  ASSERT_TRUE(res.selected.has_value());
  EXPECT_EQ(*res.selected, 1u);
  EXPECT_EQ(res.best()->candidate.describe(), "identity@1");
  EXPECT_EQ(res.trials.size(), 4u);
}

TEST(Autotune, NoCandidatesWarns) {
  const NestReport& nr = matmul_nest();
  ScriptedMeasurer m({});
  TuneResult res = tune(matmul_model(), "multiply", "([[D[[D)[[D", nr.nest, {}, m, {});
  EXPECT_FALSE(res.selected.has_value());
  ASSERT_FALSE(res.warnings.empty());
  EXPECT_NE(res.warnings[0].find("NoCandidates"), std::string::npos);
}

TEST(Autotune, ParallelBeatsSerialAtSixteen) {
  MeasureConfig mc;
  mc.r = 16;
  InterpMeasurer m(mc);
  ClassReport r = analyze_class(matmul_model());
  ParallelVariant v = variant_for(matmul_model(), r, "multiply", "identity@0");
  double serial = m.measure_serial(matmul_model(), "multiply", "([[D[[D)[[D");
  double par = m.measure(v);
  EXPECT_LT(par, serial);
}

TEST(Autotune, Deterministic) {
  const NestReport& nr = matmul_nest();
  MeasureConfig mc;
  mc.r = 8;
  std::vector<double> first;
  for (int rep = 0; rep < 2; ++rep) {
    InterpMeasurer m(mc);
    TuneConfig tc;
    tc.r = 8;
    TuneResult res = tune(matmul_model(), "multiply", "([[D[[D)[[D", nr.nest, nr.candidates, m, tc);
    std::vector<double> costs;
    for (const auto& t : res.trials) costs.push_back(t.cost);
    if (rep == 0) first = costs;
    else EXPECT_EQ(costs, first);
  }
}

TEST(Autotune, SmallScaleChoiceHoldsAtFullScale) {
  const NestReport& nr = matmul_nest();
  MeasureConfig mc;
  mc.r = 16;
  InterpMeasurer m(mc);
  TuneConfig tc;
  tc.r = 16;
  TuneResult res = tune(matmul_model(), "multiply", "([[D[[D)[[D", nr.nest, nr.candidates, m, tc);
  ASSERT_TRUE(res.selected.has_value());
  m.set_scale(48);
  std::vector<double> full;
  for (const auto& t : res.trials) full.push_back(t.variant ? m.measure(*t.variant) : 1e300);
  double chosen = full[*res.selected];
  for (double c : full) EXPECT_LE(chosen, c);
}

TEST(Autotune, CostModel) {
  InterpMeasurer m({});
  StepProfile p;
  p.driver_steps = 100;
  p.batches.push_back({{10, 30, 20}});
  p.batches.push_back({{5}});
  EXPECT_EQ(m.cost_of(p), 100u + 30u + 5u + 4u * 1000u);
}

TEST(Autotune, JvmBackendNeedsJava) {
  if (!find_java().empty()) GTEST_SKIP() << "java present";
  EXPECT_THROW(JvmMeasurer({}), BackendUnavailable);
  EXPECT_THROW(make_measurer(Backend::Jvm, {}), BackendUnavailable);
}

TEST(Autotune, BackendNames) {
  EXPECT_EQ(parse_backend("interp"), Backend::Interp);
  EXPECT_EQ(parse_backend("jvm"), Backend::Jvm);
  EXPECT_THROW(parse_backend("gpu"), std::invalid_argument);
}
