#include <gtest/gtest.h>

#include "bcpar/error.hpp"
#include "bcpar/metrics.hpp"

using namespace bcpar;

TEST(Metrics, Speedup) {
  EXPECT_NEAR(speedup(463.41, 227.99), 2.03, 0.005);
  EXPECT_NEAR(speedup(4248.56, 2180.12), 1.95, 0.005);
  EXPECT_DOUBLE_EQ(speedup(3.5, 3.5), 1.0);
}

TEST(Metrics, Efficiency) {
  EXPECT_NEAR(efficiency(1.15, 0.78, 2), 0.74, 0.005);
  EXPECT_NEAR(efficiency(463.41, 114.42, 4), 1.01, 0.005);
  EXPECT_DOUBLE_EQ(efficiency(2.0, 2.0, 1), 1.0);
  EXPECT_DOUBLE_EQ(efficiency(8.0, 2.0, 4), speedup(8.0, 2.0) / 4);
}

TEST(Metrics, RejectsBadInput) {
  EXPECT_THROW(speedup(0, 1), NonPositiveTime);
  EXPECT_THROW(speedup(1, -1), NonPositiveTime);
  EXPECT_THROW(efficiency(1, 0, 2), NonPositiveTime);
  EXPECT_THROW(efficiency(1, 1, 0), std::invalid_argument);
  EXPECT_THROW(build_rows({}), EmptyInput);
  EXPECT_THROW(build_rows({{"mm", 8, 2, 1.0}}), std::invalid_argument);
}

TEST(Metrics, RoundHalfUp) {
  EXPECT_DOUBLE_EQ(round_half_up(0.745), 0.75);
  EXPECT_DOUBLE_EQ(round_half_up(2.735), 2.74);
  EXPECT_DOUBLE_EQ(round_half_up(1.004), 1.0);
  EXPECT_DOUBLE_EQ(round_half_up(-0.125), -0.13);
  EXPECT_EQ(format_fixed(1.0), "1.00");
  EXPECT_EQ(format_fixed(0.4901), "0.49");
}

TEST(Metrics, SingleSerialRecord) {
  auto rows = build_rows({{"mm", 1024, 1, 1.15}});
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].e, 1.0);
  EXPECT_DOUBLE_EQ(rows[0].s, 1.0);
}

TEST(Metrics, GroupingAndOrder) {
  std::vector<RunRecord> recs{{"mm", 64, 4, 10}, {"fft", 32, 1, 8}, {"mm", 32, 1, 5},  {"mm", 64, 1, 30},
                              {"fft", 32, 2, 5}, {"mm", 32, 2, 4}, {"mm", 64, 2, 16}};
  auto rows = build_rows(recs);
  std::vector<std::tuple<std::string, std::int64_t, int>> keys;
  for (const auto& r : rows) keys.emplace_back(r.benchmark, r.n, r.p);
  std::vector<std::tuple<std::string, std::int64_t, int>> want{{"fft", 32, 1}, {"fft", 32, 2}, {"mm", 32, 1},
                                                               {"mm", 32, 2},  {"mm", 64, 1},  {"mm", 64, 2},
                                                               {"mm", 64, 4}};
  EXPECT_EQ(keys, want);
  EXPECT_DOUBLE_EQ(rows.back().s, 3.0);
  EXPECT_DOUBLE_EQ(rows.back().e, 0.75);
}

TEST(Metrics, ScaleInvariance) {
  std::vector<RunRecord> a{{"mm", 8, 1, 7}, {"mm", 8, 3, 2}}, b = a;
  for (auto& r : b) r.t *= 1000;
  auto ra = build_rows(a), rb = build_rows(b);
  EXPECT_DOUBLE_EQ(ra[1].s, rb[1].s);
  EXPECT_DOUBLE_EQ(ra[1].e, rb[1].e);
}

TEST(Metrics, CsvLayout) {
  std::string csv = emit_report({{"mm", 1024, 1, 1.15}, {"mm", 1024, 2, 0.78}}, ReportFormat::Csv);
  EXPECT_EQ(csv, "benchmark,N,P,T,E,S\nmm,1024,1,1.15,1.00,1.00\nmm,1024,2,0.78,0.74,1.47\n");
}

TEST(Metrics, JsonCsvRoundTrip) {
  std::vector<RunRecord> recs{{"mm", 16, 1, 1234.5}, {"mm", 16, 2, 700.25}, {"mm", 16, 4, 401}};
  auto rows = build_rows(recs);
  auto from_json = parse_report_json(rows_to_json(rows));
  ASSERT_EQ(from_json.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_DOUBLE_EQ(from_json[i].e, rows[i].e);
    EXPECT_DOUBLE_EQ(from_json[i].s, rows[i].s);
  }
  auto from_csv = parse_report_csv(rows_to_csv(from_json));
  ASSERT_EQ(from_csv.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(from_csv[i].benchmark, rows[i].benchmark);
    EXPECT_EQ(from_csv[i].p, rows[i].p);
    EXPECT_DOUBLE_EQ(from_csv[i].s, round_half_up(rows[i].s));
    EXPECT_DOUBLE_EQ(from_csv[i].t, round_half_up(rows[i].t));
  }
}

TEST(Metrics, RecordsJson) {
  auto a = parse_records_json(R"({"records":[{"benchmark":"mm","N":4,"P":1,"T":2.0}]})");
  auto b = parse_records_json(R"([{"benchmark":"mm","N":4,"P":1,"T":2.0}])");
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(a[0].benchmark, "mm");
  EXPECT_EQ(a[0].n, 4);
  EXPECT_DOUBLE_EQ(b[0].t, 2.0);
}
