#include <gtest/gtest.h>

#include <algorithm>

#include "bcpar/assembler.hpp"
#include "bcpar/decompile.hpp"
#include "bcpar/dfg.hpp"

using namespace bcpar;

namespace {

bool has_edge(const DepGraph& g, int p, int c, const std::string& var, DepKind k) {
  return std::find(g.edges.begin(), g.edges.end(), DepEdge{p, c, var, k}) != g.edges.end();
}

// local2 = local0 + local1; local0 = local2; local3 = local0; local3 = 7
std::vector<Stmt> straight_line(ClassBuilder& b) {
  CodeBuilder c(b.pool());
  c.load(Kind::Int, 0);
  c.load(Kind::Int, 1);
  c.op(Opcode::iadd);
  c.store(Kind::Int, 2);
  c.load(Kind::Int, 2);
  c.store(Kind::Int, 0);
  c.load(Kind::Int, 0);
  c.store(Kind::Int, 3);
  c.push_int(7);
  c.store(Kind::Int, 3);
  c.load(Kind::Int, 3);
  c.ret(Kind::Int);
  return decompile_method(c.finish(), {&b.pool(), "T", "(II)I", true});
}

}  // namespace

TEST(Dfg, ScalarEdges) {
  ClassBuilder b("T");
  auto stmts = straight_line(b);
  ASSERT_EQ(stmts.size(), 5u);
  DepGraph g = build_dfg(stmts);
  EXPECT_EQ(g.nodes, 5u);
  EXPECT_TRUE(has_edge(g, 0, 1, "local2", DepKind::Flow));
  EXPECT_TRUE(has_edge(g, 0, 1, "local0", DepKind::Anti));
  EXPECT_TRUE(has_edge(g, 1, 2, "local0", DepKind::Flow));
  EXPECT_TRUE(has_edge(g, 2, 3, "local3", DepKind::Output));
  EXPECT_TRUE(has_edge(g, 3, 4, "local3", DepKind::Flow));
  EXPECT_FALSE(has_edge(g, 2, 4, "local3", DepKind::Flow));
  EXPECT_EQ(g.last_write.at("local3"), 3);
}

TEST(Dfg, ArrayStoreReadsSubscripts) {
  ClassBuilder b("T");
  CodeBuilder c(b.pool());
  c.load(Kind::Ref, 0);
  c.load(Kind::Int, 1);
  c.push_int(5);
  c.array_store(ElemKind::Int);
  c.ret(Kind::Void);
  auto stmts = decompile_method(c.finish(), {&b.pool(), "T", "([II)V", true});
  auto r = read_vars(stmts[0]);
  auto w = write_vars(stmts[0]);
  EXPECT_TRUE(r.count("local0"));
  EXPECT_TRUE(r.count("local1"));
  EXPECT_TRUE(w.count("local0[local1]"));
}

TEST(Dfg, DotOutputNamesEdges) {
  ClassBuilder b("T");
  auto stmts = straight_line(b);
  std::string dot = build_dfg(stmts).to_dot(stmts);
  EXPECT_NE(dot.find("digraph"), std::string::npos);
  EXPECT_NE(dot.find("local2"), std::string::npos);
}
