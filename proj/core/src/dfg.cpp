#include "bcpar/dfg.hpp"

#include <sstream>

namespace bcpar {

std::string_view dep_kind_name(DepKind k) {
  switch (k) {
    case DepKind::Flow: return "flow";
    case DepKind::Anti: return "anti";
    case DepKind::Output: return "output";
  }
  return "?";
}

namespace {

void collect_reads(const ExprPtr& e, std::set<std::string>& out) {
  visit(e, [&](const Expr& x) {
    if (x.kind == ExprKind::Local || x.kind == ExprKind::Field || x.kind == ExprKind::ArrayElem)
      out.insert(to_string(x));
  });
}

}  // namespace

std::set<std::string> read_vars(const Stmt& s) {
  std::set<std::string> out;
  for (const auto& e : stmt_exprs(s)) collect_reads(e, out);
  if (s.kind == StmtKind::Inc) out.insert("local" + std::to_string(s.slot));
  return out;
}

std::set<std::string> write_vars(const Stmt& s) {
  switch (s.kind) {
    case StmtKind::Assign:
    case StmtKind::ArrayStore:
    case StmtKind::FieldStore:
      return {to_string(*s.target)};
    case StmtKind::Inc:
      return {"local" + std::to_string(s.slot)};
    default:
      return {};
  }
}

DepGraph build_dfg(const std::vector<Stmt>& stmts) {
  DepGraph g;
  g.nodes = stmts.size();
  std::map<std::string, std::set<int>> last_readers;
  for (std::size_t i = 0; i < stmts.size(); ++i) {
    int c = static_cast<int>(i);
    auto r = read_vars(stmts[i]);
    auto w = write_vars(stmts[i]);
    for (const auto& v : r) {
      auto it = g.last_write.find(v);
      if (it != g.last_write.end()) g.edges.push_back({it->second, c, v, DepKind::Flow});
    }
    for (const auto& v : w) {
      for (int reader : last_readers[v]) {
        if (reader != c) g.edges.push_back({reader, c, v, DepKind::Anti});
      }
      auto it = g.last_write.find(v);
      if (it != g.last_write.end()) g.edges.push_back({it->second, c, v, DepKind::Output});
    }
    for (const auto& v : r) last_readers[v].insert(c);
    for (const auto& v : w) {
      g.last_write[v] = c;
      last_readers[v].clear();
    }
    g.reads.push_back(std::move(r));
    g.writes.push_back(std::move(w));
  }
  return g;
}

std::vector<DepEdge> DepGraph::edges_of(DepKind k) const {
  std::vector<DepEdge> out;
  for (const auto& e : edges)
    if (e.kind == k) out.push_back(e);
  return out;
}

std::string DepGraph::to_dot(const std::vector<Stmt>& stmts) const {
  auto esc = [](std::string s) {
    std::string o;
    for (char ch : s) {
      if (ch == '"' || ch == '\\') o += '\\';
      o += ch;
    }
    return o;
  };
  std::ostringstream os;
  os << "digraph dfg {\n  node [shape=box];\n";
  for (std::size_t i = 0; i < stmts.size(); ++i)
    os << "  s" << i << " [label=\"" << i << ": " << esc(to_string(stmts[i])) << "\"];\n";
  for (const auto& e : edges) {
    os << "  s" << e.producer << " -> s" << e.consumer << " [label=\"" << esc(e.var) << "\"";
    if (e.kind == DepKind::Anti) os << ", style=dashed";
    if (e.kind == DepKind::Output) os << ", style=dotted";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace bcpar
