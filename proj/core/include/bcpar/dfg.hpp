#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "bcpar/ir.hpp"

namespace bcpar {

enum class DepKind { Flow, Anti, Output };
std::string_view dep_kind_name(DepKind k);

struct DepEdge {
  int producer = 0;
  int consumer = 0;
  std::string var;
  DepKind kind = DepKind::Flow;
  friend bool operator==(const DepEdge&, const DepEdge&) = default;
};

/// Statement-level dependence graph. Variables are named by their IR text:
/// `local3`, `Owner.field`, `local0.field`, `local1[local2]`.
struct DepGraph {
  std::size_t nodes = 0;
  std::vector<DepEdge> edges;
  std::map<std::string, int> last_write;
  std::vector<std::set<std::string>> reads;
  std::vector<std::set<std::string>> writes;

  std::vector<DepEdge> edges_of(DepKind k) const;
  std::string to_dot(const std::vector<Stmt>& stmts) const;
};

std::set<std::string> read_vars(const Stmt& s);
std::set<std::string> write_vars(const Stmt& s);

/// Last-writer tracking for flow edges plus last-reader tracking for anti
/// edges; output edges link consecutive writers.
DepGraph build_dfg(const std::vector<Stmt>& stmts);

}  // namespace bcpar
