#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specweave/ast.hpp"

namespace specweave {

enum class NodeKind
{
  Function,
  Loop,
};

std::string_view to_string(NodeKind kind);

struct ExtNode
{
  std::string id;
  NodeKind kind = NodeKind::Function;
  AstId ast_ref = 0;
  /// Loop nesting depth inside its function; 0 for functions.
  int depth = 0;
  /// Enclosing function name (the node itself for functions).
  std::string function;
  /// Containing loop or function for loops; empty for functions.
  std::string parent;
};

/**
 * Call graph extended with loop nodes, rooted at the function holding the
 * target assertion. Immutable once built.
 */
class ExtGraph
{
public:
  const std::string& root() const { return d_root; }
  /// Nodes in discovery (worklist) order.
  const std::vector<ExtNode>& nodes() const { return d_nodes; }
  const std::vector<std::pair<std::string, std::string>>& edges() const { return d_edges; }

  bool contains(const std::string& id) const { return d_lookup.count(id) > 0; }
  const ExtNode& node(const std::string& id) const;

  /// Child ids in edge order. Throws Error{UnknownNode}.
  const std::vector<std::string>& callees(const std::string& id) const;
  /// Names of called functions with no body in the unit, per node.
  const std::vector<std::string>& unresolved(const std::string& id) const;

  /// The outermost loop enclosing a loop node (itself when depth == 1).
  const std::string& outermost_loop(const std::string& loop_id) const;

  std::string to_dot() const;

private:
  friend ExtGraph build_extended_call_graph(const Program&, AstId);

  std::string d_root;
  std::vector<ExtNode> d_nodes;
  std::vector<std::pair<std::string, std::string>> d_edges;
  std::map<std::string, std::size_t> d_lookup;
  std::map<std::string, std::vector<std::string>> d_children;
  std::map<std::string, std::vector<std::string>> d_unresolved;
};

/**
 * Worklist exploration from root_fn (FIFO). Visiting a node scans only the
 * code it directly contains: nested loops become child nodes and are not
 * descended into; calls to defined functions add call edges.
 */
ExtGraph build_extended_call_graph(const Program& program, AstId root_fn);

inline const std::vector<std::string>&
callees(const ExtGraph& g, const std::string& id)
{
  return g.callees(id);
}

}  // namespace specweave
