#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

#include "specweave/callgraph.hpp"
#include "specweave/error.hpp"

namespace specweave {

std::string_view
to_string(NodeKind kind)
{
  return kind == NodeKind::Function ? "function" : "loop";
}

const ExtNode&
ExtGraph::node(const std::string& id) const
{
  auto it = d_lookup.find(id);
  if (it == d_lookup.end())
  {
    throw Error(ErrorKind::UnknownNode, "'" + id + "' is not in the graph");
  }
  return d_nodes[it->second];
}

const std::vector<std::string>&
ExtGraph::callees(const std::string& id) const
{
  auto it = d_children.find(id);
  if (it == d_children.end())
  {
    throw Error(ErrorKind::UnknownNode, "'" + id + "' is not in the graph");
  }
  return it->second;
}

const std::vector<std::string>&
ExtGraph::unresolved(const std::string& id) const
{
  static const std::vector<std::string> none;
  node(id);
  auto it = d_unresolved.find(id);
  return it == d_unresolved.end() ? none : it->second;
}

const std::string&
ExtGraph::outermost_loop(const std::string& loop_id) const
{
  const ExtNode* n = &node(loop_id);
  if (n->kind != NodeKind::Loop)
  {
    throw Error(ErrorKind::UnknownNode, "'" + loop_id + "' is not a loop");
  }
  while (n->depth > 1) n = &node(n->parent);
  return n->id;
}

std::string
ExtGraph::to_dot() const
{
  std::ostringstream out;
  out << "digraph ext_call_graph {\n";
  for (const ExtNode& n : d_nodes)
  {
    out << "  \"" << n.id << "\" [label=\"" << n.id << ":" << to_string(n.kind) << "\""
        << (n.kind == NodeKind::Loop ? ", shape=box" : "") << "];\n";
  }
  for (const auto& [from, to] : d_edges)
  {
    out << "  \"" << from << "\" -> \"" << to << "\";\n";
  }
  out << "}\n";
  return out.str();
}

namespace {

/// Calls and loops directly inside `node`, in source order. Nested loops are
/// reported but not entered; call arguments are entered.
void
direct_items(const AstNode& node, std::vector<const AstNode*>& out)
{
  for (const AstNode& c : node.children)
  {
    if (c.kind == AstKind::LoopStmt)
    {
      out.push_back(&c);
      continue;
    }
    if (c.kind == AstKind::CallExpr) out.push_back(&c);
    direct_items(c, out);
  }
}

}  // namespace

ExtGraph
build_extended_call_graph(const Program& program, AstId root_fn)
{
  const AstNode& root = program.node(root_fn);
  if (root.kind != AstKind::FunctionDef)
  {
    throw Error(ErrorKind::UnknownNode, "root is not a function definition");
  }

  ExtGraph g;
  g.d_root = root.name;
  std::deque<std::string> worklist;

  auto add_node = [&](ExtNode n) {
    g.d_lookup.emplace(n.id, g.d_nodes.size());
    g.d_children[n.id];
    worklist.push_back(n.id);
    g.d_nodes.push_back(std::move(n));
  };

  add_node(ExtNode{root.name, NodeKind::Function, root.id, 0, root.name, ""});

  while (!worklist.empty())
  {
    std::string current = worklist.front();
    worklist.pop_front();
    ExtNode self = g.node(current);
    const AstNode& ast = program.node(self.ast_ref);

    std::vector<const AstNode*> items;
    direct_items(ast, items);
    std::set<std::string> linked;
    for (const AstNode* item : items)
    {
      std::string target;
      if (item->kind == AstKind::LoopStmt)
      {
        target = item->name;
        if (!g.contains(target))
        {
          add_node(ExtNode{target, NodeKind::Loop, item->id, self.depth + 1, self.function,
                           current});
        }
      }
      else
      {
        const AstNode* callee = program.find_function(item->name);
        if (callee == nullptr)
        {
          auto& ext = g.d_unresolved[current];
          if (std::find(ext.begin(), ext.end(), item->name) == ext.end())
          {
            ext.push_back(item->name);
          }
          continue;
        }
        target = callee->name;
        if (!g.contains(target))
        {
          add_node(ExtNode{target, NodeKind::Function, callee->id, 0, target, ""});
        }
      }
      if (linked.insert(target).second)
      {
        g.d_edges.emplace_back(current, target);
        g.d_children[current].push_back(target);
      }
    }
  }
  return g;
}

}  // namespace specweave
