#include "specweave/pipeline.hpp"

#include <algorithm>

namespace specweave {

void
RunConfig::validate() const
{
  if (max_iterations < 1)
  {
    throw Error(ErrorKind::ConfigError, "max_iterations must be at least 1");
  }
  if (!(verifier_timeout.count() > 0.0))
  {
    throw Error(ErrorKind::ConfigError, "verifier timeout must be positive");
  }
  if (verifier != "mock" && verifier != "framac")
  {
    throw Error(ErrorKind::ConfigError, "unknown verifier '" + verifier + "'");
  }
  llm.validate();
}

PhaseTimes&
PhaseTimes::operator+=(const PhaseTimes& other)
{
  query += other.query;
  validate += other.validate;
  simplify += other.simplify;
  return *this;
}

PhaseTimes
PhaseTimes::operator-(const PhaseTimes& other) const
{
  return PhaseTimes{query - other.query, validate - other.validate, simplify - other.simplify};
}

PhaseClock::PhaseClock(Phase initial)
    : d_start(clock::now()), d_mark(d_start), d_current(initial)
{
}

namespace {

double&
slot(PhaseTimes& t, Phase p)
{
  switch (p)
  {
    case Phase::Query: return t.query;
    case Phase::Validate: return t.validate;
    case Phase::Simplify: return t.simplify;
  }
  return t.query;
}

}  // namespace

void
PhaseClock::switch_to(Phase next)
{
  clock::time_point now = clock::now();
  slot(d_closed, d_current) += std::chrono::duration<double>(now - d_mark).count();
  d_mark = now;
  d_current = next;
}

PhaseTimes
PhaseClock::times() const
{
  PhaseTimes t = d_closed;
  slot(t, d_current) += std::chrono::duration<double>(clock::now() - d_mark).count();
  return t;
}

double
PhaseClock::elapsed() const
{
  return std::chrono::duration<double>(clock::now() - d_start).count();
}

std::vector<std::string>
IterationTrace::generation_order() const
{
  std::vector<std::string> out;
  for (const NodeTrace& n : nodes) out.push_back(n.node);
  return out;
}

namespace {

/** Tarjan's algorithm; components come out callees first. */
class Components
{
public:
  explicit Components(const ExtGraph& g) : d_g(g) { visit(g.root()); }

  /// Each component as (entry node, members), in completion order.
  std::vector<std::pair<std::string, std::set<std::string>>> order;

private:
  void visit(const std::string& v)
  {
    std::size_t index = d_index.size();
    d_index[v] = index;
    d_low[v] = index;
    d_stack.push_back(v);
    d_on_stack.insert(v);
    // Last callee first, like popping a stack the callees were pushed onto.
    const std::vector<std::string>& cs = d_g.callees(v);
    for (auto it = cs.rbegin(); it != cs.rend(); ++it)
    {
      if (!d_index.count(*it))
      {
        visit(*it);
        d_low[v] = std::min(d_low[v], d_low[*it]);
      }
      else if (d_on_stack.count(*it))
      {
        d_low[v] = std::min(d_low[v], d_index[*it]);
      }
    }
    if (d_low[v] != index) return;
    std::set<std::string> members;
    std::string w;
    do
    {
      w = d_stack.back();
      d_stack.pop_back();
      d_on_stack.erase(w);
      members.insert(w);
    } while (w != v);
    order.emplace_back(v, std::move(members));
  }

  const ExtGraph& d_g;
  std::map<std::string, std::size_t> d_index;
  std::map<std::string, std::size_t> d_low;
  std::vector<std::string> d_stack;
  std::set<std::string> d_on_stack;
};

}  // namespace

void
bottom_up_sweep(const ExtGraph& g, const GenerateFn& generate)
{
  std::set<std::string> done;
  for (const auto& [entry, members] : Components(g).order)
  {
    std::set<std::string> waiting;
    std::vector<std::string> stack = {entry};
    while (!stack.empty())
    {
      std::string f = stack.back();
      if (done.count(f))
      {
        stack.pop_back();
        continue;
      }
      std::vector<std::string> pending;
      for (const std::string& c : g.callees(f))
      {
        if (!done.count(c) && !waiting.count(c) && c != f) pending.push_back(c);
      }
      if (!waiting.count(f) && !pending.empty())
      {
        waiting.insert(f);
        stack.insert(stack.end(), pending.begin(), pending.end());
        continue;
      }
      std::set<std::string> settled = done;
      for (const std::string& c : g.callees(f))
      {
        if (members.count(c)) settled.insert(c);
      }
      generate(f, settled);
      done.insert(f);
      waiting.erase(f);
      stack.pop_back();
    }
  }
}

}  // namespace specweave
