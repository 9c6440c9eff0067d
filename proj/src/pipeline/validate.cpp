#include <algorithm>

#include "specweave/pipeline.hpp"

namespace specweave {

Validator::Validator(VerifierBackend& backend, std::chrono::duration<double> timeout)
    : d_backend(backend), d_timeout(timeout)
{
}

Verdict
Validator::check(const AnnotatedProgram& prog, CheckMode mode, const std::set<std::size_t>& focus)
{
  ++d_checks;
  return d_backend.check(make_request(prog, mode, focus, std::nullopt, d_timeout));
}

namespace {

SpecClause
clause_of(const AnnotatedProgram& prog, std::size_t seq, SpecStatus status)
{
  auto where = prog.find_seq(seq);
  SpecClause c = prog.block(where->first)[where->second].clause;
  c.status = status;
  return c;
}

std::string
owner_of(const AnnotatedProgram& prog, std::size_t seq)
{
  return prog.find_seq(seq)->first;
}

}  // namespace

ValidationOutcome
Validator::validate(const AnnotatedProgram& prog, const ExtGraph& g, const CandidateSet& cands)
{
  const ExtNode& node = g.node(cands.owner);
  ValidationOutcome out{prog, {}, {}, {}, {}, false, 0, 0};
  AnnotatedProgram cur = prog;

  std::set<std::size_t> live;
  for (const SpecClause& c : cands.clauses)
  {
    const auto& block = cur.block(cands.owner);
    bool placed = std::any_of(block.begin(), block.end(),
                              [&](const PlacedClause& p) { return same_clause(p.clause, c); });
    if (placed) continue;
    live.insert(cur.next_seq());
    SpecClause candidate = c;
    candidate.status = SpecStatus::Candidate;
    cur = cur.insert_clause(cands.owner, candidate);
  }

  auto drop = [&](std::size_t seq, SpecStatus why, std::vector<SpecClause>& into) {
    into.push_back(clause_of(cur, seq, why));
    cur = cur.remove_seq(seq);
    live.erase(seq);
  };

  while (!live.empty())
  {
    Verdict v = check(cur, CheckMode::Legality, live);
    ++out.legality_checks;
    if (v.overall != Outcome::CompileError) break;
    std::optional<std::size_t> blamed = v.first_blamed(live);
    if (!blamed)
    {
      // The error is somewhere in this batch but not on any one clause.
      std::set<std::size_t> all = live;
      for (std::size_t s : all) drop(s, SpecStatus::EliminatedIllegal, out.eliminated_illegal);
      break;
    }
    drop(*blamed, SpecStatus::EliminatedIllegal, out.eliminated_illegal);
  }
  for (std::size_t s : live) cur = cur.with_status(s, SpecStatus::Legal);

  if (node.kind == NodeKind::Loop && node.depth > 1)
  {
    if (!live.empty())
    {
      out.deferred = true;
      d_deferred[g.outermost_loop(node.id)].insert(live.begin(), live.end());
    }
  }
  else
  {
    std::set<std::size_t> focus = live;
    if (node.kind == NodeKind::Loop)
    {
      auto it = d_deferred.find(node.id);
      if (it != d_deferred.end())
      {
        for (std::size_t s : it->second)
        {
          if (cur.find_seq(s)) focus.insert(s);
        }
        d_deferred.erase(it);
      }
    }
    auto eliminate = [&](std::size_t seq) {
      if (live.count(seq))
      {
        drop(seq, SpecStatus::EliminatedUnsat, out.eliminated_unsat);
      }
      else
      {
        std::string owner = owner_of(cur, seq);
        out.inner_eliminated[owner].push_back(clause_of(cur, seq, SpecStatus::EliminatedUnsat));
        cur = cur.remove_seq(seq);
      }
      focus.erase(seq);
    };
    while (!focus.empty())
    {
      Verdict v = check(cur, CheckMode::Satisfiability, focus);
      ++out.satisfiability_checks;
      if (v.overall == Outcome::Proved) break;
      std::optional<std::size_t> blamed = v.first_blamed(focus);
      if (!blamed)
      {
        std::set<std::size_t> all = focus;
        for (std::size_t s : all) eliminate(s);
        break;
      }
      eliminate(*blamed);
    }
    for (std::size_t s : focus) cur = cur.with_status(s, SpecStatus::Satisfiable);
  }

  for (const PlacedClause& p : cur.block(cands.owner))
  {
    if (live.count(p.seq)) out.retained.push_back(p.clause);
  }
  out.program = std::move(cur);
  return out;
}

ValidationOutcome
validate_candidates(const AnnotatedProgram& prog, const ExtGraph& g, const CandidateSet& cands,
                    VerifierBackend& backend, std::chrono::duration<double> timeout)
{
  Validator v(backend, timeout);
  return v.validate(prog, g, cands);
}

SimplifyResult
simplify(const AnnotatedProgram& prog, const AssertionLocator& target, VerifierBackend& backend,
         std::chrono::duration<double> timeout)
{
  SimplifyResult r{prog, {}, 0, 0, 0};
  auto adequate = [&](const AnnotatedProgram& p) {
    ++r.checks;
    return backend.check(make_request(p, CheckMode::Adequacy, {}, target, timeout)).overall
           == Outcome::Proved;
  };

  bool removed = true;
  while (removed)
  {
    removed = false;
    ++r.passes;
    r.final_pass_checks = 0;
    auto clauses = r.program.all_clauses();
    for (auto it = clauses.rbegin(); it != clauses.rend(); ++it)
    {
      AnnotatedProgram trial = r.program.remove_seq(it->second.seq);
      ++r.final_pass_checks;
      if (adequate(trial))
      {
        SpecClause c = it->second.clause;
        c.status = SpecStatus::EliminatedRedundant;
        r.removed.emplace_back(it->first, std::move(c));
        r.program = std::move(trial);
        removed = true;
      }
    }
  }
  if (!adequate(r.program))
  {
    throw Error(ErrorKind::InvariantViolation, "simplified program no longer proves the target");
  }
  return r;
}

}  // namespace specweave
