#include <algorithm>

#include "specweave/pipeline.hpp"

namespace specweave {

namespace {

class CountingBackend : public VerifierBackend
{
public:
  explicit CountingBackend(VerifierBackend& inner) : d_inner(inner) {}

  std::string id() const override { return d_inner.id(); }
  Verdict check(const VerificationRequest& request) override
  {
    ++d_calls;
    return d_inner.check(request);
  }
  std::size_t calls() const { return d_calls; }

private:
  VerifierBackend& d_inner;
  std::size_t d_calls = 0;
};

bool
already_placed(const AnnotatedProgram& prog, const std::string& owner, const SpecClause& c)
{
  const auto& block = prog.block(owner);
  return std::any_of(block.begin(), block.end(),
                     [&](const PlacedClause& p) { return same_clause(p.clause, c); });
}

AnnotatedProgram
mark_retained(AnnotatedProgram prog)
{
  for (const auto& [owner, placed] : prog.all_clauses())
  {
    if (placed.clause.status == SpecStatus::Satisfiable)
    {
      prog = prog.with_status(placed.seq, SpecStatus::Retained);
    }
  }
  return prog;
}

}  // namespace

RunReport
run(SourceUnitPtr unit, AssertionLocator locator, const RunConfig& cfg, Provider& provider,
    VerifierBackend& backend)
{
  PhaseClock clock(Phase::Query);
  auto wall_start = std::chrono::steady_clock::now();
  cfg.validate();

  RunReport report;
  report.program = unit->path();
  report.checksum = unit->checksum();

  Program program = parse_program(unit);
  if (locator.expression_text.empty())
  {
    if (const AstNode* a = assertion_at(program, locator.line)) locator.expression_text = a->text;
  }
  AstId root = locate_assertion(program, locator);
  ExtGraph g = build_extended_call_graph(program, root);
  AnnotatedProgram prog = insert_placeholders(program, g.nodes());
  report.graph_nodes = g.nodes().size();

  BudgetedProvider budget(provider,
                          g.nodes().size() * static_cast<std::size_t>(cfg.max_iterations));
  CountingBackend counted(backend);
  Validator validator(counted, cfg.verifier_timeout);
  std::map<std::string, std::set<std::string>> eliminated;

  try
  {
    for (int i = 1; i <= cfg.max_iterations; ++i)
    {
      report.iterations_used = i;
      report.traces.push_back(IterationTrace{i, {}, Outcome::Failed, {}});
      IterationTrace& trace = report.traces.back();
      PhaseTimes before = clock.times();
      std::map<std::string, std::size_t> index;

      try
      {
        bottom_up_sweep(g, [&](const std::string& f, const std::set<std::string>& settled) {
          clock.switch_to(Phase::Query);
          const ExtNode& node = g.node(f);
          Prompt prompt = build_prompt(prog, g, f, cfg.llm, default_shot_library(), settled);
          std::string raw = budget.complete(prompt, cfg.llm, QueryKey{unit->checksum(), f, i});
          CandidateSet cands = parse_candidates(f, node.kind, raw, ClauseOrigin{i, provider.id()});

          NodeTrace nt;
          nt.node = f;
          nt.kind = node.kind;
          nt.diagnostics = cands.diagnostics;
          std::vector<SpecClause> fresh;
          for (SpecClause& c : cands.clauses)
          {
            if (eliminated[f].count(c.text()) || already_placed(prog, f, c))
            {
              ++nt.repeats_dropped;
              continue;
            }
            fresh.push_back(std::move(c));
          }
          cands.clauses = std::move(fresh);
          nt.candidates = cands.clauses.size();
          report.generated += nt.candidates;

          clock.switch_to(Phase::Validate);
          ValidationOutcome o = validator.validate(prog, g, cands);
          prog = std::move(o.program);
          nt.eliminated_illegal = o.eliminated_illegal.size();
          nt.eliminated_unsat = o.eliminated_unsat.size();
          nt.retained = o.retained.size();
          nt.deferred = o.deferred ? o.retained.size() : 0;
          nt.legality_checks = o.legality_checks;
          nt.satisfiability_checks = o.satisfiability_checks;
          for (const SpecClause& c : o.eliminated_illegal) eliminated[f].insert(c.text());
          for (const SpecClause& c : o.eliminated_unsat) eliminated[f].insert(c.text());
          for (const auto& [owner, gone] : o.inner_eliminated)
          {
            for (const SpecClause& c : gone) eliminated[owner].insert(c.text());
            auto at = index.find(owner);
            if (at == index.end()) continue;
            NodeTrace& inner = trace.nodes[at->second];
            inner.eliminated_unsat += gone.size();
            inner.retained -= std::min(inner.retained, gone.size());
          }
          index[f] = trace.nodes.size();
          trace.nodes.push_back(std::move(nt));
        });

        clock.switch_to(Phase::Validate);
        prog = mark_retained(std::move(prog));
        Verdict v = counted.check(make_request(prog, CheckMode::Adequacy, {}, locator,
                                               cfg.verifier_timeout));
        trace.adequacy = v.overall;
        if (v.overall == Outcome::Proved)
        {
          if (cfg.simplify)
          {
            clock.switch_to(Phase::Simplify);
            SimplifyResult s = simplify(prog, locator, counted, cfg.verifier_timeout);
            prog = std::move(s.program);
            report.removed_by_simplify = s.removed.size();
          }
          report.success = true;
        }
      }
      catch (...)
      {
        trace.times = clock.times() - before;
        throw;
      }
      trace.times = clock.times() - before;
      if (report.success) break;
    }
  }
  catch (const Error& e)
  {
    report.success = false;
    report.error = e.what();
    report.error_kind = e.kind();
  }

  report.final_text = render_source(prog);
  for (const auto& [owner, placed] : prog.all_clauses())
  {
    report.clauses.push_back(FinalClause{owner, placed.clause.text()});
  }
  report.retained = report.clauses.size();
  report.queries = budget.requests();
  report.verifier_calls = counted.calls();
  report.times = clock.times();
  auto wall_end = std::chrono::steady_clock::now();
  report.total_seconds = std::chrono::duration<double>(wall_end - wall_start).count();
  return report;
}

}  // namespace specweave
