#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "specweave/annotated_program.hpp"
#include "specweave/callgraph.hpp"
#include "specweave/error.hpp"
#include "specweave/llm.hpp"
#include "specweave/verifier.hpp"

namespace specweave {

struct RunConfig
{
  int max_iterations = 5;
  LlmConfig llm;
  /// "mock" or "framac"; the caller builds the backend.
  std::string verifier = "mock";
  std::chrono::duration<double> verifier_timeout{30.0};
  bool simplify = true;

  /// Throws Error{ConfigError}.
  void validate() const;
};

enum class Phase
{
  Query,
  Validate,
  Simplify,
};

struct PhaseTimes
{
  double query = 0.0;
  double validate = 0.0;
  double simplify = 0.0;

  double total() const { return query + validate + simplify; }
  PhaseTimes& operator+=(const PhaseTimes& other);
  PhaseTimes operator-(const PhaseTimes& other) const;
};

/**
 * Charges wall time to exactly one phase at a time, so the phase times
 * always add up to the time elapsed since construction.
 */
class PhaseClock
{
public:
  using clock = std::chrono::steady_clock;

  explicit PhaseClock(Phase initial = Phase::Query);

  /// Closes the running interval and starts charging `next`.
  void switch_to(Phase next);
  Phase current() const { return d_current; }
  /// Times so far, including the open interval.
  PhaseTimes times() const;
  double elapsed() const;

private:
  clock::time_point d_start;
  clock::time_point d_mark;
  Phase d_current;
  PhaseTimes d_closed;
};

struct NodeTrace
{
  std::string node;
  NodeKind kind = NodeKind::Function;
  /// Parsed clauses that went to validation.
  std::size_t candidates = 0;
  /// Re-proposals of eliminated or already placed clauses, never validated.
  std::size_t repeats_dropped = 0;
  std::size_t eliminated_illegal = 0;
  std::size_t eliminated_unsat = 0;
  std::size_t retained = 0;
  /// Clauses whose satisfiability waited for the outermost loop.
  std::size_t deferred = 0;
  std::size_t legality_checks = 0;
  std::size_t satisfiability_checks = 0;
  std::vector<std::string> diagnostics;
};

struct IterationTrace
{
  int iteration = 0;
  /// In generation order.
  std::vector<NodeTrace> nodes;
  Outcome adequacy = Outcome::Failed;
  PhaseTimes times;

  std::vector<std::string> generation_order() const;
};

struct FinalClause
{
  std::string owner;
  std::string text;
};

struct RunReport
{
  std::string program;
  std::string checksum;
  bool success = false;
  int iterations_used = 0;
  std::size_t generated = 0;
  std::size_t retained = 0;
  std::size_t removed_by_simplify = 0;
  std::vector<FinalClause> clauses;
  std::string final_text;
  std::vector<IterationTrace> traces;
  std::size_t graph_nodes = 0;
  std::size_t queries = 0;
  std::size_t verifier_calls = 0;
  PhaseTimes times;
  double total_seconds = 0.0;
  /// Set when the run aborted; the report holds what was done until then.
  std::optional<std::string> error;
  std::optional<ErrorKind> error_kind;
};

using GenerateFn =
    std::function<void(const std::string& node, const std::set<std::string>& settled)>;

/**
 * Visits every node of g once, callees before callers. Strongly connected
 * components (recursion) are taken callees first; inside one, an explicit
 * stack sweep runs from the component's entry node and a node whose callees
 * are not yet generated pushes them and waits. `settled` holds the nodes
 * generated so far plus the node's callees inside its own component.
 */
void bottom_up_sweep(const ExtGraph& g, const GenerateFn& generate);

/** What validation did to one candidate set. */
struct ValidationOutcome
{
  /// Input program with the surviving candidates placed.
  AnnotatedProgram program;
  std::vector<SpecClause> retained;
  std::vector<SpecClause> eliminated_illegal;
  std::vector<SpecClause> eliminated_unsat;
  /// Deferred clauses of inner loops removed by the outermost loop's check.
  std::map<std::string, std::vector<SpecClause>> inner_eliminated;
  bool deferred = false;
  std::size_t legality_checks = 0;
  std::size_t satisfiability_checks = 0;
};

/**
 * Legality then satisfiability gates for candidate sets. Clauses of loops
 * nested in another loop are only checked for legality and wait until their
 * outermost loop is validated, which checks them together with its own.
 */
class Validator
{
public:
  Validator(VerifierBackend& backend, std::chrono::duration<double> timeout);

  ValidationOutcome validate(const AnnotatedProgram& prog, const ExtGraph& g,
                             const CandidateSet& cands);

  std::size_t checks() const { return d_checks; }
  /// Deferred clause seqs per outermost loop.
  const std::map<std::string, std::set<std::size_t>>& deferred() const { return d_deferred; }

private:
  Verdict check(const AnnotatedProgram& prog, CheckMode mode, const std::set<std::size_t>& focus);

  VerifierBackend& d_backend;
  std::chrono::duration<double> d_timeout;
  std::size_t d_checks = 0;
  std::map<std::string, std::set<std::size_t>> d_deferred;
};

/** One-shot form of Validator::validate with no deferred state. */
ValidationOutcome validate_candidates(const AnnotatedProgram& prog, const ExtGraph& g,
                                      const CandidateSet& cands, VerifierBackend& backend,
                                      std::chrono::duration<double> timeout);

struct SimplifyResult
{
  AnnotatedProgram program;
  /// Removed clauses in removal order.
  std::vector<std::pair<std::string, SpecClause>> removed;
  std::size_t checks = 0;
  std::size_t passes = 0;
  /// Checks issued by the last pass, which removed nothing.
  std::size_t final_pass_checks = 0;
};

/**
 * Greedy removal, newest clause first, repeated until a whole pass keeps
 * every clause. prog must already prove the target. A confirming check runs
 * at the end; Error{InvariantViolation} if it fails.
 */
SimplifyResult simplify(const AnnotatedProgram& prog, const AssertionLocator& target,
                        VerifierBackend& backend, std::chrono::duration<double> timeout);

/**
 * Iterative bottom-up generation for the function holding the assertion.
 * Frontend errors throw; later errors end the run and are recorded in the
 * report.
 */
RunReport run(SourceUnitPtr unit, AssertionLocator locator, const RunConfig& cfg,
              Provider& provider, VerifierBackend& backend);

}  // namespace specweave
