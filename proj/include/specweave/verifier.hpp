#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "specweave/annotated_program.hpp"
#include "specweave/ast.hpp"

namespace specweave {

enum class CheckMode
{
  Legality,
  Satisfiability,
  Adequacy,
};

enum class Outcome
{
  Proved,
  Failed,
  CompileError,
  Timeout,
};

enum class GoalStatus
{
  Proved,
  Unproved,
};

std::string_view to_string(CheckMode mode);
std::string_view to_string(Outcome outcome);

/** Which annotation a goal belongs to. */
struct GoalRef
{
  /// Clause seq, when the goal maps to a placed clause.
  std::optional<std::size_t> seq;
  bool target = false;
  /// Clause text, "assertion", or "unknown".
  std::string label;
};

struct Goal
{
  GoalRef ref;
  GoalStatus status = GoalStatus::Unproved;
  /// Line in the checked text.
  std::size_t line = 0;
};

struct Verdict
{
  Outcome overall = Outcome::Failed;
  /// In source order.
  std::vector<Goal> goals;
  std::string diagnostics;
  /// Location of a compile error that matched no clause.
  std::optional<std::size_t> error_line;
  bool timed_out = false;
  /// Goals that could not be attributed to any clause or the target.
  std::size_t mapping_errors = 0;

  /// First unproved (or, for CompileError, offending) clause among focus.
  std::optional<std::size_t> first_blamed(const std::set<std::size_t>& focus) const;
  const Goal* target_goal() const;
};

struct VerificationRequest
{
  std::string program_text;
  CheckMode mode = CheckMode::Legality;
  /// Required for Adequacy; line refers to program_text.
  std::optional<AssertionLocator> target_assertion;
  std::chrono::duration<double> timeout{30.0};
  /// Placed clauses and their lines in program_text.
  std::vector<ClauseLine> clauses;
  /// Clauses under test; empty means every clause.
  std::set<std::size_t> focus;
  std::string unit_checksum;
  std::string unit_path;
};

/** Request over a rendered program; the target locator is remapped. */
VerificationRequest make_request(const AnnotatedProgram& prog, CheckMode mode,
                                 std::set<std::size_t> focus,
                                 const std::optional<AssertionLocator>& target,
                                 std::chrono::duration<double> timeout);

class VerifierBackend
{
public:
  virtual ~VerifierBackend() = default;
  virtual std::string id() const = 0;
  virtual Verdict check(const VerificationRequest& request) = 0;
};

/**
 * Declarative verifier stand-in. Entries match a clause by its expression or
 * by its full `keyword expression` text, whitespace-normalized.
 */
struct RuleTable
{
  std::string fixture;
  std::set<std::string> illegal;
  std::set<std::string> unsat;
  /// Clause sets each of which makes the target provable.
  std::vector<std::set<std::string>> adequate;

  bool is_illegal(const SpecClause& c) const;
  bool is_unsat(const SpecClause& c) const;
  bool adequate_with(const std::vector<SpecClause>& present) const;
};

RuleTable load_rule_table(const std::string& path);

class MockOracle : public VerifierBackend
{
public:
  /// One table for every program.
  explicit MockOracle(RuleTable rules);
  /// Tables keyed by unit checksum; unknown programs raise UnknownFixture.
  explicit MockOracle(std::map<std::string, RuleTable> by_checksum);
  /// Loads `*.rules.json` under dir; each file names its checksum.
  static MockOracle from_directory(const std::string& dir);

  std::string id() const override { return "mock"; }
  Verdict check(const VerificationRequest& request) override;

private:
  const RuleTable& table_for(const VerificationRequest& request) const;

  std::optional<RuleTable> d_single;
  std::map<std::string, RuleTable> d_tables;
};

inline std::unique_ptr<VerifierBackend>
mock_oracle(RuleTable rules)
{
  return std::make_unique<MockOracle>(std::move(rules));
}

struct FramaCOptions
{
  std::string executable = "frama-c";
  std::string prover = "alt-ergo";
  int wp_timeout = 10;
  std::string scratch_dir;
  bool keep_files = false;
};

/**
 * Frama-C/WP as a subprocess. Goals come from the report plugin and are
 * joined to clauses by annotation line.
 */
class FramaCBackend : public VerifierBackend
{
public:
  explicit FramaCBackend(FramaCOptions options);

  std::string id() const override { return "framac"; }
  Verdict check(const VerificationRequest& request) override;

  std::vector<std::string> command(const VerificationRequest& request,
                                   const std::string& file) const;

private:
  FramaCOptions d_options;
};

/** Parses `frama-c ... -then -report` output into a verdict. */
Verdict parse_wp_report(const std::string& output, int exit_code,
                        const VerificationRequest& request);

/** Records every check issued through it. */
class RecordingBackend : public VerifierBackend
{
public:
  struct Call
  {
    CheckMode mode;
    std::set<std::size_t> focus;
    std::vector<std::string> focus_owners;
    Outcome outcome;
  };

  explicit RecordingBackend(VerifierBackend& inner) : d_inner(inner) {}

  std::string id() const override { return d_inner.id(); }
  Verdict check(const VerificationRequest& request) override;

  std::vector<Call> calls() const;

private:
  VerifierBackend& d_inner;
  mutable std::mutex d_mutex;
  std::vector<Call> d_calls;
};

struct ProcessResult
{
  int exit_code = -1;
  std::string output;
  bool timed_out = false;
};

/** Runs argv with stdout+stderr captured; killed once timeout expires. */
ProcessResult run_process(const std::vector<std::string>& argv,
                          std::chrono::duration<double> timeout);

/** Resolves a program name against PATH; empty when not found. */
std::string find_executable(const std::string& name);

}  // namespace specweave
