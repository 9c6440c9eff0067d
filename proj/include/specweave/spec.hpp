#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "specweave/callgraph.hpp"

namespace specweave {

enum class SpecKind
{
  Requires,
  Ensures,
  LoopInvariant,
  LoopAssigns,
  Assigns,
  Assert,
};

enum class SpecStatus
{
  Candidate,
  Legal,
  Satisfiable,
  Retained,
  EliminatedIllegal,
  EliminatedUnsat,
  EliminatedRedundant,
};

std::string_view keyword(SpecKind kind);
std::string_view to_string(SpecStatus status);

/** Candidate -> Legal -> Satisfiable -> Retained, eliminations at each gate. */
bool can_transition(SpecStatus from, SpecStatus to);

/** Whether a clause kind may be attached to a node of the given kind. */
bool kind_allowed(SpecKind kind, NodeKind owner);

/** Collapses whitespace runs to one space and trims both ends. */
std::string normalize_ws(std::string_view text);

struct ClauseOrigin
{
  int iteration = 0;
  std::string provider;
};

struct SpecClause
{
  SpecKind kind = SpecKind::Requires;
  /// Whitespace-normalized expression, without the keyword or trailing ';'.
  std::string expression;
  ClauseOrigin origin;
  SpecStatus status = SpecStatus::Candidate;

  /// `keyword expression`, the identity used for equality and rule lookup.
  std::string text() const;
};

/** Clause identity is normalized text; origin and status do not count. */
bool same_clause(const SpecClause& a, const SpecClause& b);
bool same_clauses(const std::vector<SpecClause>& a, const std::vector<SpecClause>& b);

/** Builds a clause, rejecting empty or multi-clause expressions. */
SpecClause make_clause(SpecKind kind, std::string_view expression, ClauseOrigin origin = {});

struct ClauseParse
{
  std::vector<SpecClause> clauses;
  /// One line per dropped fragment (unknown keyword, empty body, ...).
  std::vector<std::string> diagnostics;
};

/**
 * Harvests clauses from ACSL comments (block and `//@` line forms) anywhere in
 * the text, plus keyword-led lines of fenced code blocks that carry no ACSL
 * comment markers. Never throws.
 */
ClauseParse parse_clauses_detailed(std::string_view text);
std::vector<SpecClause> parse_clauses(std::string_view text);

struct SpecBlock
{
  std::string owner;
  std::vector<SpecClause> clauses;
};

/**
 * Canonical rendering: one clause per line inside an ACSL block comment, asserts as
 * `//@ assert e;` lines. Lines carry no indentation. Throws Error{EmptyBlock}.
 */
std::vector<std::string> render_block_lines(const SpecBlock& block);
std::string render_block(const SpecBlock& block);

}  // namespace specweave
