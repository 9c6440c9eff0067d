#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "specweave/ast.hpp"
#include "specweave/callgraph.hpp"
#include "specweave/spec.hpp"

namespace specweave {

/** Where a node's specification block is inserted. */
struct PlaceholderSite
{
  std::string owner;
  NodeKind owner_kind = NodeKind::Function;
  /// Zero-width span at the insertion point.
  SourceSpan position;
  std::size_t ordinal = 0;
  /// Leading whitespace of the owner's first line.
  std::string indent;
  /// Whether only whitespace precedes the owner on its line.
  bool own_line = true;
};

/** A clause placed in a program; seq is unique and never reused. */
struct PlacedClause
{
  SpecClause clause;
  std::size_t seq = 0;
};

struct ClauseLine
{
  std::size_t seq = 0;
  std::string owner;
  /// 1-based line of the clause in the rendered text.
  std::size_t line = 0;
  SpecClause clause;
};

struct RenderOptions
{
  /// Marker placed after this owner's existing clauses.
  std::optional<std::string> marker_owner;
  std::string marker = ">>> INFILL <<<";
  /// Top-level functions to keep; everything else function-shaped is elided.
  std::optional<std::set<std::string>> keep_functions;
};

struct RenderedProgram
{
  std::string text;
  std::vector<ClauseLine> clauses;
  /// (original offset, newlines inserted there) for line remapping.
  std::vector<std::pair<std::size_t, std::size_t>> insertions;

  /// Rendered line of an original line (full renders only).
  std::size_t map_line(const SourceUnit& unit, std::size_t original_line) const;
  /// The clause rendered on a line, if any.
  const ClauseLine* clause_on_line(std::size_t line) const;
};

/**
 * Source unit plus one placeholder per graph node and the clauses placed
 * there. A value type: every edit returns a new program.
 */
class AnnotatedProgram
{
public:
  AnnotatedProgram(Program program, std::vector<PlaceholderSite> sites);

  const Program& program() const { return d_program; }
  const SourceUnit& unit() const { return *d_program.unit(); }
  const std::vector<PlaceholderSite>& sites() const { return d_sites; }
  const PlaceholderSite& site(const std::string& owner) const;

  const std::vector<PlacedClause>& block(const std::string& owner) const;
  std::size_t clause_count() const;
  /// Every placed clause as (owner, clause), ordered by seq.
  std::vector<std::pair<std::string, PlacedClause>> all_clauses() const;
  std::optional<std::pair<std::string, std::size_t>> find_seq(std::size_t seq) const;

  /**
   * Inserts at index (default: append). Throws Error{KindMismatch} when the
   * clause kind does not fit the owner and Error{DuplicateClause} when the
   * block already has the same normalized clause.
   */
  AnnotatedProgram insert_clause(const std::string& owner, SpecClause clause,
                                 std::optional<std::size_t> index = std::nullopt) const;
  AnnotatedProgram insert_clauses(const std::string& owner,
                                  const std::vector<SpecClause>& clauses) const;
  /// Throws Error{UnknownClause}.
  AnnotatedProgram remove_clause(const std::string& owner, std::size_t index) const;
  AnnotatedProgram remove_seq(std::size_t seq) const;
  AnnotatedProgram with_status(std::size_t seq, SpecStatus status) const;

  /// The seq the next inserted clause receives.
  std::size_t next_seq() const { return d_next_seq; }

private:
  Program d_program;
  std::vector<PlaceholderSite> d_sites;
  std::map<std::string, std::vector<PlacedClause>> d_blocks;
  std::size_t d_next_seq = 1;
};

/** One site per node: before a function header or a loop keyword. */
AnnotatedProgram insert_placeholders(const Program& program, const std::vector<ExtNode>& nodes);

RenderedProgram render_program(const AnnotatedProgram& prog, const RenderOptions& options = {});
std::string render_source(const AnnotatedProgram& prog);

inline AnnotatedProgram
remove_clause(const AnnotatedProgram& prog, const std::string& owner, std::size_t index)
{
  return prog.remove_clause(owner, index);
}

}  // namespace specweave
