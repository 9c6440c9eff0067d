#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specweave/source.hpp"

namespace specweave {

/**
 * Node kinds kept in the tree. Statements that are neither loops, calls nor
 * assertions are flattened away: their interesting descendants become
 * children of the nearest kept ancestor. Annotation holds pre-existing ACSL
 * comments other than assertions.
 */
enum class AstKind
{
  FunctionDef,
  LoopStmt,
  CallExpr,
  AssertStmt,
  Annotation,
  Other,
};

enum class LoopForm
{
  None,
  For,
  While,
  DoWhile,
};

std::string_view to_string(AstKind kind);

using AstId = std::uint32_t;

struct AstNode
{
  AstId id = 0;
  AstKind kind = AstKind::Other;
  /// Function name, `<function>.loop<k>` for loops, callee for calls.
  std::string name;
  SourceSpan span;
  std::vector<AstNode> children;
  LoopForm loop_form = LoopForm::None;
  /// Asserted expression for AssertStmt, comment body for Annotation.
  std::string text;
};

/** Structural equality: kind, name and children, ignoring spans. */
bool same_shape(const AstNode& a, const AstNode& b, bool ignore_annotations);

/** A parsed unit. Cheap to copy; the tree is shared and immutable. */
class Program
{
public:
  Program(SourceUnitPtr unit, AstNode root, std::vector<std::string> includes);

  const SourceUnitPtr& unit() const { return d_unit; }
  const AstNode& root() const { return *d_root; }
  const AstNode& node(AstId id) const;
  std::size_t node_count() const { return d_index.size(); }

  /** Function definition by name, or nullptr if the unit only declares it. */
  const AstNode* find_function(std::string_view name) const;
  std::vector<const AstNode*> functions() const;
  /** Every AssertStmt in source order. */
  std::vector<const AstNode*> assertions() const;
  /** Headers named by `#include` lines; their bodies are never available. */
  const std::vector<std::string>& includes() const { return d_includes; }

private:
  SourceUnitPtr d_unit;
  std::shared_ptr<const AstNode> d_root;
  std::vector<const AstNode*> d_index;
  std::vector<std::string> d_includes;
};

/**
 * Parses the supported C subset. Throws Error{SyntaxError} with a line/col
 * for malformed input and Error{UnsupportedConstruct} for function pointers
 * and inline assembly.
 */
Program parse_program(SourceUnitPtr unit);

struct AssertionLocator
{
  std::size_t line = 0;
  std::string expression_text;
};

/** Innermost FunctionDef enclosing the assertion at locator.line. */
AstId locate_assertion(const Program& program, const AssertionLocator& locator);

/** The AssertStmt starting on a line; the first one wins on ties. */
const AstNode* assertion_at(const Program& program, std::size_t line);

/** The unique assertion of the unit, if there is exactly one. */
std::optional<AssertionLocator> detect_single_assertion(const Program& program);

}  // namespace specweave
