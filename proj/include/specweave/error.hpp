#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace specweave {

enum class ErrorKind {
  SyntaxError,
  UnsupportedConstruct,
  AssertionNotFound,
  NotInFunction,
  UnknownNode,
  EmptyBlock,
  UnknownClause,
  KindMismatch,
  DuplicateClause,
  MissingCalleeSpecs,
  ProviderUnavailable,
  BudgetExceeded,
  FixtureMissing,
  BackendUnavailable,
  UnknownFixture,
  InvariantViolation,
  IoError,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

/**
 * Every failure surfaced by the library. The kind mirrors the named error
 * conditions of each operation so callers can branch without string matching.
 */
class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        d_kind(kind)
  {
  }

  ErrorKind kind() const noexcept { return d_kind; }

private:
  ErrorKind d_kind;
};

}  // namespace specweave
