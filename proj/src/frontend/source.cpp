#include "specweave/source.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "specweave/error.hpp"

namespace specweave {

std::string_view
to_string(ErrorKind kind)
{
  switch (kind)
  {
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnsupportedConstruct: return "UnsupportedConstruct";
    case ErrorKind::AssertionNotFound: return "AssertionNotFound";
    case ErrorKind::NotInFunction: return "NotInFunction";
    case ErrorKind::UnknownNode: return "UnknownNode";
    case ErrorKind::EmptyBlock: return "EmptyBlock";
    case ErrorKind::UnknownClause: return "UnknownClause";
    case ErrorKind::KindMismatch: return "KindMismatch";
    case ErrorKind::DuplicateClause: return "DuplicateClause";
    case ErrorKind::MissingCalleeSpecs: return "MissingCalleeSpecs";
    case ErrorKind::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::FixtureMissing: return "FixtureMissing";
    case ErrorKind::BackendUnavailable: return "BackendUnavailable";
    case ErrorKind::UnknownFixture: return "UnknownFixture";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Error";
}

std::string
content_checksum(std::string_view text)
{
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text)
  {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i)
  {
    out[static_cast<std::size_t>(i)] = digits[hash & 0xf];
    hash >>= 4;
  }
  return out;
}

SourceUnit::SourceUnit(std::string path, std::string text)
    : d_path(std::move(path)), d_text(std::move(text))
{
  if (d_text.empty())
  {
    throw Error(ErrorKind::SyntaxError, d_path + ": empty source unit");
  }
  d_checksum = content_checksum(d_text);
  d_line_starts.push_back(0);
  for (std::size_t i = 0; i < d_text.size(); ++i)
  {
    if (d_text[i] == '\n' && i + 1 < d_text.size())
    {
      d_line_starts.push_back(i + 1);
    }
  }
}

SourceUnit
SourceUnit::from_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
  {
    throw Error(ErrorKind::IoError, "cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return SourceUnit(path, ss.str());
}

std::size_t
SourceUnit::line_start(std::size_t line) const
{
  if (line == 0) return 0;
  if (line > d_line_starts.size()) return d_text.size();
  return d_line_starts[line - 1];
}

std::pair<std::size_t, std::size_t>
SourceUnit::position(std::size_t offset) const
{
  auto it = std::upper_bound(d_line_starts.begin(), d_line_starts.end(), offset);
  std::size_t line = static_cast<std::size_t>(it - d_line_starts.begin());
  return {line, offset - d_line_starts[line - 1] + 1};
}

std::string_view
SourceUnit::line_text(std::size_t line) const
{
  std::size_t b = line_start(line);
  std::size_t e = d_text.find('\n', b);
  if (e == std::string::npos) e = d_text.size();
  return std::string_view(d_text).substr(b, e - b);
}

SourceSpan
make_span(const SourceUnit& unit, std::size_t begin, std::size_t end)
{
  SourceSpan span;
  span.begin = begin;
  span.end = end;
  std::tie(span.start_line, span.start_col) = unit.position(begin);
  std::tie(span.end_line, span.end_col) = unit.position(end > begin ? end - 1 : begin);
  return span;
}

}  // namespace specweave
