#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace specweave {

/** 64-bit FNV-1a of the text, rendered as 16 lowercase hex digits. */
std::string content_checksum(std::string_view text);

/**
 * An immutable C translation unit. Line starts are indexed once so that
 * offset <-> (line, column) conversions are cheap.
 */
class SourceUnit
{
public:
  SourceUnit(std::string path, std::string text);

  static SourceUnit from_file(const std::string& path);

  const std::string& path() const { return d_path; }
  const std::string& text() const { return d_text; }
  const std::string& checksum() const { return d_checksum; }

  std::size_t line_count() const { return d_line_starts.size(); }
  /** Byte offset of the first character of a 1-based line. */
  std::size_t line_start(std::size_t line) const;
  /** 1-based (line, column) of a byte offset. */
  std::pair<std::size_t, std::size_t> position(std::size_t offset) const;
  std::string_view line_text(std::size_t line) const;

private:
  std::string d_path;
  std::string d_text;
  std::string d_checksum;
  std::vector<std::size_t> d_line_starts;
};

using SourceUnitPtr = std::shared_ptr<const SourceUnit>;

/** Half-open byte range plus its 1-based inclusive line/column bounds. */
struct SourceSpan
{
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t start_line = 0;
  std::size_t start_col = 0;
  std::size_t end_line = 0;
  std::size_t end_col = 0;

  bool contains(const SourceSpan& other) const
  {
    return begin <= other.begin && other.end <= end;
  }
  bool contains_line(std::size_t line) const
  {
    return start_line <= line && line <= end_line;
  }
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

SourceSpan make_span(const SourceUnit& unit, std::size_t begin, std::size_t end);

}  // namespace specweave
