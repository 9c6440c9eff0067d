#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <string>
#include <unordered_set>

#include "specweave/ast.hpp"
#include "specweave/error.hpp"

namespace specweave {

std::string_view
to_string(AstKind kind)
{
  switch (kind)
  {
    case AstKind::FunctionDef: return "FunctionDef";
    case AstKind::LoopStmt: return "LoopStmt";
    case AstKind::CallExpr: return "CallExpr";
    case AstKind::AssertStmt: return "AssertStmt";
    case AstKind::Annotation: return "Annotation";
    case AstKind::Other: return "Other";
  }
  return "Other";
}

namespace {

enum class TokKind
{
  Identifier,
  Keyword,
  Number,
  String,
  Char,
  Punct,
  Annotation,
};

struct Token
{
  TokKind kind;
  std::string text;
  std::size_t begin;
  std::size_t end;
  /// Annotation written as `//@` rather than `/*@ ... */`.
  bool line_form = false;
};

const std::unordered_set<std::string> k_keywords = {
    "auto",     "break",    "case",     "char",   "const",    "continue",
    "default",  "do",       "double",   "else",   "enum",     "extern",
    "float",    "for",      "goto",     "if",     "inline",   "int",
    "long",     "register", "restrict", "return", "short",    "signed",
    "sizeof",   "static",   "struct",   "switch", "typedef",  "union",
    "unsigned", "void",     "volatile", "while",  "_Bool",    "_Complex",
    "_Static_assert", "__attribute__", "asm", "__asm__", "_Alignof",
};

const std::unordered_set<std::string> k_type_keywords = {
    "char",   "const",   "double",   "enum",     "extern",   "float",
    "int",    "long",    "register", "restrict", "short",    "signed",
    "static", "struct",  "union",    "unsigned", "void",     "volatile",
    "_Bool",  "inline",  "_Complex", "auto",
};

const std::unordered_set<std::string> k_builtin_typedefs = {
    "size_t",  "ssize_t",  "ptrdiff_t", "intptr_t", "uintptr_t", "bool",
    "int8_t",  "int16_t",  "int32_t",   "int64_t",  "uint8_t",   "uint16_t",
    "uint32_t", "uint64_t", "FILE",     "wchar_t",
};

[[noreturn]] void
fail(ErrorKind kind, const SourceUnit& unit, std::size_t offset, const std::string& what)
{
  auto [line, col] = unit.position(std::min(offset, unit.text().size() - 1));
  throw Error(kind,
              unit.path() + ":" + std::to_string(line) + ":" + std::to_string(col) + ": "
                  + what);
}

class Lexer
{
public:
  explicit Lexer(const SourceUnit& unit) : d_unit(unit), d_src(unit.text()) {}

  std::vector<Token> run(std::vector<std::string>& includes)
  {
    std::vector<Token> out;
    bool line_start = true;
    while (d_pos < d_src.size())
    {
      char c = d_src[d_pos];
      if (c == '\n')
      {
        line_start = true;
        ++d_pos;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c)))
      {
        ++d_pos;
        continue;
      }
      if (c == '#' && line_start)
      {
        preprocessor(includes);
        continue;
      }
      line_start = false;
      if (starts_with("//@"))
      {
        std::size_t b = d_pos;
        std::size_t e = d_src.find('\n', d_pos);
        if (e == std::string::npos) e = d_src.size();
        out.push_back({TokKind::Annotation, d_src.substr(b + 3, e - b - 3), b, e, true});
        d_pos = e;
        continue;
      }
      if (starts_with("//"))
      {
        std::size_t e = d_src.find('\n', d_pos);
        d_pos = e == std::string::npos ? d_src.size() : e;
        continue;
      }
      if (starts_with("/*"))
      {
        std::size_t b = d_pos;
        std::size_t e = d_src.find("*/", d_pos + 2);
        if (e == std::string::npos)
        {
          fail(ErrorKind::SyntaxError, d_unit, b, "unterminated comment");
        }
        d_pos = e + 2;
        if (d_src.compare(b, 3, "/*@") == 0)
        {
          out.push_back({TokKind::Annotation, d_src.substr(b + 3, e - b - 3), b, d_pos});
        }
        continue;
      }
      std::size_t b = d_pos;
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      {
        while (d_pos < d_src.size()
               && (std::isalnum(static_cast<unsigned char>(d_src[d_pos])) || d_src[d_pos] == '_'))
        {
          ++d_pos;
        }
        std::string word = d_src.substr(b, d_pos - b);
        TokKind kind = k_keywords.count(word) ? TokKind::Keyword : TokKind::Identifier;
        out.push_back({kind, std::move(word), b, d_pos});
        continue;
      }
      if (std::isdigit(static_cast<unsigned char>(c))
          || (c == '.' && d_pos + 1 < d_src.size()
              && std::isdigit(static_cast<unsigned char>(d_src[d_pos + 1]))))
      {
        while (d_pos < d_src.size())
        {
          char d = d_src[d_pos];
          if (std::isalnum(static_cast<unsigned char>(d)) || d == '.' || d == '_')
          {
            ++d_pos;
          }
          else if ((d == '+' || d == '-')
                   && (d_src[d_pos - 1] == 'e' || d_src[d_pos - 1] == 'E'
                       || d_src[d_pos - 1] == 'p' || d_src[d_pos - 1] == 'P'))
          {
            ++d_pos;
          }
          else
          {
            break;
          }
        }
        out.push_back({TokKind::Number, d_src.substr(b, d_pos - b), b, d_pos});
        continue;
      }
      if (c == '"' || c == '\'')
      {
        ++d_pos;
        while (d_pos < d_src.size() && d_src[d_pos] != c)
        {
          if (d_src[d_pos] == '\\') ++d_pos;
          if (d_src[d_pos] == '\n')
          {
            fail(ErrorKind::SyntaxError, d_unit, b, "unterminated literal");
          }
          ++d_pos;
        }
        if (d_pos >= d_src.size())
        {
          fail(ErrorKind::SyntaxError, d_unit, b, "unterminated literal");
        }
        ++d_pos;
        out.push_back({c == '"' ? TokKind::String : TokKind::Char,
                       d_src.substr(b, d_pos - b), b, d_pos});
        continue;
      }
      static const char* multi[] = {"...", "<<=", ">>=", "->", "++", "--", "<<", ">>",
                                    "<=",  ">=",  "==",  "!=", "&&", "||", "*=", "/=",
                                    "%=",  "+=",  "-=",  "&=", "^=", "|="};
      bool matched = false;
      for (const char* m : multi)
      {
        if (starts_with(m))
        {
          std::size_t n = std::char_traits<char>::length(m);
          out.push_back({TokKind::Punct, std::string(m), b, b + n});
          d_pos += n;
          matched = true;
          break;
        }
      }
      if (matched) continue;
      if (std::string_view("{}()[];,:?.+-*/%&|^!~<>=").find(c) == std::string_view::npos)
      {
        fail(ErrorKind::SyntaxError, d_unit, b, std::string("unexpected character '") + c + "'");
      }
      out.push_back({TokKind::Punct, std::string(1, c), b, b + 1});
      ++d_pos;
    }
    return out;
  }

private:
  bool starts_with(std::string_view s) const
  {
    return d_src.compare(d_pos, s.size(), s) == 0;
  }

  void preprocessor(std::vector<std::string>& includes)
  {
    std::size_t b = d_pos;
    std::size_t e = b;
    while (e < d_src.size())
    {
      if (d_src[e] == '\n' && (e == 0 || d_src[e - 1] != '\\')) break;
      ++e;
    }
    std::string line = d_src.substr(b + 1, e - b - 1);
    std::size_t i = line.find_first_not_of(" \t");
    if (i != std::string::npos && line.compare(i, 7, "include") == 0)
    {
      std::size_t open = line.find_first_of("<\"", i + 7);
      if (open != std::string::npos)
      {
        char close = line[open] == '<' ? '>' : '"';
        std::size_t end = line.find(close, open + 1);
        if (end != std::string::npos)
        {
          includes.push_back(line.substr(open + 1, end - open - 1));
        }
      }
    }
    d_pos = e;
  }

  const SourceUnit& d_unit;
  const std::string& d_src;
  std::size_t d_pos = 0;
};

std::string
trim(std::string_view s)
{
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

/// Body of an ACSL `assert` annotation, or nullopt for other annotations.
std::optional<std::string>
assertion_body(const std::string& annotation)
{
  std::string body = trim(annotation);
  if (body.compare(0, 6, "assert") != 0
      || (body.size() > 6 && !std::isspace(static_cast<unsigned char>(body[6]))))
  {
    return std::nullopt;
  }
  body = trim(std::string_view(body).substr(6));
  if (!body.empty() && body.back() == ';') body.pop_back();
  return trim(body);
}

class Parser
{
public:
  Parser(const SourceUnit& unit, std::vector<Token> toks)
      : d_unit(unit), d_toks(std::move(toks))
  {
  }

  AstNode parse_unit()
  {
    reject_function_pointers();
    AstNode root;
    root.kind = AstKind::Other;
    root.name = "translation_unit";
    root.span = make_span(d_unit, 0, d_unit.text().size());
    while (!at_end())
    {
      external_declaration(root.children);
    }
    return root;
  }

private:
  bool at_end() const { return d_pos >= d_toks.size(); }

  const Token& peek(std::size_t ahead = 0) const
  {
    static const Token eof{TokKind::Punct, "<eof>", 0, 0};
    std::size_t i = d_pos + ahead;
    return i < d_toks.size() ? d_toks[i] : eof;
  }

  bool is(std::string_view text, std::size_t ahead = 0) const
  {
    const Token& t = peek(ahead);
    return d_pos + ahead < d_toks.size() && t.kind != TokKind::String
           && t.kind != TokKind::Char && t.kind != TokKind::Annotation && t.text == text;
  }

  std::size_t here() const
  {
    if (!at_end()) return d_toks[d_pos].begin;
    return d_unit.text().size() - 1;
  }

  void expect(std::string_view text)
  {
    if (!is(text))
    {
      fail(ErrorKind::SyntaxError, d_unit, here(),
           "expected '" + std::string(text) + "' but found '"
               + (at_end() ? std::string("end of input") : peek().text) + "'");
    }
    ++d_pos;
  }

  bool is_type_name(const Token& t) const
  {
    if (t.kind == TokKind::Keyword) return k_type_keywords.count(t.text) > 0;
    if (t.kind == TokKind::Identifier)
    {
      return d_typedefs.count(t.text) > 0 || k_builtin_typedefs.count(t.text) > 0;
    }
    return false;
  }

  /// `( * name ) (` can only be a function pointer declarator or call.
  void reject_function_pointers()
  {
    for (std::size_t i = 0; i + 1 < d_toks.size(); ++i)
    {
      const Token& t = d_toks[i];
      if ((t.kind == TokKind::Keyword) && (t.text == "asm" || t.text == "__asm__"))
      {
        fail(ErrorKind::UnsupportedConstruct, d_unit, t.begin, "inline assembly");
      }
      if (!(t.kind == TokKind::Punct && t.text == "(")) continue;
      if (!(d_toks[i + 1].kind == TokKind::Punct && d_toks[i + 1].text == "*")) continue;
      std::size_t j = i + 2;
      while (j < d_toks.size() && d_toks[j].kind == TokKind::Keyword
             && (d_toks[j].text == "const" || d_toks[j].text == "volatile"))
      {
        ++j;
      }
      if (j < d_toks.size() && d_toks[j].kind == TokKind::Identifier) ++j;
      if (j + 1 < d_toks.size() && d_toks[j].text == ")" && d_toks[j + 1].text == "("
          && d_toks[j].kind == TokKind::Punct && d_toks[j + 1].kind == TokKind::Punct)
      {
        fail(ErrorKind::UnsupportedConstruct, d_unit, t.begin, "function pointer");
      }
    }
  }

  /// Index one past the token closing the group opened at `open`.
  std::size_t match(std::size_t open) const
  {
    const std::string& o = d_toks[open].text;
    std::string c = o == "(" ? ")" : o == "[" ? "]" : "}";
    int depth = 0;
    for (std::size_t i = open; i < d_toks.size(); ++i)
    {
      const Token& t = d_toks[i];
      if (t.kind != TokKind::Punct) continue;
      if (t.text == "(" || t.text == "[" || t.text == "{")
      {
        ++depth;
      }
      else if (t.text == ")" || t.text == "]" || t.text == "}")
      {
        --depth;
        if (depth == 0)
        {
          if (t.text != c)
          {
            fail(ErrorKind::SyntaxError, d_unit, t.begin,
                 "mismatched '" + t.text + "' for '" + o + "'");
          }
          return i + 1;
        }
        if (depth < 0) break;
      }
    }
    fail(ErrorKind::SyntaxError, d_unit, d_toks[open].begin, "unbalanced '" + o + "'");
  }

  AstNode make_node(AstKind kind, std::string name, std::size_t begin, std::size_t end)
  {
    AstNode n;
    n.kind = kind;
    n.name = std::move(name);
    n.span = make_span(d_unit, begin, end);
    return n;
  }

  /// Calls in tokens [b, e), nested calls become children of their caller.
  void scan_calls(std::size_t b, std::size_t e, std::vector<AstNode>& out)
  {
    for (std::size_t i = b; i < e; ++i)
    {
      const Token& t = d_toks[i];
      if (t.kind == TokKind::Annotation)
      {
        fail(ErrorKind::SyntaxError, d_unit, t.begin, "annotation inside an expression");
      }
      if (t.kind != TokKind::Identifier) continue;
      if (i + 1 >= e || d_toks[i + 1].kind != TokKind::Punct || d_toks[i + 1].text != "(")
      {
        continue;
      }
      if (i > b && is_type_name(d_toks[i - 1])) continue;
      if (d_typedefs.count(t.text) || k_builtin_typedefs.count(t.text)) continue;
      std::size_t close = match(i + 1);
      if (close > e)
      {
        fail(ErrorKind::SyntaxError, d_unit, d_toks[i + 1].begin, "unbalanced '('");
      }
      AstNode call = make_node(AstKind::CallExpr, t.text, t.begin, d_toks[close - 1].end);
      scan_calls(i + 2, close - 1, call.children);
      out.push_back(std::move(call));
      i = close - 1;
    }
  }

  /// Advances to the `;` ending a simple statement; returns its index.
  std::size_t find_semicolon(std::size_t from) const
  {
    std::size_t i = from;
    while (i < d_toks.size())
    {
      const Token& t = d_toks[i];
      if (t.kind == TokKind::Punct)
      {
        if (t.text == ";") return i;
        if (t.text == "(" || t.text == "[" || t.text == "{")
        {
          i = match(i);
          continue;
        }
        if (t.text == ")" || t.text == "]" || t.text == "}")
        {
          fail(ErrorKind::SyntaxError, d_unit, t.begin, "unexpected '" + t.text + "'");
        }
      }
      if (t.kind == TokKind::Annotation)
      {
        fail(ErrorKind::SyntaxError, d_unit, t.begin, "annotation inside a statement");
      }
      ++i;
    }
    fail(ErrorKind::SyntaxError, d_unit, d_unit.text().size() - 1, "expected ';'");
  }

  void external_declaration(std::vector<AstNode>& out)
  {
    const Token& first = peek();
    if (first.kind == TokKind::Annotation)
    {
      out.push_back(annotation_node(first));
      ++d_pos;
      return;
    }
    if (is(";"))
    {
      ++d_pos;
      return;
    }
    std::size_t start = d_pos;
    bool is_typedef = is("typedef");
    std::size_t i = d_pos;
    while (i < d_toks.size())
    {
      const Token& t = d_toks[i];
      if (t.kind == TokKind::Annotation)
      {
        fail(ErrorKind::SyntaxError, d_unit, t.begin, "annotation inside a declaration");
      }
      if (t.kind == TokKind::Punct && t.text == ";")
      {
        break;
      }
      if (t.kind == TokKind::Punct && (t.text == "(" || t.text == "["))
      {
        i = match(i);
        continue;
      }
      if (t.kind == TokKind::Punct && t.text == "{")
      {
        if (i > start && d_toks[i - 1].text == ")" && d_toks[i - 1].kind == TokKind::Punct
            && !is_typedef)
        {
          std::size_t open = opening_paren(i - 1);
          if (open > start && d_toks[open - 1].kind == TokKind::Identifier)
          {
            out.push_back(function_definition(start, open - 1, i));
            return;
          }
        }
        i = match(i);
        continue;
      }
      if (t.kind == TokKind::Punct && (t.text == ")" || t.text == "]" || t.text == "}"))
      {
        fail(ErrorKind::SyntaxError, d_unit, t.begin, "unexpected '" + t.text + "'");
      }
      ++i;
    }
    if (i >= d_toks.size())
    {
      fail(ErrorKind::SyntaxError, d_unit, d_toks[start].begin, "expected ';' after declaration");
    }
    if (is_typedef)
    {
      for (std::size_t k = i; k > start; --k)
      {
        if (d_toks[k - 1].kind == TokKind::Identifier)
        {
          d_typedefs.insert(d_toks[k - 1].text);
          break;
        }
      }
    }
    AstNode decl = make_node(AstKind::Other, "declaration", d_toks[start].begin, d_toks[i].end);
    std::size_t init = start;
    for (std::size_t k = start; k < i; ++k)
    {
      if (d_toks[k].kind == TokKind::Punct && d_toks[k].text == "=")
      {
        init = k;
        break;
      }
    }
    if (init != start) scan_calls(init, i, decl.children);
    out.push_back(std::move(decl));
    d_pos = i + 1;
  }

  std::size_t opening_paren(std::size_t close) const
  {
    int depth = 0;
    for (std::size_t k = close + 1; k > 0; --k)
    {
      const Token& t = d_toks[k - 1];
      if (t.kind != TokKind::Punct) continue;
      if (t.text == ")") ++depth;
      if (t.text == "(" && --depth == 0) return k - 1;
    }
    fail(ErrorKind::SyntaxError, d_unit, d_toks[close].begin, "unbalanced ')'");
  }

  AstNode function_definition(std::size_t start, std::size_t name_tok, std::size_t body_open)
  {
    const std::string& name = d_toks[name_tok].text;
    std::size_t body_close = match(body_open);
    AstNode fn = make_node(AstKind::FunctionDef, name, d_toks[start].begin,
                           d_toks[body_close - 1].end);
    d_function = name;
    d_loop_counter = 0;
    d_pos = body_open;
    compound(fn.children);
    d_function.clear();
    return fn;
  }

  AstNode annotation_node(const Token& t)
  {
    if (auto body = assertion_body(t.text))
    {
      AstNode a = make_node(AstKind::AssertStmt, "assert", t.begin, t.end);
      a.text = *body;
      return a;
    }
    AstNode a = make_node(AstKind::Annotation, "annotation", t.begin, t.end);
    a.text = t.text;
    return a;
  }

  void compound(std::vector<AstNode>& out)
  {
    expect("{");
    while (!is("}"))
    {
      if (at_end())
      {
        fail(ErrorKind::SyntaxError, d_unit, here(), "expected '}'");
      }
      statement(out);
    }
    ++d_pos;
  }

  void condition(std::vector<AstNode>& out)
  {
    if (!is("("))
    {
      fail(ErrorKind::SyntaxError, d_unit, here(), "expected '('");
    }
    std::size_t close = match(d_pos);
    scan_calls(d_pos + 1, close - 1, out);
    d_pos = close;
  }

  std::string next_loop_name()
  {
    return d_function + ".loop" + std::to_string(++d_loop_counter);
  }

  void statement(std::vector<AstNode>& out)
  {
    const Token& t = peek();
    if (t.kind == TokKind::Annotation)
    {
      out.push_back(annotation_node(t));
      ++d_pos;
      return;
    }
    if (t.kind == TokKind::Punct)
    {
      if (t.text == "{")
      {
        compound(out);
        return;
      }
      if (t.text == ";")
      {
        ++d_pos;
        return;
      }
    }
    if (t.kind == TokKind::Keyword)
    {
      if (t.text == "for" || t.text == "while")
      {
        AstNode loop = make_node(AstKind::LoopStmt, next_loop_name(), t.begin, t.end);
        loop.loop_form = t.text == "for" ? LoopForm::For : LoopForm::While;
        ++d_pos;
        condition(loop.children);
        if (at_end()) fail(ErrorKind::SyntaxError, d_unit, here(), "expected loop body");
        statement(loop.children);
        loop.span = make_span(d_unit, t.begin, d_toks[d_pos - 1].end);
        out.push_back(std::move(loop));
        return;
      }
      if (t.text == "do")
      {
        AstNode loop = make_node(AstKind::LoopStmt, next_loop_name(), t.begin, t.end);
        loop.loop_form = LoopForm::DoWhile;
        ++d_pos;
        statement(loop.children);
        expect("while");
        condition(loop.children);
        expect(";");
        loop.span = make_span(d_unit, t.begin, d_toks[d_pos - 1].end);
        out.push_back(std::move(loop));
        return;
      }
      if (t.text == "if" || t.text == "switch")
      {
        bool is_if = t.text == "if";
        ++d_pos;
        condition(out);
        if (at_end()) fail(ErrorKind::SyntaxError, d_unit, here(), "expected statement");
        statement(out);
        if (is_if && is("else"))
        {
          ++d_pos;
          statement(out);
        }
        return;
      }
      if (t.text == "else")
      {
        fail(ErrorKind::SyntaxError, d_unit, t.begin, "'else' without 'if'");
      }
      if (t.text == "case" || t.text == "default")
      {
        std::size_t i = d_pos + 1;
        while (i < d_toks.size() && !(d_toks[i].kind == TokKind::Punct && d_toks[i].text == ":"))
        {
          ++i;
        }
        if (i >= d_toks.size()) fail(ErrorKind::SyntaxError, d_unit, t.begin, "expected ':'");
        d_pos = i + 1;
        return;
      }
      if (t.text == "break" || t.text == "continue")
      {
        ++d_pos;
        expect(";");
        return;
      }
    }
    if (t.kind == TokKind::Identifier && t.text == "assert" && is("(", 1))
    {
      std::size_t close = match(d_pos + 1);
      AstNode a = make_node(AstKind::AssertStmt, "assert", t.begin, d_toks[close - 1].end);
      a.text = trim(std::string_view(d_unit.text())
                        .substr(d_toks[d_pos + 1].end,
                                d_toks[close - 1].begin - d_toks[d_pos + 1].end));
      scan_calls(d_pos + 2, close - 1, a.children);
      d_pos = close;
      expect(";");
      out.push_back(std::move(a));
      return;
    }
    if (t.kind == TokKind::Identifier && is(":", 1))
    {
      d_pos += 2;
      return;
    }
    std::size_t semi = find_semicolon(d_pos);
    scan_calls(d_pos, semi, out);
    d_pos = semi + 1;
  }

  const SourceUnit& d_unit;
  std::vector<Token> d_toks;
  std::size_t d_pos = 0;
  std::set<std::string> d_typedefs;
  std::string d_function;
  int d_loop_counter = 0;
};

void
number(AstNode& node, AstId& next)
{
  node.id = next++;
  for (AstNode& c : node.children) number(c, next);
}

void
index(const AstNode& node, std::vector<const AstNode*>& out)
{
  out[node.id] = &node;
  for (const AstNode& c : node.children) index(c, out);
}

void
collect(const AstNode& node, AstKind kind, std::vector<const AstNode*>& out)
{
  if (node.kind == kind) out.push_back(&node);
  for (const AstNode& c : node.children) collect(c, kind, out);
}

}  // namespace

bool
same_shape(const AstNode& a, const AstNode& b, bool ignore_annotations)
{
  if (a.kind != b.kind || a.name != b.name || a.loop_form != b.loop_form) return false;
  auto keep = [&](const AstNode& n) {
    return !(ignore_annotations && n.kind == AstKind::Annotation);
  };
  std::vector<const AstNode*> ca;
  std::vector<const AstNode*> cb;
  for (const AstNode& c : a.children)
    if (keep(c)) ca.push_back(&c);
  for (const AstNode& c : b.children)
    if (keep(c)) cb.push_back(&c);
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i)
  {
    if (!same_shape(*ca[i], *cb[i], ignore_annotations)) return false;
  }
  return true;
}

Program::Program(SourceUnitPtr unit, AstNode root, std::vector<std::string> includes)
    : d_unit(std::move(unit)), d_includes(std::move(includes))
{
  AstId next = 0;
  number(root, next);
  d_root = std::make_shared<const AstNode>(std::move(root));
  d_index.resize(next);
  index(*d_root, d_index);
}

const AstNode&
Program::node(AstId id) const
{
  if (id >= d_index.size())
  {
    throw Error(ErrorKind::UnknownNode, "ast node " + std::to_string(id));
  }
  return *d_index[id];
}

const AstNode*
Program::find_function(std::string_view name) const
{
  for (const AstNode& c : d_root->children)
  {
    if (c.kind == AstKind::FunctionDef && c.name == name) return &c;
  }
  return nullptr;
}

std::vector<const AstNode*>
Program::functions() const
{
  std::vector<const AstNode*> out;
  for (const AstNode& c : d_root->children)
  {
    if (c.kind == AstKind::FunctionDef) out.push_back(&c);
  }
  return out;
}

std::vector<const AstNode*>
Program::assertions() const
{
  std::vector<const AstNode*> out;
  collect(*d_root, AstKind::AssertStmt, out);
  return out;
}

Program
parse_program(SourceUnitPtr unit)
{
  std::vector<std::string> includes;
  std::vector<Token> toks = Lexer(*unit).run(includes);
  AstNode root = Parser(*unit, std::move(toks)).parse_unit();
  return Program(std::move(unit), std::move(root), std::move(includes));
}

const AstNode*
assertion_at(const Program& program, std::size_t line)
{
  for (const AstNode* a : program.assertions())
  {
    if (a->span.start_line == line) return a;
  }
  return nullptr;
}

AstId
locate_assertion(const Program& program, const AssertionLocator& locator)
{
  const AstNode* owner = nullptr;
  for (const AstNode* fn : program.functions())
  {
    if (fn->span.contains_line(locator.line)) owner = fn;
  }
  if (owner == nullptr)
  {
    throw Error(ErrorKind::NotInFunction,
                "line " + std::to_string(locator.line) + " is outside every function");
  }
  const AstNode* a = assertion_at(program, locator.line);
  if (a == nullptr || !owner->span.contains(a->span))
  {
    throw Error(ErrorKind::AssertionNotFound,
                "no assertion on line " + std::to_string(locator.line));
  }
  return owner->id;
}

std::optional<AssertionLocator>
detect_single_assertion(const Program& program)
{
  auto all = program.assertions();
  if (all.size() != 1) return std::nullopt;
  return AssertionLocator{all.front()->span.start_line, all.front()->text};
}

}  // namespace specweave
