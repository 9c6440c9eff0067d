#include <gtest/gtest.h>

#include <functional>
#include <sstream>

#include "doubles.hpp"
#include "specweave/annotated_program.hpp"
#include "specweave/error.hpp"

using namespace specweave;
namespace gen = specweave::testing;

namespace {

struct Fixture
{
  Program program;
  ExtGraph graph;
  AnnotatedProgram annotated;
};

Fixture
load(const std::string& text)
{
  Program p = parse_program(std::make_shared<const SourceUnit>("a.c", text));
  ExtGraph g = build_extended_call_graph(p, locate_assertion(p, *detect_single_assertion(p)));
  return {p, g, insert_placeholders(p, g.nodes())};
}

Fixture
load_file(const std::string& name)
{
  SourceUnit u = SourceUnit::from_file(gen::corpus_dir() + "/" + name);
  return load(u.text());
}

ErrorKind
kind_of(const std::function<void()>& f)
{
  try
  {
    f();
  }
  catch (const Error& e)
  {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::InvariantViolation;
}

const std::string k_loop = R"(int sum(int *a, int n) {
  int s = 0;
  for (int i = 0; i < n; i++) {
    s += a[i];
  }
  return s;
}

int main() {
  int a[3] = {1, 2, 3};
  int r = sum(a, 3);
  //@ assert r == 6;
  return 0;
}
)";

}  // namespace

TEST(Placeholders, OnePerNode)
{
  Fixture f = load(k_loop);
  ASSERT_EQ(f.annotated.sites().size(), f.graph.nodes().size());
  for (const ExtNode& n : f.graph.nodes())
  {
    EXPECT_EQ(f.annotated.site(n.id).owner_kind, n.kind);
    EXPECT_TRUE(f.annotated.block(n.id).empty());
  }
  EXPECT_EQ(f.annotated.site("sum.loop1").indent, "  ");
  EXPECT_EQ(f.annotated.site("sum.loop1").position.start_line, 3u);
  EXPECT_EQ(kind_of([&] { f.annotated.site("nope"); }), ErrorKind::UnknownNode);
}

TEST(AnnotatedProgram, InsertAndRemove)
{
  Fixture f = load(k_loop);
  AnnotatedProgram p = f.annotated.insert_clause("sum", make_clause(SpecKind::Requires, "n >= 0"));
  p = p.insert_clause("sum", make_clause(SpecKind::Requires, "\\valid(a + (0..n-1))"), 0);
  ASSERT_EQ(p.block("sum").size(), 2u);
  EXPECT_EQ(p.block("sum")[0].clause.expression, "\\valid(a + (0..n-1))");
  EXPECT_EQ(p.block("sum")[0].seq, 2u);
  EXPECT_EQ(p.clause_count(), 2u);
  EXPECT_EQ(f.annotated.clause_count(), 0u) << "edits return new values";

  AnnotatedProgram q = p.remove_clause("sum", 0);
  EXPECT_EQ(q.block("sum").size(), 1u);
  EXPECT_FALSE(q.find_seq(2).has_value());
  AnnotatedProgram r = q.insert_clause("sum", make_clause(SpecKind::Ensures, "\\result >= 0"));
  EXPECT_EQ(r.block("sum").back().seq, 3u) << "seqs are never reused";
}

TEST(AnnotatedProgram, InsertErrors)
{
  Fixture f = load(k_loop);
  AnnotatedProgram p = f.annotated.insert_clause("sum", make_clause(SpecKind::Requires, "n >= 0"));
  EXPECT_EQ(kind_of([&] { p.insert_clause("sum", make_clause(SpecKind::Requires, "n  >=  0")); }),
            ErrorKind::DuplicateClause);
  EXPECT_EQ(kind_of([&] {
              p.insert_clause("sum", make_clause(SpecKind::LoopInvariant, "0 <= i"));
            }),
            ErrorKind::KindMismatch);
  EXPECT_EQ(kind_of([&] {
              p.insert_clause("sum.loop1", make_clause(SpecKind::Ensures, "\\true"));
            }),
            ErrorKind::KindMismatch);
  EXPECT_EQ(kind_of([&] { p.insert_clause("nope", make_clause(SpecKind::Requires, "x")); }),
            ErrorKind::UnknownNode);
  EXPECT_EQ(kind_of([&] { p.insert_clause("sum", make_clause(SpecKind::Requires, "x"), 5); }),
            ErrorKind::UnknownClause);
  EXPECT_EQ(kind_of([&] { p.remove_clause("sum", 1); }), ErrorKind::UnknownClause);
  EXPECT_EQ(kind_of([&] { p.remove_seq(99); }), ErrorKind::UnknownClause);
}

TEST(AnnotatedProgram, AllClausesBySeq)
{
  Fixture f = load(k_loop);
  AnnotatedProgram p = f.annotated
                           .insert_clause("sum.loop1", make_clause(SpecKind::LoopInvariant, "0 <= i"))
                           .insert_clause("sum", make_clause(SpecKind::Requires, "n >= 0"))
                           .insert_clause("sum.loop1", make_clause(SpecKind::LoopAssigns, "i, s"));
  auto all = p.all_clauses();
  ASSERT_EQ(all.size(), 3u);
  EXPECT_EQ(all[0].first, "sum.loop1");
  EXPECT_EQ(all[1].first, "sum");
  EXPECT_EQ(all[2].second.clause.text(), "loop assigns i, s");
  auto where = p.find_seq(3);
  ASSERT_TRUE(where.has_value());
  EXPECT_EQ(where->first, "sum.loop1");
  EXPECT_EQ(where->second, 1u);
  EXPECT_EQ(p.with_status(3, SpecStatus::Legal).block("sum.loop1")[1].clause.status,
            SpecStatus::Legal);
}

TEST(Render, EmptyProgramRendersTheOriginal)
{
  Fixture f = load(k_loop);
  EXPECT_EQ(render_source(f.annotated), k_loop);
}

TEST(Render, BlocksGoAboveOwnersWithIndent)
{
  Fixture f = load(k_loop);
  AnnotatedProgram p =
      f.annotated.insert_clause("sum", make_clause(SpecKind::Requires, "n >= 0"))
          .insert_clause("sum.loop1", make_clause(SpecKind::LoopInvariant, "0 <= i <= n"))
          .insert_clause("sum.loop1", make_clause(SpecKind::LoopAssigns, "i, s"));
  RenderedProgram r = render_program(p);
  EXPECT_EQ(r.text.rfind("/*@ requires n >= 0; */\nint sum(", 0), 0u);
  EXPECT_NE(r.text.find("  int s = 0;\n  /*@ loop invariant 0 <= i <= n;\n"
                        "      loop assigns i, s; */\n  for ("),
            std::string::npos);
  ASSERT_EQ(r.clauses.size(), 3u);
  EXPECT_EQ(r.clauses[0].line, 1u);
  EXPECT_EQ(r.clauses[1].line, 4u);
  EXPECT_EQ(r.clauses[2].line, 5u);
  EXPECT_EQ(r.clause_on_line(5)->owner, "sum.loop1");
  EXPECT_EQ(r.clause_on_line(6), nullptr);

  // The assertion moved down by the three inserted lines.
  std::size_t mapped = r.map_line(f.annotated.unit(), 12);
  EXPECT_EQ(mapped, 15u);
  std::string line;
  std::istringstream in(r.text);
  for (std::size_t k = 0; k < mapped; ++k) std::getline(in, line);
  EXPECT_EQ(line, "  //@ assert r == 6;");
}

TEST(Render, ReparsedRenderKeepsTheShape)
{
  for (const char* name : {"bubble_sort.c", "triple_loop.c", "matrix_fill.c", "max_of.c"})
  {
    Fixture f = load_file(name);
    AnnotatedProgram p = f.annotated;
    for (const ExtNode& n : f.graph.nodes())
    {
      if (n.kind == NodeKind::Function)
      {
        p = p.insert_clause(n.id, make_clause(SpecKind::Requires, "\\true"));
        p = p.insert_clause(n.id, make_clause(SpecKind::Assigns, "\\nothing"));
      }
      else
      {
        p = p.insert_clause(n.id, make_clause(SpecKind::LoopInvariant, "\\true"));
      }
    }
    std::string text = render_source(p);
    Program back = parse_program(std::make_shared<const SourceUnit>("r.c", text));
    EXPECT_TRUE(same_shape(f.program.root(), back.root(), true)) << name << "\n" << text;

    Fixture again = load(text);
    for (const ExtNode& n : f.graph.nodes()) EXPECT_TRUE(again.graph.contains(n.id)) << n.id;
  }
}

TEST(Render, InlineOwnerGetsItsOwnLine)
{
  Fixture f = load("int main() { int x = 0; for (int i = 0; i < 3; i++) x++;\n"
                   "  //@ assert x == 3;\n  return 0; }\n");
  AnnotatedProgram p =
      f.annotated.insert_clause("main.loop1", make_clause(SpecKind::LoopInvariant, "0 <= i <= 3"));
  RenderedProgram r = render_program(p);
  EXPECT_NE(r.text.find("\n/*@ loop invariant 0 <= i <= 3; */\nfor ("), std::string::npos)
      << r.text;
  Program back = parse_program(std::make_shared<const SourceUnit>("r.c", r.text));
  EXPECT_TRUE(same_shape(f.program.root(), back.root(), true));
  EXPECT_EQ(r.map_line(f.annotated.unit(), 2), 4u);
}

TEST(Render, MarkerAndElision)
{
  Fixture f = load(k_loop);
  AnnotatedProgram p = f.annotated.insert_clause("sum", make_clause(SpecKind::Requires, "n >= 0"));
  RenderOptions opt;
  opt.marker_owner = "sum.loop1";
  opt.keep_functions = std::set<std::string>{"sum"};
  RenderedProgram r = render_program(p, opt);
  EXPECT_NE(r.text.find("  >>> INFILL <<<\n  for ("), std::string::npos);
  EXPECT_EQ(r.text.find("int main"), std::string::npos);
  EXPECT_NE(r.text.find("requires n >= 0"), std::string::npos);
}
