#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "random_program.hpp"
#include "specweave/ast.hpp"
#include "specweave/error.hpp"

using namespace specweave;
namespace gen = specweave::testing;

namespace {

Program
parse(const std::string& text, const std::string& path = "t.c")
{
  return parse_program(std::make_shared<const SourceUnit>(path, text));
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

std::size_t
count(const AstNode& n, AstKind kind)
{
  std::size_t c = n.kind == kind;
  for (const AstNode& k : n.children) c += count(k, kind);
  return c;
}

const std::string k_bubble = R"(void swap(int *a, int *b) {
  int t = *a;
  *a = *b;
  *b = t;
}

void sort(int *a, int n) {
  for (int i = 0; i < n; i++) {
    for (int j = 0; j < n - i - 1; j++) {
      if (a[j] > a[j + 1])
        swap(&a[j], &a[j + 1]);
    }
  }
}

int main() {
  int a[10];
  sort(a, 10);
  //@ assert \forall integer i; 0 < i < 10 ==> a[i-1] <= a[i];
  return 0;
}
)";

}  // namespace

TEST(SourceUnit, ChecksumIsFnv1a64)
{
  EXPECT_EQ(content_checksum(""), "cbf29ce484222325");
  EXPECT_EQ(content_checksum("a"), "af63dc4c8601ec8c");
  EXPECT_EQ(content_checksum("foobar"), "85944171f73967e8");
}

TEST(SourceUnit, EmptyTextIsRejected)
{
  EXPECT_EQ(kind_of([] { SourceUnit("e.c", ""); }), ErrorKind::SyntaxError);
}

TEST(SourceUnit, PositionsAreOneBased)
{
  SourceUnit u("p.c", "ab\ncd\n\nx");
  EXPECT_EQ(u.line_count(), 4u);
  EXPECT_EQ(u.position(0), std::make_pair(std::size_t{1}, std::size_t{1}));
  EXPECT_EQ(u.position(4), std::make_pair(std::size_t{2}, std::size_t{2}));
  EXPECT_EQ(u.line_start(4), 7u);
  EXPECT_EQ(u.line_text(2), "cd");
  EXPECT_EQ(u.line_text(3), "");
}

TEST(SourceUnit, MissingFileIsIoError)
{
  EXPECT_EQ(kind_of([] { SourceUnit::from_file("/nonexistent/x.c"); }), ErrorKind::IoError);
}

TEST(Parser, BubbleSortStructure)
{
  Program p = parse(k_bubble);
  auto fns = p.functions();
  ASSERT_EQ(fns.size(), 3u);
  EXPECT_EQ(fns[0]->name, "swap");
  EXPECT_EQ(fns[1]->name, "sort");
  EXPECT_EQ(fns[2]->name, "main");

  const AstNode& outer = fns[1]->children.at(0);
  EXPECT_EQ(outer.kind, AstKind::LoopStmt);
  EXPECT_EQ(outer.name, "sort.loop1");
  EXPECT_EQ(outer.loop_form, LoopForm::For);
  ASSERT_EQ(outer.children.size(), 1u);
  const AstNode& inner = outer.children[0];
  EXPECT_EQ(inner.name, "sort.loop2");
  ASSERT_EQ(inner.children.size(), 1u);
  EXPECT_EQ(inner.children[0].kind, AstKind::CallExpr);
  EXPECT_EQ(inner.children[0].name, "swap");
  EXPECT_EQ(outer.span.start_line, 8u);
  EXPECT_EQ(outer.span.end_line, 13u);

  auto asserts = p.assertions();
  ASSERT_EQ(asserts.size(), 1u);
  EXPECT_EQ(asserts[0]->span.start_line, 19u);
  EXPECT_EQ(asserts[0]->text, "\\forall integer i; 0 < i < 10 ==> a[i-1] <= a[i]");
}

TEST(Parser, NodeIdsAreDenseAndIndexed)
{
  Program p = parse(k_bubble);
  for (AstId id = 0; id < p.node_count(); ++id) EXPECT_EQ(p.node(id).id, id);
  EXPECT_EQ(kind_of([&] { p.node(static_cast<AstId>(p.node_count())); }), ErrorKind::UnknownNode);
}

TEST(Parser, LoopForms)
{
  Program p = parse(R"(int f(int n) {
  int x = 0;
  while (x < n) { x++; }
  do { x--; } while (x > 0);
  for (;;) { break; }
  return x;
}
)");
  const AstNode* f = p.find_function("f");
  ASSERT_NE(f, nullptr);
  ASSERT_EQ(f->children.size(), 3u);
  EXPECT_EQ(f->children[0].loop_form, LoopForm::While);
  EXPECT_EQ(f->children[1].loop_form, LoopForm::DoWhile);
  EXPECT_EQ(f->children[2].loop_form, LoopForm::For);
  EXPECT_EQ(f->children[2].name, "f.loop3");
}

TEST(Parser, CallsInLoopConditionBelongToTheLoop)
{
  Program p = parse(R"(int g(int v) { return v; }
int f(int n) {
  int i = 0;
  while (g(i) < n) { i++; }
  return i;
}
)");
  const AstNode& loop = p.find_function("f")->children.at(0);
  ASSERT_EQ(loop.kind, AstKind::LoopStmt);
  ASSERT_EQ(loop.children.size(), 1u);
  EXPECT_EQ(loop.children[0].name, "g");
}

TEST(Parser, CastsAndSizeofAreNotCalls)
{
  Program p = parse(R"(typedef int word;
int f(int n) {
  int a = (int)(n) + sizeof(int) + (word)(n);
  return a;
}
)");
  EXPECT_EQ(count(*p.find_function("f"), AstKind::CallExpr), 0u);
}

TEST(Parser, NestedCallsAreChildren)
{
  Program p = parse(R"(int g(int v) { return v; }
int h(int v) { return v; }
int f(int n) { return g(h(n)); }
)");
  const AstNode* f = p.find_function("f");
  ASSERT_EQ(f->children.size(), 1u);
  EXPECT_EQ(f->children[0].name, "g");
  ASSERT_EQ(f->children[0].children.size(), 1u);
  EXPECT_EQ(f->children[0].children[0].name, "h");
}

TEST(Parser, IncludesAreRecorded)
{
  Program p = parse("#include <math.h>\n#include \"local.h\"\nint f() { return 0; }\n");
  ASSERT_EQ(p.includes().size(), 2u);
  EXPECT_EQ(p.includes()[0], "math.h");
  EXPECT_EQ(p.includes()[1], "local.h");
}

TEST(Parser, PreexistingAnnotationsAreKept)
{
  Program p = parse(R"(/*@ requires n >= 0; */
int f(int n) {
  //@ loop invariant 0 <= i;
  for (int i = 0; i < n; i++) {}
  return n;
}
)");
  EXPECT_EQ(count(p.root(), AstKind::Annotation), 2u);
  EXPECT_EQ(count(p.root(), AstKind::AssertStmt), 0u);
}

TEST(Parser, BothAssertionSyntaxes)
{
  Program p = parse(R"(#include <assert.h>
int f(int n) {
  assert(n > 0);
  //@ assert n >= 0;
  return n;
}
)");
  auto all = p.assertions();
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0]->text, "n > 0");
  EXPECT_EQ(all[1]->text, "n >= 0");
}

TEST(Parser, FunctionPointerIsUnsupported)
{
  EXPECT_EQ(kind_of([] { parse("int apply(int (*f)(int), int x) { return f(x); }\n"); }),
            ErrorKind::UnsupportedConstruct);
  EXPECT_EQ(kind_of([] { parse("int (*table)(int);\nint f() { return 0; }\n"); }),
            ErrorKind::UnsupportedConstruct);
}

TEST(Parser, InlineAssemblyIsUnsupported)
{
  EXPECT_EQ(kind_of([] { parse("void f() { asm(\"nop\"); }\n"); }),
            ErrorKind::UnsupportedConstruct);
}

TEST(Parser, SyntaxErrorsCarryLineAndColumn)
{
  try
  {
    parse("int f() {\n  return 0;\n", "bad.c");
    FAIL() << "expected SyntaxError";
  }
  catch (const Error& e)
  {
    EXPECT_EQ(e.kind(), ErrorKind::SyntaxError);
    EXPECT_NE(std::string(e.what()).find("bad.c:"), std::string::npos);
  }
  EXPECT_EQ(kind_of([] { parse("int f() { return 0 @ 1; }\n"); }), ErrorKind::SyntaxError);
  EXPECT_EQ(kind_of([] { parse("int f() { /* open\n"); }), ErrorKind::SyntaxError);
  EXPECT_EQ(kind_of([] { parse("int f() { return (1; }\n"); }), ErrorKind::SyntaxError);
}

TEST(Locator, FindsEnclosingFunction)
{
  Program p = parse(k_bubble);
  AstId fn = locate_assertion(p, AssertionLocator{19, ""});
  EXPECT_EQ(p.node(fn).name, "main");
  EXPECT_EQ(kind_of([&] { locate_assertion(p, AssertionLocator{6, ""}); }),
            ErrorKind::NotInFunction);
  EXPECT_EQ(kind_of([&] { locate_assertion(p, AssertionLocator{18, ""}); }),
            ErrorKind::AssertionNotFound);
}

TEST(Locator, SingleAssertionDetection)
{
  Program one = parse(k_bubble);
  auto loc = detect_single_assertion(one);
  ASSERT_TRUE(loc.has_value());
  EXPECT_EQ(loc->line, 19u);

  Program two = parse("int f(int n) {\n  //@ assert n > 0;\n  //@ assert n > 1;\n  return n;\n}\n");
  EXPECT_FALSE(detect_single_assertion(two).has_value());
  Program none = parse("int f() { return 0; }\n");
  EXPECT_FALSE(detect_single_assertion(none).has_value());
}

TEST(Locator, FirstAssertionOnALineWins)
{
  Program p = parse("int f(int n) {\n  //@ assert n > 0;\n  return n;\n}\n"
                    "int g(int n) { assert(n > 1); assert(n > 2); return n; }\n");
  const AstNode* a = assertion_at(p, 5);
  ASSERT_NE(a, nullptr);
  EXPECT_EQ(a->text, "n > 1");
}

TEST(SameShape, IgnoresSpansAndOptionallyAnnotations)
{
  Program a = parse("int f(int n) {\n  for (;;) {}\n  return n;\n}\n");
  Program b = parse("int f(int n)\n{\n  //@ loop invariant \\true;\n  for (;;)\n  {\n  }\n  return n;\n}\n");
  EXPECT_TRUE(same_shape(a.root(), b.root(), true));
  EXPECT_FALSE(same_shape(a.root(), b.root(), false));
}

TEST(ParserProperty, LoopAndCallCountsMatchTokenScan)
{
  std::mt19937 rng(7);
  for (int round = 0; round < 200; ++round)
  {
    gen::GenOptions opt;
    opt.max_functions = 5;
    opt.max_loops = 6;
    opt.recursion = round % 2 == 0;
    gen::GenProgram g = gen::random_program(rng, opt);
    Program p = parse(g.text);
    auto scanned = gen::token_scan(g.text);
    for (const AstNode* fn : p.functions())
    {
      ASSERT_TRUE(scanned.count(fn->name)) << fn->name;
      EXPECT_EQ(count(*fn, AstKind::LoopStmt), scanned[fn->name].loops) << g.text;
      EXPECT_EQ(count(*fn, AstKind::CallExpr), scanned[fn->name].calls) << g.text;
    }
    EXPECT_EQ(p.functions().size(), scanned.size());
  }
}
