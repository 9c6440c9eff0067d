#include <deque>
#include <sstream>

#include "specweave/error.hpp"
#include "specweave/llm.hpp"

namespace specweave {

void
LlmConfig::validate() const
{
  if (max_tokens <= 0)
  {
    throw Error(ErrorKind::ConfigError, "max_tokens must be positive");
  }
  if (!(temperature >= 0.0 && temperature <= 2.0))
  {
    throw Error(ErrorKind::ConfigError, "temperature must lie in [0, 2]");
  }
  if (shots < 0)
  {
    throw Error(ErrorKind::ConfigError, "shots must be non-negative");
  }
}

const std::vector<FewShotExample>&
default_shot_library()
{
  static const std::vector<FewShotExample> library = [] {
    std::vector<FewShotExample> shots = {
        {R"(void clear(void *p, int n) {
  int i;
  >>> INFILL <<<
  for (i = 0; i < n; i++) {
    ((char*)p)[i] = 0;
  }
})",
         R"(/*@ loop invariant 0 <= i <= n;
    loop invariant \forall integer j; 0 <= j < i ==> ((char*)p)[j] == 0;
    loop assigns i, ((char*)p)[0..n-1]; */)"},
        {R"(>>> INFILL <<<
int max_of(int *a, int *b) {
  if (*a >= *b)
    return *a;
  return *b;
})",
         R"(/*@ requires \valid_read(a) && \valid_read(b);
    assigns \nothing;
    ensures \result >= *a && \result >= *b;
    ensures \result == *a || \result == *b; */)"},
        {R"(int count_positive(int *a, int n) {
  int count = 0;
  >>> INFILL <<<
  for (int k = 0; k < n; k++) {
    if (a[k] > 0)
      count++;
  }
  return count;
})",
         R"(/*@ loop invariant 0 <= k <= n;
    loop invariant 0 <= count <= k;
    loop assigns k, count; */)"},
        {R"(>>> INFILL <<<
void fill(int *a, int n, int v) {
  for (int k = 0; k < n; k++) {
    a[k] = v;
  }
})",
         R"(/*@ requires n >= 0;
    requires \valid(a + (0..n-1));
    assigns a[0..n-1];
    ensures \forall integer j; 0 <= j < n ==> a[j] == v; */)"},
    };
    for (const FewShotExample& s : shots)
    {
      if (parse_clauses(s.expected_specs).empty())
      {
        throw Error(ErrorKind::ConfigError, "few-shot example without clauses");
      }
    }
    return shots;
  }();
  return library;
}

std::string
Prompt::user_message() const
{
  std::ostringstream out;
  if (!few_shot.empty())
  {
    out << "Here are some examples.\n\n";
    for (std::size_t i = 0; i < few_shot.size(); ++i)
    {
      out << "Example " << (i + 1) << " input:\n```c\n"
          << few_shot[i].input_code << "\n```\n"
          << "Example " << (i + 1) << " output:\n```\n"
          << few_shot[i].expected_specs << "\n```\n\n";
    }
  }
  out << "Code:\n```c\n" << masked_code;
  if (!masked_code.empty() && masked_code.back() != '\n') out << '\n';
  out << "```\n\n" << output_indicator << "\n";
  return out.str();
}

namespace {

std::size_t
count_occurrences(std::string_view haystack, std::string_view needle)
{
  std::size_t n = 0;
  for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size()))
  {
    ++n;
  }
  return n;
}

}  // namespace

Prompt
build_prompt(const AnnotatedProgram& prog, const ExtGraph& g, const std::string& target,
             const LlmConfig& cfg, const std::vector<FewShotExample>& shot_library,
             const std::set<std::string>& settled)
{
  const ExtNode& node = g.node(target);
  for (const std::string& c : g.callees(target))
  {
    if (!settled.count(c))
    {
      throw Error(ErrorKind::MissingCalleeSpecs,
                  "callee '" + c + "' of '" + target + "' has no block for this iteration");
    }
  }

  // Functions with a call/containment path from the target, plus its own.
  std::set<std::string> keep = {node.function};
  std::set<std::string> seen = {target};
  std::deque<std::string> queue = {target};
  while (!queue.empty())
  {
    std::string id = queue.front();
    queue.pop_front();
    const ExtNode& n = g.node(id);
    if (n.kind == NodeKind::Function) keep.insert(n.id);
    for (const std::string& c : g.callees(id))
    {
      if (seen.insert(c).second) queue.push_back(c);
    }
  }

  RenderOptions options;
  options.marker_owner = target;
  options.marker = std::string(k_infill_marker);
  options.keep_functions = keep;

  Prompt prompt;
  prompt.system_message =
      "As an experienced C/C++ programmer, I employ a behavioral interface specification "
      "language that utilizes Hoare style pre/post-conditions, as well as invariants, to "
      "annotate my C/C++ source code. The specification language is ACSL. Fill in the "
      + std::string(k_infill_marker)
      + " placeholder with ACSL specifications for the code that immediately follows it.";
  prompt.masked_code = render_program(prog, options).text;
  prompt.output_indicator =
      node.kind == NodeKind::Function
          ? "Output only the function contract (requires, ensures, assigns clauses) for the "
            "placeholder, in the form /*@ ... */."
          : "Output only the loop annotations (loop invariant, loop assigns clauses) for the "
            "placeholder, in the form /*@ ... */.";
  std::size_t shots = std::min<std::size_t>(static_cast<std::size_t>(std::max(cfg.shots, 0)),
                                             shot_library.size());
  prompt.few_shot.assign(shot_library.begin(),
                         shot_library.begin() + static_cast<std::ptrdiff_t>(shots));

  if (count_occurrences(prompt.masked_code, k_infill_marker) != 1)
  {
    throw Error(ErrorKind::InvariantViolation,
                "masked code for '" + target + "' must hold exactly one marker");
  }
  return prompt;
}

}  // namespace specweave
