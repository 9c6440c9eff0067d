#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "specweave/error.hpp"
#include "specweave/verifier.hpp"

namespace specweave {

std::string_view
to_string(CheckMode mode)
{
  switch (mode)
  {
    case CheckMode::Legality: return "legality";
    case CheckMode::Satisfiability: return "satisfiability";
    case CheckMode::Adequacy: return "adequacy";
  }
  return "?";
}

std::string_view
to_string(Outcome outcome)
{
  switch (outcome)
  {
    case Outcome::Proved: return "proved";
    case Outcome::Failed: return "failed";
    case Outcome::CompileError: return "compile-error";
    case Outcome::Timeout: return "timeout";
  }
  return "?";
}

std::optional<std::size_t>
Verdict::first_blamed(const std::set<std::size_t>& focus) const
{
  for (const Goal& g : goals)
  {
    if (g.status != GoalStatus::Unproved || !g.ref.seq) continue;
    if (focus.empty() || focus.count(*g.ref.seq)) return g.ref.seq;
  }
  return std::nullopt;
}

const Goal*
Verdict::target_goal() const
{
  for (const Goal& g : goals)
  {
    if (g.ref.target) return &g;
  }
  return nullptr;
}

VerificationRequest
make_request(const AnnotatedProgram& prog, CheckMode mode, std::set<std::size_t> focus,
             const std::optional<AssertionLocator>& target, std::chrono::duration<double> timeout)
{
  RenderedProgram rendered = render_program(prog);
  VerificationRequest req;
  req.mode = mode;
  req.focus = std::move(focus);
  req.timeout = timeout;
  req.unit_checksum = prog.unit().checksum();
  req.unit_path = prog.unit().path();
  if (target)
  {
    req.target_assertion =
        AssertionLocator{rendered.map_line(prog.unit(), target->line), target->expression_text};
  }
  req.program_text = std::move(rendered.text);
  req.clauses = std::move(rendered.clauses);
  return req;
}

namespace {

std::string
rule_key(const std::string& rule)
{
  std::string r = normalize_ws(rule);
  if (!r.empty() && r.back() == ';')
  {
    r.pop_back();
    r = normalize_ws(r);
  }
  return r;
}

bool
rule_matches(const std::set<std::string>& rules, const SpecClause& c)
{
  return rules.count(c.expression) > 0 || rules.count(c.text()) > 0;
}

std::set<std::string>
normalized(const std::set<std::string>& in)
{
  std::set<std::string> out;
  for (const std::string& s : in) out.insert(rule_key(s));
  return out;
}

RuleTable
normalize_table(RuleTable t)
{
  t.illegal = normalized(t.illegal);
  t.unsat = normalized(t.unsat);
  for (auto& s : t.adequate) s = normalized(s);
  return t;
}

}  // namespace

bool
RuleTable::is_illegal(const SpecClause& c) const
{
  return rule_matches(illegal, c);
}

bool
RuleTable::is_unsat(const SpecClause& c) const
{
  return rule_matches(unsat, c);
}

bool
RuleTable::adequate_with(const std::vector<SpecClause>& present) const
{
  for (const auto& needed : adequate)
  {
    bool all = std::all_of(needed.begin(), needed.end(), [&](const std::string& r) {
      return std::any_of(present.begin(), present.end(), [&](const SpecClause& c) {
        return c.expression == r || c.text() == r;
      });
    });
    if (all) return true;
  }
  return false;
}

RuleTable
load_rule_table(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw Error(ErrorKind::IoError, "cannot open rule table '" + path + "'");
  }
  try
  {
    auto doc = nlohmann::json::parse(in);
    RuleTable t;
    t.fixture = doc.value("checksum", std::string());
    for (const auto& s : doc.value("illegal", nlohmann::json::array()))
      t.illegal.insert(s.get<std::string>());
    for (const auto& s : doc.value("unsat", nlohmann::json::array()))
      t.unsat.insert(s.get<std::string>());
    for (const auto& set : doc.value("adequate", nlohmann::json::array()))
    {
      std::set<std::string> needed;
      for (const auto& s : set) needed.insert(s.get<std::string>());
      t.adequate.push_back(std::move(needed));
    }
    return normalize_table(std::move(t));
  }
  catch (const nlohmann::json::exception& e)
  {
    throw Error(ErrorKind::ConfigError, path + ": " + e.what());
  }
}

MockOracle::MockOracle(RuleTable rules) : d_single(normalize_table(std::move(rules))) {}

MockOracle::MockOracle(std::map<std::string, RuleTable> by_checksum)
{
  for (auto& [checksum, table] : by_checksum)
  {
    d_tables.emplace(checksum, normalize_table(std::move(table)));
  }
}

MockOracle
MockOracle::from_directory(const std::string& dir)
{
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
  {
    throw Error(ErrorKind::ConfigError, "rule directory '" + dir + "' does not exist");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
  {
    std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > 11
        && name.compare(name.size() - 11, 11, ".rules.json") == 0)
    {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::map<std::string, RuleTable> tables;
  for (const fs::path& f : files)
  {
    RuleTable t = load_rule_table(f.string());
    if (t.fixture.empty())
    {
      throw Error(ErrorKind::ConfigError, f.string() + ": rule table without checksum");
    }
    std::string key = t.fixture;
    tables.emplace(key, std::move(t));
  }
  return MockOracle(std::move(tables));
}

const RuleTable&
MockOracle::table_for(const VerificationRequest& request) const
{
  if (d_single) return *d_single;
  auto it = d_tables.find(request.unit_checksum);
  if (it == d_tables.end())
  {
    throw Error(ErrorKind::UnknownFixture, "no rule table for '" + request.unit_path + "' ("
                                               + request.unit_checksum + ")");
  }
  return it->second;
}

Verdict
MockOracle::check(const VerificationRequest& request)
{
  const RuleTable& rules = table_for(request);
  std::vector<ClauseLine> clauses = request.clauses;
  std::sort(clauses.begin(), clauses.end(),
            [](const ClauseLine& a, const ClauseLine& b) { return a.line < b.line; });

  Verdict v;
  for (const ClauseLine& c : clauses)
  {
    if (rules.is_illegal(c.clause))
    {
      v.goals.push_back(Goal{GoalRef{c.seq, false, c.clause.text()}, GoalStatus::Unproved, c.line});
      v.overall = Outcome::CompileError;
      v.diagnostics = "illegal clause at line " + std::to_string(c.line) + ": " + c.clause.text();
      return v;
    }
  }
  if (request.mode == CheckMode::Legality)
  {
    v.overall = Outcome::Proved;
    return v;
  }

  bool focus_ok = true;
  bool all_ok = true;
  std::vector<SpecClause> present;
  for (const ClauseLine& c : clauses)
  {
    bool ok = !rules.is_unsat(c.clause);
    v.goals.push_back(Goal{GoalRef{c.seq, false, c.clause.text()},
                           ok ? GoalStatus::Proved : GoalStatus::Unproved, c.line});
    all_ok = all_ok && ok;
    if (request.focus.empty() || request.focus.count(c.seq)) focus_ok = focus_ok && ok;
    present.push_back(c.clause);
  }
  if (request.mode == CheckMode::Satisfiability)
  {
    v.overall = focus_ok ? Outcome::Proved : Outcome::Failed;
    return v;
  }

  if (!request.target_assertion)
  {
    throw Error(ErrorKind::ConfigError, "adequacy check without a target assertion");
  }
  bool target_ok = rules.adequate_with(present);
  Goal target{GoalRef{std::nullopt, true, "assertion"},
              target_ok ? GoalStatus::Proved : GoalStatus::Unproved,
              request.target_assertion->line};
  auto at = std::find_if(v.goals.begin(), v.goals.end(),
                         [&](const Goal& g) { return g.line > target.line; });
  v.goals.insert(at, target);
  v.overall = all_ok && target_ok ? Outcome::Proved : Outcome::Failed;
  return v;
}

Verdict
RecordingBackend::check(const VerificationRequest& request)
{
  Verdict v = d_inner.check(request);
  Call call{request.mode, request.focus, {}, v.overall};
  for (const ClauseLine& c : request.clauses)
  {
    if (request.focus.count(c.seq)) call.focus_owners.push_back(c.owner);
  }
  std::lock_guard lock(d_mutex);
  d_calls.push_back(std::move(call));
  return v;
}

std::vector<RecordingBackend::Call>
RecordingBackend::calls() const
{
  std::lock_guard lock(d_mutex);
  return d_calls;
}

}  // namespace specweave
