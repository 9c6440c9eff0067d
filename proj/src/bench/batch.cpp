#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "specweave/bench.hpp"

namespace specweave {

namespace fs = std::filesystem;

AssertionLocator
resolve_locator(const Program& program, const std::string& path, std::optional<std::size_t> line)
{
  if (!line)
  {
    fs::path sidecar = fs::path(path).replace_extension(".assert");
    std::ifstream in(sidecar);
    std::size_t n = 0;
    if (in && in >> n) line = n;
  }
  if (line)
  {
    const AstNode* a = assertion_at(program, *line);
    if (a == nullptr)
    {
      throw Error(ErrorKind::AssertionNotFound,
                  "no assertion on line " + std::to_string(*line) + " of '" + path + "'");
    }
    return AssertionLocator{*line, a->text};
  }
  if (auto only = detect_single_assertion(program)) return *only;
  throw Error(ErrorKind::AssertionNotFound,
              "'" + path + "' needs --assert-line: it has "
                  + std::to_string(program.assertions().size()) + " assertions");
}

std::vector<CorpusProgram>
load_corpus(const std::string& root)
{
  if (!fs::is_directory(root))
  {
    throw Error(ErrorKind::ConfigError, "corpus '" + root + "' is not a directory");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(root))
  {
    if (entry.is_regular_file() && entry.path().extension() == ".c") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<CorpusProgram> out;
  for (const fs::path& f : files)
  {
    CorpusProgram p;
    p.path = f.string();
    p.name = f.stem().string();
    try
    {
      p.unit = std::make_shared<const SourceUnit>(SourceUnit::from_file(p.path));
      Program program = parse_program(p.unit);
      p.locator = resolve_locator(program, p.path, std::nullopt);
    }
    catch (const Error& e)
    {
      if (e.kind() == ErrorKind::UnsupportedConstruct)
        p.unsupported = e.what();
      else
        p.error = e.what();
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::size_t
ProgramResult::successes() const
{
  return static_cast<std::size_t>(
      std::count_if(runs.begin(), runs.end(), [](const RunReport& r) { return r.success; }));
}

std::string
ProgramResult::ratio(int repeats) const
{
  if (status == "N/A") return "N/A";
  return std::to_string(successes()) + "/" + std::to_string(repeats);
}

double
ProgramResult::mean_seconds() const
{
  if (runs.empty()) return 0.0;
  double sum = 0.0;
  for (const RunReport& r : runs) sum += r.total_seconds;
  return sum / static_cast<double>(runs.size());
}

double
ProgramResult::std_seconds() const
{
  if (runs.size() < 2) return 0.0;
  double mean = mean_seconds();
  double ss = 0.0;
  for (const RunReport& r : runs) ss += (r.total_seconds - mean) * (r.total_seconds - mean);
  return std::sqrt(ss / static_cast<double>(runs.size() - 1));
}

namespace {

struct Job
{
  std::size_t program;
  int repeat;
};

RunReport
run_job(const CorpusProgram& p, const RunConfig& cfg, Provider& provider,
        VerifierBackend& backend) noexcept
{
  try
  {
    return run(p.unit, *p.locator, cfg, provider, backend);
  }
  catch (const Error& e)
  {
    RunReport r;
    r.program = p.path;
    r.checksum = p.unit->checksum();
    r.error = e.what();
    r.error_kind = e.kind();
    return r;
  }
  catch (const std::exception& e)
  {
    RunReport r;
    r.program = p.path;
    r.checksum = p.unit->checksum();
    r.error = e.what();
    return r;
  }
}

struct Plan
{
  std::vector<CorpusProgram> corpus;
  std::vector<Job> jobs;
  BatchReport report;
};

Plan
plan(const BatchSpec& spec)
{
  if (spec.repeats < 1)
  {
    throw Error(ErrorKind::ConfigError, "repeats must be at least 1");
  }
  spec.cfg.validate();
  Plan p;
  p.corpus = load_corpus(spec.corpus_root);
  p.report.repeats = spec.repeats;
  for (std::size_t i = 0; i < p.corpus.size(); ++i)
  {
    const CorpusProgram& c = p.corpus[i];
    ProgramResult r;
    r.name = c.name;
    r.path = c.path;
    if (c.unit) r.checksum = c.unit->checksum();
    if (c.unsupported)
    {
      r.status = "N/A";
      r.note = *c.unsupported;
    }
    else if (c.error)
    {
      r.status = "error";
      r.note = *c.error;
    }
    else
    {
      r.runs.resize(static_cast<std::size_t>(spec.repeats));
      for (int k = 0; k < spec.repeats; ++k) p.jobs.push_back(Job{i, k});
    }
    p.report.programs.push_back(std::move(r));
  }
  return p;
}

}  // namespace

BatchReport
run_batch(const BatchSpec& spec, Provider& provider, VerifierBackend& backend)
{
  Plan p = plan(spec);
  for (const Job& j : p.jobs)
  {
    p.report.programs[j.program].runs[static_cast<std::size_t>(j.repeat)] =
        run_job(p.corpus[j.program], spec.cfg, provider, backend);
  }
  return p.report;
}

BatchReport
run_batch_parallel(const BatchSpec& spec, Provider& provider, VerifierBackend& backend, int jobs)
{
  Plan p = plan(spec);
  const long n = static_cast<long>(p.jobs.size());
  const int threads = std::max(1, jobs);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (long k = 0; k < n; ++k)
  {
    const Job& j = p.jobs[static_cast<std::size_t>(k)];
    p.report.programs[j.program].runs[static_cast<std::size_t>(j.repeat)] =
        run_job(p.corpus[j.program], spec.cfg, provider, backend);
  }
  return p.report;
}

}  // namespace specweave
