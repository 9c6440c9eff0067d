#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "specweave/bench.hpp"

namespace specweave {

namespace {

struct Settings
{
  std::string provider = "fixture";
  std::string fixtures;
  std::string rules;
  std::string model = LlmConfig{}.model;
  int max_tokens = LlmConfig{}.max_tokens;
  double temperature = LlmConfig{}.temperature;
  int shots = LlmConfig{}.shots;
  std::string verifier = "mock";
  int wp_timeout = FramaCOptions{}.wp_timeout;
  double check_timeout = 30.0;
  std::string prover = FramaCOptions{}.prover;
  std::string frama_c = FramaCOptions{}.executable;
  int max_iterations = 5;
  bool simplify = true;
  std::string base_url;
  std::string api_key;
  int jobs = 1;
  int repeats = 5;
  bool timings = true;
};

void
apply_config_file(Settings& s, const std::string& path)
{
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot open config '" + path + "'");
  nlohmann::json j;
  try
  {
    j = nlohmann::json::parse(in);
    auto take = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    take("provider", s.provider);
    take("fixtures", s.fixtures);
    take("rules", s.rules);
    take("model", s.model);
    take("max_tokens", s.max_tokens);
    take("temperature", s.temperature);
    take("shots", s.shots);
    take("verifier", s.verifier);
    take("wp_timeout", s.wp_timeout);
    take("check_timeout", s.check_timeout);
    take("prover", s.prover);
    take("frama_c", s.frama_c);
    take("max_iterations", s.max_iterations);
    take("simplify", s.simplify);
    take("base_url", s.base_url);
    take("api_key", s.api_key);
    take("jobs", s.jobs);
    take("repeats", s.repeats);
  }
  catch (const nlohmann::json::exception& e)
  {
    throw Error(ErrorKind::ConfigError, path + ": " + e.what());
  }
}

void
apply_environment(Settings& s)
{
  if (const char* v = std::getenv("SPECWEAVE_BASE_URL")) s.base_url = v;
  if (const char* v = std::getenv("SPECWEAVE_API_KEY")) s.api_key = v;
}

/** Flag values, applied only when given on the command line. */
struct Flags
{
  CLI::App* app = nullptr;
  Settings values;
  std::string config;

  void add(CLI::App* sub)
  {
    app = sub;
    sub->add_option("--config", config, "JSON settings file (flags and env take precedence)");
    sub->add_option("--provider", values.provider, "fixture or http")
        ->check(CLI::IsMember({"fixture", "http"}));
    sub->add_option("--fixtures", values.fixtures, "directory of *.responses.json");
    sub->add_option("--rules", values.rules, "directory of *.rules.json (default: --fixtures)");
    sub->add_option("--model", values.model, "model name")->capture_default_str();
    sub->add_option("--max-tokens", values.max_tokens)->capture_default_str();
    sub->add_option("--temperature", values.temperature)->capture_default_str();
    sub->add_option("--shots", values.shots, "few-shot examples per prompt")
        ->capture_default_str();
    sub->add_option("--verifier", values.verifier, "mock or framac")
        ->check(CLI::IsMember({"mock", "framac"}));
    sub->add_option("--wp-timeout", values.wp_timeout, "prover timeout per goal (s)")
        ->capture_default_str();
    sub->add_option("--check-timeout", values.check_timeout, "wall limit per verifier call (s)")
        ->capture_default_str();
    sub->add_option("--prover", values.prover)->capture_default_str();
    sub->add_option("--frama-c", values.frama_c, "frama-c executable")->capture_default_str();
    sub->add_option("--max-iterations", values.max_iterations)->capture_default_str();
    sub->add_flag("--no-simplify", "keep redundant clauses");
    sub->add_option("--base-url", values.base_url, "chat-completions base URL");
    sub->add_flag("--no-timings", "omit wall times so reports are reproducible");
  }

  void apply(Settings& s) const
  {
    auto given = [&](const char* name) { return app->get_option_no_throw(name) != nullptr
                                                && app->count(name) > 0; };
    if (given("--provider")) s.provider = values.provider;
    if (given("--fixtures")) s.fixtures = values.fixtures;
    if (given("--rules")) s.rules = values.rules;
    if (given("--model")) s.model = values.model;
    if (given("--max-tokens")) s.max_tokens = values.max_tokens;
    if (given("--temperature")) s.temperature = values.temperature;
    if (given("--shots")) s.shots = values.shots;
    if (given("--verifier")) s.verifier = values.verifier;
    if (given("--wp-timeout")) s.wp_timeout = values.wp_timeout;
    if (given("--check-timeout")) s.check_timeout = values.check_timeout;
    if (given("--prover")) s.prover = values.prover;
    if (given("--frama-c")) s.frama_c = values.frama_c;
    if (given("--max-iterations")) s.max_iterations = values.max_iterations;
    if (given("--no-simplify")) s.simplify = false;
    if (given("--base-url")) s.base_url = values.base_url;
    if (given("--no-timings")) s.timings = false;
    if (given("--jobs")) s.jobs = values.jobs;
    if (given("--repeats")) s.repeats = values.repeats;
  }

  Settings resolve() const
  {
    Settings s;
    if (!config.empty()) apply_config_file(s, config);
    apply_environment(s);
    apply(s);
    return s;
  }
};

RunConfig
run_config(const Settings& s)
{
  RunConfig cfg;
  cfg.max_iterations = s.max_iterations;
  cfg.llm.provider = s.provider;
  cfg.llm.model = s.model;
  cfg.llm.max_tokens = s.max_tokens;
  cfg.llm.temperature = s.temperature;
  cfg.llm.shots = s.shots;
  cfg.verifier = s.verifier;
  cfg.verifier_timeout = std::chrono::duration<double>(s.check_timeout);
  cfg.simplify = s.simplify;
  cfg.validate();
  return cfg;
}

std::unique_ptr<Provider>
make_provider(const Settings& s)
{
  if (s.provider == "http")
  {
    HttpProviderOptions o = HttpProviderOptions::from_environment();
    if (!s.base_url.empty()) o.base_url = s.base_url;
    if (!s.api_key.empty()) o.api_key = s.api_key;
    return std::make_unique<HttpProvider>(o);
  }
  if (s.fixtures.empty())
  {
    throw Error(ErrorKind::ConfigError, "the fixture provider needs --fixtures DIR");
  }
  return std::make_unique<FixtureProvider>(FixtureProvider::from_directory(s.fixtures));
}

std::unique_ptr<VerifierBackend>
make_backend(const Settings& s)
{
  if (s.verifier == "framac")
  {
    FramaCOptions o;
    o.executable = s.frama_c;
    o.prover = s.prover;
    o.wp_timeout = s.wp_timeout;
    if (find_executable(o.executable).empty())
    {
      throw Error(ErrorKind::BackendUnavailable, "'" + o.executable + "' not found on PATH");
    }
    return std::make_unique<FramaCBackend>(o);
  }
  std::string dir = s.rules.empty() ? s.fixtures : s.rules;
  if (dir.empty())
  {
    throw Error(ErrorKind::ConfigError, "the mock verifier needs --rules DIR or --fixtures DIR");
  }
  return std::make_unique<MockOracle>(MockOracle::from_directory(dir));
}

bool
usage_kind(ErrorKind k)
{
  switch (k)
  {
    case ErrorKind::SyntaxError:
    case ErrorKind::UnsupportedConstruct:
    case ErrorKind::AssertionNotFound:
    case ErrorKind::NotInFunction:
    case ErrorKind::ConfigError:
    case ErrorKind::UnknownFixture:
    case ErrorKind::BackendUnavailable:
    case ErrorKind::IoError: return true;
    default: return false;
  }
}

}  // namespace

int
cli_main(int argc, char** argv)
{
  CLI::App app{"Specification synthesis for C programs driven by a language model and a verifier"};
  app.require_subcommand(1);

  std::string input;
  std::size_t assert_line = 0;
  std::string out_path;
  std::string report_path;

  CLI::App* run_cmd = app.add_subcommand("run", "annotate one program");
  Flags run_flags;
  run_flags.add(run_cmd);
  run_cmd->add_option("--input", input, "C source")->required();
  run_cmd->add_option("--assert-line", assert_line, "line of the target assertion");
  run_cmd->add_option("--out", out_path, "annotated output (default: stdout)");
  run_cmd->add_option("--report", report_path, "run report, .json or .csv");

  std::string corpus;
  CLI::App* bench_cmd = app.add_subcommand("bench", "run a corpus and tabulate");
  Flags bench_flags;
  bench_flags.add(bench_cmd);
  bench_cmd->add_option("--corpus", corpus, "directory of *.c programs")->required();
  bench_cmd->add_option("--repeats", bench_flags.values.repeats)->capture_default_str();
  bench_cmd->add_option("--jobs", bench_flags.values.jobs, "parallel runs")->capture_default_str();
  bench_cmd->add_option("--report", report_path, "batch report, .json or .csv");

  CLI::App* graph_cmd = app.add_subcommand("graph", "print the extended call graph as DOT");
  graph_cmd->add_option("--input", input, "C source")->required();
  graph_cmd->add_option("--assert-line", assert_line, "line of the target assertion");
  graph_cmd->add_option("--out", out_path, "DOT output (default: stdout)");

  std::vector<std::string> inputs;
  CLI::App* sum_cmd = app.add_subcommand("checksum", "print the content checksum used by fixtures");
  sum_cmd->add_option("inputs", inputs, "C sources")->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError& e)
  {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try
  {
    std::optional<std::size_t> line;
    if (assert_line > 0) line = assert_line;

    if (*sum_cmd)
    {
      for (const std::string& p : inputs)
      {
        std::cout << SourceUnit::from_file(p).checksum() << "  " << p << "\n";
      }
      return 0;
    }

    if (*graph_cmd)
    {
      auto unit = std::make_shared<const SourceUnit>(SourceUnit::from_file(input));
      Program program = parse_program(unit);
      AssertionLocator loc = resolve_locator(program, input, line);
      ExtGraph g = build_extended_call_graph(program, locate_assertion(program, loc));
      if (out_path.empty())
        std::cout << g.to_dot();
      else
        write_file(out_path, g.to_dot());
      return 0;
    }

    if (*run_cmd)
    {
      Settings s = run_flags.resolve();
      RunConfig cfg = run_config(s);
      auto unit = std::make_shared<const SourceUnit>(SourceUnit::from_file(input));
      Program program = parse_program(unit);
      AssertionLocator loc = resolve_locator(program, input, line);
      auto provider = make_provider(s);
      auto backend = make_backend(s);
      RunReport r = run(unit, loc, cfg, *provider, *backend);

      if (out_path.empty())
        std::cout << r.final_text;
      else
        write_file(out_path, r.final_text);
      if (!report_path.empty())
      {
        emit_report(r, format_for_path(report_path), report_path, ReportOptions{s.timings});
      }
      std::cerr << (r.success ? "verified" : "not verified") << " after " << r.iterations_used
                << " iteration(s); " << r.retained << " clause(s) retained, " << r.queries
                << " queries, " << r.verifier_calls << " verifier calls\n";
      if (r.error)
      {
        std::cerr << "error: " << *r.error << "\n";
        return r.error_kind && usage_kind(*r.error_kind) ? 2 : 1;
      }
      return r.success ? 0 : 1;
    }

    if (*bench_cmd)
    {
      Settings s = bench_flags.resolve();
      BatchSpec spec;
      spec.corpus_root = corpus;
      spec.repeats = s.repeats;
      spec.cfg = run_config(s);
      auto provider = make_provider(s);
      auto backend = make_backend(s);
      BatchReport r = s.jobs > 1 ? run_batch_parallel(spec, *provider, *backend, s.jobs)
                                 : run_batch(spec, *provider, *backend);
      ReportOptions options{s.timings};
      std::cout << format_batch_table(r, options);
      if (!report_path.empty())
      {
        emit_report(r, format_for_path(report_path), report_path, options);
      }
      return 0;
    }
  }
  catch (const Error& e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return usage_kind(e.kind()) ? 2 : 1;
  }
  catch (const std::exception& e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace specweave
