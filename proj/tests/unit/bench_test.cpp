#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "doubles.hpp"
#include "specweave/bench.hpp"

using namespace specweave;
namespace gen = specweave::testing;
namespace fs = std::filesystem;

namespace {

RunReport
timed(double seconds, bool success)
{
  RunReport r;
  r.total_seconds = seconds;
  r.success = success;
  return r;
}

int
cli(std::vector<std::string> args)
{
  args.insert(args.begin(), "specweave");
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

fs::path
scratch(const std::string& name)
{
  fs::path p = fs::temp_directory_path() / ("specweave-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string
slurp(const fs::path& p)
{
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

BatchSpec
corpus_spec(int repeats)
{
  BatchSpec spec;
  spec.corpus_root = gen::corpus_dir();
  spec.repeats = repeats;
  return spec;
}

}  // namespace

TEST(Stats, MeanAndSampleStd)
{
  ProgramResult p;
  p.runs = {timed(1.0, true), timed(2.0, false), timed(3.0, true), timed(4.0, false)};
  EXPECT_DOUBLE_EQ(p.mean_seconds(), 2.5);
  // Sample (n-1) deviation of 1,2,3,4.
  EXPECT_NEAR(p.std_seconds(), 1.2909944487358056, 1e-12);
  EXPECT_EQ(p.successes(), 2u);
  EXPECT_TRUE(p.success());
  EXPECT_EQ(p.ratio(4), "2/4");
  EXPECT_EQ(format_mean_std(p.mean_seconds(), p.std_seconds()), "2.50 ± 1.29");

  ProgramResult one;
  one.runs = {timed(0.5, false)};
  EXPECT_EQ(one.std_seconds(), 0.0);
  EXPECT_FALSE(one.success());
  ProgramResult na;
  na.status = "N/A";
  EXPECT_EQ(na.ratio(5), "N/A");
  EXPECT_EQ(na.mean_seconds(), 0.0);
}

TEST(Locator, SidecarAndExplicitLine)
{
  auto unit = std::make_shared<const SourceUnit>(
      SourceUnit::from_file(gen::corpus_dir() + "/abs_value.c"));
  Program p = parse_program(unit);
  EXPECT_EQ(resolve_locator(p, unit->path(), std::nullopt).line, 11u);
  EXPECT_THROW(resolve_locator(p, unit->path(), std::size_t{1}), Error);
  auto bubble = std::make_shared<const SourceUnit>(
      SourceUnit::from_file(gen::corpus_dir() + "/bubble_sort.c"));
  AssertionLocator l = resolve_locator(parse_program(bubble), bubble->path(), std::nullopt);
  EXPECT_EQ(l.line, 21u);
  EXPECT_NE(l.expression_text.find("\\forall"), std::string::npos);
}

TEST(Corpus, LoadsSortedWithUnsupportedMarked)
{
  auto corpus = load_corpus(gen::corpus_dir());
  ASSERT_GE(corpus.size(), 15u);
  for (std::size_t i = 1; i < corpus.size(); ++i) EXPECT_LT(corpus[i - 1].path, corpus[i].path);
  std::size_t unsupported = 0;
  for (const CorpusProgram& c : corpus)
  {
    EXPECT_FALSE(c.error.has_value()) << c.name << ": " << c.error.value_or("");
    if (c.unsupported)
    {
      ++unsupported;
      EXPECT_EQ(c.name, "callback_table");
    }
    else
    {
      EXPECT_TRUE(c.locator.has_value()) << c.name;
    }
  }
  EXPECT_EQ(unsupported, 1u);
  EXPECT_THROW(load_corpus("/nonexistent"), Error);
}

TEST(Batch, SerialAndParallelAgree)
{
  FixtureProvider fp = FixtureProvider::from_directory(gen::corpus_dir());
  MockOracle m = MockOracle::from_directory(gen::corpus_dir());
  BatchSpec spec = corpus_spec(2);
  BatchReport serial = run_batch(spec, fp, m);
  BatchReport parallel = run_batch_parallel(spec, fp, m, 4);
  ReportOptions quiet{false};
  EXPECT_EQ(format_batch_report(serial, ReportFormat::Json, quiet),
            format_batch_report(parallel, ReportFormat::Json, quiet));
  EXPECT_EQ(format_batch_table(serial, quiet), format_batch_table(parallel, quiet));

  std::size_t solved = 0;
  for (const ProgramResult& p : serial.programs)
  {
    if (p.name == "callback_table")
    {
      EXPECT_EQ(p.status, "N/A");
      EXPECT_TRUE(p.runs.empty());
      continue;
    }
    EXPECT_EQ(p.runs.size(), 2u);
    solved += p.success();
  }
  EXPECT_GE(solved, 10u);
}

TEST(Batch, ReportsAreStableWithoutTimings)
{
  FixtureProvider fp = FixtureProvider::from_directory(gen::corpus_dir());
  MockOracle m = MockOracle::from_directory(gen::corpus_dir());
  BatchSpec spec = corpus_spec(1);
  ReportOptions quiet{false};
  BatchReport a = run_batch(spec, fp, m);
  BatchReport b = run_batch(spec, fp, m);
  EXPECT_EQ(format_batch_report(a, ReportFormat::Csv, quiet),
            format_batch_report(b, ReportFormat::Csv, quiet));
  EXPECT_EQ(format_batch_report(a, ReportFormat::Json, quiet),
            format_batch_report(b, ReportFormat::Json, quiet));

  std::string csv = format_batch_report(a, ReportFormat::Csv, quiet);
  EXPECT_EQ(csv.rfind("program,status,success,ratio,iterations,generated\n", 0), 0u);
  EXPECT_NE(csv.find("callback_table,N/A,no,N/A,,\n"), std::string::npos);
  EXPECT_NE(csv.find("case1_add,ok,yes,1/1,2,"), std::string::npos);

  std::string table = format_batch_table(a, quiet);
  EXPECT_NE(table.find("Program"), std::string::npos);
  EXPECT_EQ(table.find("Time"), std::string::npos);
  EXPECT_NE(table.find("(N/A excluded)"), std::string::npos);

  std::string timed_table = format_batch_table(a);
  EXPECT_NE(timed_table.find("Time (s)"), std::string::npos);
  EXPECT_NE(timed_table.find(" ± "), std::string::npos);

  auto j = nlohmann::json::parse(format_batch_report(a, ReportFormat::Json));
  EXPECT_EQ(j["repeats"], 1);
  EXPECT_TRUE(j["programs"][0].contains("time"));
}

TEST(Batch, RejectsBadRepeats)
{
  FixtureProvider fp({});
  MockOracle m(RuleTable{});
  EXPECT_THROW(run_batch(corpus_spec(0), fp, m), Error);
}

TEST(RunReport, JsonAndCsvShapes)
{
  auto unit = std::make_shared<const SourceUnit>(
      SourceUnit::from_file(gen::corpus_dir() + "/bubble_sort.c"));
  FixtureProvider fp = FixtureProvider::from_directory(gen::corpus_dir());
  MockOracle m = MockOracle::from_directory(gen::corpus_dir());
  RunReport r = run(unit, AssertionLocator{21, ""}, RunConfig{}, fp, m);

  auto j = nlohmann::json::parse(format_run_report(r, ReportFormat::Json));
  EXPECT_EQ(j["success"], true);
  EXPECT_EQ(j["iterations"][0]["nodes"].size(), 5u);
  EXPECT_TRUE(j.contains("times"));
  EXPECT_FALSE(nlohmann::json::parse(format_run_report(r, ReportFormat::Json, {false}))
                   .contains("times"));
  std::string csv = format_run_report(r, ReportFormat::Csv, {false});
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 6);
  EXPECT_EQ(format_for_path("x.csv"), ReportFormat::Csv);
  EXPECT_EQ(format_for_path("x.json"), ReportFormat::Json);
  EXPECT_THROW(write_file("/nonexistent/dir/x.json", "{}"), Error);
}

TEST(Cli, ExitCodes)
{
  fs::path dir = scratch("cli");
  std::string corpus = gen::corpus_dir();
  EXPECT_EQ(cli({"--help"}), 0);
  EXPECT_EQ(cli({}), 2);
  EXPECT_EQ(cli({"run", "--bogus"}), 2);
  EXPECT_EQ(cli({"run", "--input", corpus + "/bubble_sort.c", "--fixtures", corpus, "--out",
                 (dir / "out.c").string(), "--report", (dir / "r.json").string()}),
            0);
  EXPECT_NE(slurp(dir / "out.c").find("/*@"), std::string::npos);
  EXPECT_TRUE(nlohmann::json::parse(slurp(dir / "r.json"))["success"].get<bool>());

  EXPECT_EQ(cli({"run", "--input", corpus + "/case2_pow.c", "--fixtures", corpus, "--out",
                 (dir / "o2.c").string()}),
            1);
  EXPECT_EQ(cli({"run", "--input", corpus + "/callback_table.c", "--fixtures", corpus}), 2);
  EXPECT_EQ(cli({"run", "--input", corpus + "/missing.c", "--fixtures", corpus}), 2);
  EXPECT_EQ(cli({"run", "--input", corpus + "/bubble_sort.c", "--fixtures", corpus,
                 "--assert-line", "3"}),
            2);
  EXPECT_EQ(cli({"run", "--input", corpus + "/bubble_sort.c", "--fixtures", corpus, "--verifier",
                 "framac", "--frama-c", "definitely-not-frama-c"}),
            2);
  EXPECT_EQ(cli({"run", "--input", corpus + "/bubble_sort.c", "--fixtures",
                 (dir / "empty").string()}),
            2);

  // Rules exist but responses do not: the run stops with a missing fixture.
  fs::create_directories(dir / "norsp");
  fs::copy_file(corpus + "/bubble_sort.rules.json", dir / "norsp" / "bubble_sort.rules.json");
  EXPECT_EQ(cli({"run", "--input", corpus + "/bubble_sort.c", "--fixtures",
                 (dir / "norsp").string(), "--out", (dir / "o3.c").string()}),
            1);

  EXPECT_EQ(cli({"graph", "--input", corpus + "/bubble_sort.c", "--out",
                 (dir / "g.dot").string()}),
            0);
  EXPECT_NE(slurp(dir / "g.dot").find("digraph"), std::string::npos);
  EXPECT_EQ(cli({"checksum", corpus + "/bubble_sort.c"}), 0);
  fs::remove_all(dir);
}

TEST(Cli, BenchWritesReport)
{
  fs::path dir = scratch("bench");
  std::string corpus = gen::corpus_dir();
  EXPECT_EQ(cli({"bench", "--corpus", corpus, "--fixtures", corpus, "--repeats", "1", "--jobs",
                 "2", "--no-timings", "--report", (dir / "b.csv").string()}),
            0);
  std::string csv = slurp(dir / "b.csv");
  EXPECT_EQ(csv.rfind("program,status", 0), 0u);
  EXPECT_EQ(csv.find("time_mean"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, FlagsBeatConfigFile)
{
  fs::path dir = scratch("config");
  std::string corpus = gen::corpus_dir();
  std::ofstream(dir / "cfg.json") << "{\"max_iterations\": 1, \"fixtures\": \"" << corpus
                                  << "\"}";
  std::string cfg = (dir / "cfg.json").string();
  std::string input = corpus + "/case1_add.c";
  std::string out = (dir / "o.c").string();
  // case1 needs a second iteration.
  EXPECT_EQ(cli({"run", "--config", cfg, "--input", input, "--out", out}), 1);
  EXPECT_EQ(cli({"run", "--config", cfg, "--input", input, "--out", out, "--max-iterations", "2"}),
            0);

  std::ofstream(dir / "bad.json") << "{\"max_iterations\": \"many\"}";
  EXPECT_EQ(cli({"run", "--config", (dir / "bad.json").string(), "--input", input}), 2);
  EXPECT_EQ(cli({"run", "--config", (dir / "none.json").string(), "--input", input}), 2);
  fs::remove_all(dir);
}

namespace {

/** Counts chat-completion requests and answers with no clauses. */
class CountingEndpoint
{
public:
  CountingEndpoint()
  {
    d_server.Post("/v1/chat/completions", [this](const httplib::Request&, httplib::Response& res) {
      ++d_hits;
      nlohmann::json reply = {{"choices", {{{"message", {{"content", "Nothing to add."}}}}}}};
      res.set_content(reply.dump(), "application/json");
    });
    d_port = d_server.bind_to_any_port("127.0.0.1");
    d_thread = std::thread([this] { d_server.listen_after_bind(); });
    d_server.wait_until_ready();
  }
  ~CountingEndpoint()
  {
    d_server.stop();
    d_thread.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(d_port) + "/v1"; }
  std::size_t hits() const { return d_hits; }

private:
  httplib::Server d_server;
  std::thread d_thread;
  int d_port = 0;
  std::atomic<std::size_t> d_hits{0};
};

}  // namespace

TEST(Cli, EnvironmentBeatsConfigAndFlagsBeatEnvironment)
{
  fs::path dir = scratch("env");
  std::string corpus = gen::corpus_dir();
  CountingEndpoint live;
  std::string dead = "http://127.0.0.1:1/v1";
  std::ofstream(dir / "cfg.json") << "{\"provider\": \"http\", \"base_url\": \"" << dead
                                  << "\", \"rules\": \"" << corpus
                                  << "\", \"max_iterations\": 1}";
  std::string cfg = (dir / "cfg.json").string();
  std::string input = corpus + "/case2_pow.c";
  std::string out = (dir / "o.c").string();

  setenv("SPECWEAVE_BASE_URL", live.url().c_str(), 1);
  EXPECT_EQ(cli({"run", "--config", cfg, "--input", input, "--out", out}), 1);
  EXPECT_EQ(live.hits(), 2u) << "env URL replaced the config URL";

  setenv("SPECWEAVE_BASE_URL", dead.c_str(), 1);
  EXPECT_EQ(cli({"run", "--config", cfg, "--input", input, "--out", out, "--base-url",
                 live.url()}),
            1);
  EXPECT_EQ(live.hits(), 4u) << "flag URL replaced the env URL";
  unsetenv("SPECWEAVE_BASE_URL");
  fs::remove_all(dir);
}
