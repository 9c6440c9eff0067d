#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "specweave/annotated_program.hpp"
#include "specweave/callgraph.hpp"
#include "specweave/spec.hpp"

namespace specweave {

inline constexpr std::string_view k_infill_marker = ">>> INFILL <<<";

struct LlmConfig
{
  std::string provider = "fixture";
  std::string model = "gpt-3.5-turbo-0613";
  int max_tokens = 2048;
  double temperature = 0.7;
  int shots = 3;

  /// Throws Error{ConfigError} when a field is out of range.
  void validate() const;
};

struct FewShotExample
{
  std::string input_code;
  std::string expected_specs;
};

/** Built-in examples in fixed library order; the first is the array-zeroing loop. */
const std::vector<FewShotExample>& default_shot_library();

struct Prompt
{
  std::string system_message;
  std::vector<FewShotExample> few_shot;
  std::string masked_code;
  std::string output_indicator;

  /// The user turn: examples, masked code, output indicator.
  std::string user_message() const;
};

/**
 * Prompt for one node. Every callee of target must be in `settled` (its
 * block for this iteration is final), otherwise Error{MissingCalleeSpecs}.
 * The masked code keeps the target's function, the functions reachable from
 * target, and all non-function top-level declarations.
 */
Prompt build_prompt(const AnnotatedProgram& prog, const ExtGraph& g, const std::string& target,
                    const LlmConfig& cfg, const std::vector<FewShotExample>& shot_library,
                    const std::set<std::string>& settled);

struct QueryKey
{
  std::string checksum;
  std::string node;
  int iteration = 0;
};

class Provider
{
public:
  virtual ~Provider() = default;
  virtual std::string id() const = 0;
  /// Completion text for the prompt. Implementations are safe to call
  /// concurrently from independent runs.
  virtual std::string complete(const Prompt& prompt, const LlmConfig& cfg,
                               const QueryKey& key) = 0;
};

/**
 * Canned responses keyed by (checksum, node, iteration). A record with
 * iteration 0 answers every iteration that has no record of its own.
 */
class FixtureProvider : public Provider
{
public:
  struct Record
  {
    std::string checksum;
    std::string node;
    int iteration = 0;
    std::string response_text;
  };

  explicit FixtureProvider(std::vector<Record> records);
  /// Loads every `*.responses.json` file under dir.
  static FixtureProvider from_directory(const std::string& dir);

  std::string id() const override { return "fixture"; }
  std::string complete(const Prompt& prompt, const LlmConfig& cfg, const QueryKey& key) override;

  std::size_t size() const { return d_records.size(); }

private:
  std::map<std::tuple<std::string, std::string, int>, std::string> d_records;
};

struct HttpProviderOptions
{
  /// e.g. https://api.openai.com/v1 ; requests go to <base>/chat/completions.
  std::string base_url;
  std::string api_key;
  int retries = 3;
  std::chrono::milliseconds backoff{500};
  std::chrono::seconds connect_timeout{10};
  std::chrono::seconds read_timeout{120};
  /// Injected for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::milliseconds)> sleep;

  /// Base URL and key from SPECWEAVE_BASE_URL / SPECWEAVE_API_KEY.
  static HttpProviderOptions from_environment();
};

/** OpenAI-style chat-completion endpoint. */
class HttpProvider : public Provider
{
public:
  explicit HttpProvider(HttpProviderOptions options);

  std::string id() const override { return "http"; }
  std::string complete(const Prompt& prompt, const LlmConfig& cfg, const QueryKey& key) override;

  /// Attempts made by the last complete() call.
  int last_attempts() const { return d_last_attempts; }

private:
  HttpProviderOptions d_options;
  std::atomic<int> d_last_attempts{0};
};

/** Counts requests and caps them; Error{BudgetExceeded} past the cap. */
class BudgetedProvider : public Provider
{
public:
  BudgetedProvider(Provider& inner, std::size_t max_requests, std::size_t max_response_chars = 0);

  std::string id() const override { return d_inner.id(); }
  std::string complete(const Prompt& prompt, const LlmConfig& cfg, const QueryKey& key) override;

  std::size_t requests() const { return d_requests; }

private:
  Provider& d_inner;
  std::size_t d_max_requests;
  std::size_t d_max_chars;
  std::size_t d_requests = 0;
  std::size_t d_chars = 0;
};

struct CandidateSet
{
  std::string owner;
  std::vector<SpecClause> clauses;
  std::string raw_response;
  double latency = 0.0;
  std::vector<std::string> diagnostics;
};

/**
 * Parses a response for one owner: clauses whose kind does not fit the owner
 * are dropped with a diagnostic, normalized duplicates collapse.
 */
CandidateSet parse_candidates(const std::string& owner, NodeKind owner_kind,
                              const std::string& raw, ClauseOrigin origin = {});

}  // namespace specweave
