#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "specweave/error.hpp"
#include "specweave/llm.hpp"

namespace specweave {

namespace fs = std::filesystem;

FixtureProvider::FixtureProvider(std::vector<Record> records)
{
  for (Record& r : records)
  {
    auto key = std::make_tuple(r.checksum, r.node, r.iteration);
    if (!d_records.emplace(key, std::move(r.response_text)).second)
    {
      throw Error(ErrorKind::ConfigError, "duplicate fixture record for " + std::get<0>(key)
                                              + "/" + std::get<1>(key) + "/"
                                              + std::to_string(std::get<2>(key)));
    }
  }
}

FixtureProvider
FixtureProvider::from_directory(const std::string& dir)
{
  if (!fs::is_directory(dir))
  {
    throw Error(ErrorKind::ConfigError, "fixture directory '" + dir + "' does not exist");
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
  {
    std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && name.size() > 15
        && name.compare(name.size() - 15, 15, ".responses.json") == 0)
    {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<Record> records;
  for (const fs::path& file : files)
  {
    std::ifstream in(file);
    nlohmann::json doc;
    try
    {
      doc = nlohmann::json::parse(in);
    }
    catch (const nlohmann::json::exception& e)
    {
      throw Error(ErrorKind::ConfigError, file.string() + ": " + e.what());
    }
    const nlohmann::json& list = doc.is_object() && doc.contains("responses") ? doc["responses"]
                                                                              : doc;
    auto add = [&](const nlohmann::json& r) {
      try
      {
        records.push_back(Record{r.at("checksum").get<std::string>(),
                                 r.at("node").get<std::string>(), r.at("iteration").get<int>(),
                                 r.at("response_text").get<std::string>()});
      }
      catch (const nlohmann::json::exception& e)
      {
        throw Error(ErrorKind::ConfigError, file.string() + ": " + e.what());
      }
    };
    if (list.is_array())
    {
      for (const auto& r : list) add(r);
    }
    else
    {
      add(list);
    }
  }
  return FixtureProvider(std::move(records));
}

std::string
FixtureProvider::complete(const Prompt&, const LlmConfig&, const QueryKey& key)
{
  auto it = d_records.find(std::make_tuple(key.checksum, key.node, key.iteration));
  if (it == d_records.end())
  {
    it = d_records.find(std::make_tuple(key.checksum, key.node, 0));
  }
  if (it == d_records.end())
  {
    throw Error(ErrorKind::FixtureMissing, "no fixture for (" + key.checksum + ", " + key.node
                                               + ", " + std::to_string(key.iteration) + ")");
  }
  return it->second;
}

BudgetedProvider::BudgetedProvider(Provider& inner, std::size_t max_requests,
                                   std::size_t max_response_chars)
    : d_inner(inner), d_max_requests(max_requests), d_max_chars(max_response_chars)
{
}

std::string
BudgetedProvider::complete(const Prompt& prompt, const LlmConfig& cfg, const QueryKey& key)
{
  if (d_requests >= d_max_requests)
  {
    throw Error(ErrorKind::BudgetExceeded,
                "request cap of " + std::to_string(d_max_requests) + " reached");
  }
  ++d_requests;
  std::string text = d_inner.complete(prompt, cfg, key);
  d_chars += text.size();
  if (d_max_chars != 0 && d_chars > d_max_chars)
  {
    throw Error(ErrorKind::BudgetExceeded,
                "response budget of " + std::to_string(d_max_chars) + " characters exceeded");
  }
  return text;
}

CandidateSet
parse_candidates(const std::string& owner, NodeKind owner_kind, const std::string& raw,
                 ClauseOrigin origin)
{
  CandidateSet out;
  out.owner = owner;
  out.raw_response = raw;
  ClauseParse parsed = parse_clauses_detailed(raw);
  out.diagnostics = std::move(parsed.diagnostics);
  for (SpecClause& c : parsed.clauses)
  {
    if (!kind_allowed(c.kind, owner_kind))
    {
      out.diagnostics.push_back("dropped '" + c.text() + "': not allowed on "
                                + std::string(to_string(owner_kind)) + " '" + owner + "'");
      continue;
    }
    bool dup = std::any_of(out.clauses.begin(), out.clauses.end(),
                           [&](const SpecClause& k) { return same_clause(k, c); });
    if (dup)
    {
      out.diagnostics.push_back("dropped duplicate '" + c.text() + "'");
      continue;
    }
    c.origin = origin;
    c.status = SpecStatus::Candidate;
    out.clauses.push_back(std::move(c));
  }
  return out;
}

}  // namespace specweave
