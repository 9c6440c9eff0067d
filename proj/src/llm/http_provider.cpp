#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "specweave/error.hpp"
#include "specweave/llm.hpp"

namespace specweave {

HttpProviderOptions
HttpProviderOptions::from_environment()
{
  HttpProviderOptions options;
  if (const char* url = std::getenv("SPECWEAVE_BASE_URL"))
  {
    options.base_url = url;
  }
  else
  {
    options.base_url = "https://api.openai.com/v1";
  }
  if (const char* key = std::getenv("SPECWEAVE_API_KEY")) options.api_key = key;
  return options;
}

HttpProvider::HttpProvider(HttpProviderOptions options) : d_options(std::move(options))
{
  if (d_options.base_url.empty())
  {
    throw Error(ErrorKind::ConfigError, "http provider needs a base URL");
  }
  if (!d_options.sleep)
  {
    d_options.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

namespace {

/// Splits scheme://host[:port]/path into ("scheme://host[:port]", "/path").
std::pair<std::string, std::string>
split_url(const std::string& url)
{
  std::size_t scheme = url.find("://");
  std::size_t host = scheme == std::string::npos ? 0 : scheme + 3;
  std::size_t slash = url.find('/', host);
  if (slash == std::string::npos) return {url, ""};
  std::string path = url.substr(slash);
  while (!path.empty() && path.back() == '/') path.pop_back();
  return {url.substr(0, slash), path};
}

}  // namespace

std::string
HttpProvider::complete(const Prompt& prompt, const LlmConfig& cfg, const QueryKey&)
{
  auto [origin, base_path] = split_url(d_options.base_url);
  nlohmann::json body = {
      {"model", cfg.model},
      {"max_tokens", cfg.max_tokens},
      {"temperature", cfg.temperature},
      {"messages",
       nlohmann::json::array({{{"role", "system"}, {"content", prompt.system_message}},
                              {{"role", "user"}, {"content", prompt.user_message()}}})},
  };
  std::string payload = body.dump();

  httplib::Client client(origin);
  client.set_connection_timeout(d_options.connect_timeout);
  client.set_read_timeout(d_options.read_timeout);
  httplib::Headers headers;
  if (!d_options.api_key.empty())
  {
    headers.emplace("Authorization", "Bearer " + d_options.api_key);
  }

  std::string last_error;
  int attempts = 0;
  for (int attempt = 0; attempt <= d_options.retries; ++attempt)
  {
    if (attempt > 0)
    {
      d_options.sleep(d_options.backoff * (1 << (attempt - 1)));
    }
    ++attempts;
    d_last_attempts = attempts;
    auto res = client.Post(base_path + "/chat/completions", headers, payload, "application/json");
    if (!res)
    {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status == 429 || res->status >= 500)
    {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
    {
      throw Error(ErrorKind::ProviderUnavailable,
                  "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    }
    try
    {
      auto reply = nlohmann::json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    }
    catch (const nlohmann::json::exception& e)
    {
      throw Error(ErrorKind::ProviderUnavailable, std::string("malformed reply: ") + e.what());
    }
  }
  throw Error(ErrorKind::ProviderUnavailable,
              last_error + " after " + std::to_string(d_options.retries) + " retries");
}

}  // namespace specweave
