// Copyright 2026 The decayprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "decayprobe/gateway.h"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "decayprobe/errors.h"
#include "httplib.h"
#include "nlohmann/json.hpp"

namespace decayprobe {
namespace {

using nlohmann::json;

constexpr std::string_view kCodeHeader =
    "Write Python code to solve the following problem:\n"
    "(Reply with one fenced ```python code block. The first top-level function in the "
    "block is the entry point: it is called with the test-case arguments and must "
    "return the result.)\n\n";

constexpr std::string_view kMathHeader =
    "Solve the following math problem. Show your reasoning, then give the final answer "
    "on a separate line beginning with \"ANSWER:\".\n\n";

std::string sanitize_component(std::string_view name) {
  std::string out;
  for (char c : name) {
    const bool keep = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                      c == '.' || c == '_' || c == '-';
    out.push_back(keep ? c : '_');
  }
  // Distinct names must never share a directory after sanitizing.
  return out + "-" + sha256_hex(name).substr(0, 8);
}

bool is_loopback(std::string_view host) {
  return host == "localhost" || host == "127.0.0.1" || host == "::1" || host == "[::1]";
}

struct ParsedUrl {
  std::string scheme_host_port;
  std::string host;
  std::string path;
};

ParsedUrl parse_url(std::string_view url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw std::invalid_argument("endpoint must be an absolute http(s) URL: " + std::string(url));
  }
  const std::string_view scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw std::invalid_argument("unsupported endpoint scheme: " + std::string(scheme));
  }
  const std::size_t authority_begin = scheme_end + 3;
  const std::size_t path_begin = url.find('/', authority_begin);
  const std::string_view authority =
      url.substr(authority_begin, path_begin == std::string_view::npos ? std::string_view::npos
                                                                       : path_begin - authority_begin);
  ParsedUrl parsed;
  parsed.scheme_host_port = std::string(url.substr(0, authority_begin)) + std::string(authority);
  parsed.path = path_begin == std::string_view::npos ? "/" : std::string(url.substr(path_begin));
  std::string_view host = authority;
  if (!host.empty() && host.front() == '[') {
    host = host.substr(0, host.find(']') + 1);
  } else if (const auto colon = host.find(':'); colon != std::string_view::npos) {
    host = host.substr(0, colon);
  }
  parsed.host = std::string(host);
  return parsed;
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string render_prompt(std::string_view text, TaskKind kind) {
  std::string out(kind == TaskKind::kCode ? kCodeHeader : kMathHeader);
  out.append(text);
  return out;
}

std::string render_prompt(const ObfuscatedVariant& variant, TaskKind kind) {
  return render_prompt(variant.text, kind);
}

std::optional<std::string> strip_prompt_template(std::string_view prompt) {
  for (std::string_view header : {kCodeHeader, kMathHeader}) {
    if (prompt.starts_with(header)) return std::string(prompt.substr(header.size()));
  }
  return std::nullopt;
}

std::string_view to_string(ParseStatus status) {
  return status == ParseStatus::kParsed ? "parsed" : "unparseable";
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

// ---- HttpChatModel ----

HttpChatModel::HttpChatModel(ModelRef ref, RetryPolicy retry)
    : ref_(std::move(ref)), retry_(retry) {
  if (ref_.max_reprompts < 0) throw std::invalid_argument("max_reprompts must be >= 0");
  if (ref_.provider_model.empty()) ref_.provider_model = ref_.name;
  const ParsedUrl url = parse_url(ref_.endpoint);
  scheme_host_port_ = url.scheme_host_port;
  path_ = url.path;
}

std::string HttpChatModel::complete(std::span<const ChatMessage> messages) {
  std::string api_key;
  if (!ref_.api_key_env.empty()) {
    if (const char* value = std::getenv(ref_.api_key_env.c_str()); value && *value) {
      api_key = value;
    }
  }
  if (api_key.empty() && !is_loopback(parse_url(ref_.endpoint).host)) {
    throw AuthError("no credential: environment variable " +
                    (ref_.api_key_env.empty() ? std::string("(unset)") : ref_.api_key_env) +
                    " is empty for remote endpoint " + ref_.endpoint);
  }

  json body;
  body["model"] = ref_.provider_model;
  body["messages"] = json::array();
  for (const ChatMessage& m : messages) {
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }
  if (ref_.temperature) body["temperature"] = *ref_.temperature;
  if (ref_.max_tokens) body["max_tokens"] = *ref_.max_tokens;
  const std::string payload = body.dump();

  httplib::Headers headers;
  if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);

  const auto timeout = std::chrono::duration_cast<std::chrono::seconds>(ref_.request_timeout);
  const auto timeout_usec = std::chrono::duration_cast<std::chrono::microseconds>(
                                ref_.request_timeout - timeout)
                                .count();

  std::string last_error;
  for (int attempt = 0; attempt <= retry_.max_retries; ++attempt) {
    if (attempt > 0) {
      auto delay = retry_.base_delay * (1LL << std::min(attempt - 1, 20));
      std::this_thread::sleep_for(std::min<std::chrono::milliseconds>(delay, retry_.max_delay));
    }
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(timeout.count(), timeout_usec);
    client.set_read_timeout(timeout.count(), timeout_usec);
    client.set_write_timeout(timeout.count(), timeout_usec);
    ++requests_;
    auto res = client.Post(path_, headers, payload, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw AuthError("endpoint rejected credentials (HTTP " + std::to_string(res->status) + ")");
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw TransportError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    }
    const json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") || !reply["choices"].is_array() ||
        reply["choices"].empty()) {
      last_error = "malformed chat-completion body";
      continue;
    }
    const json& message = reply["choices"][0].value("message", json::object());
    const auto content = message.find("content");
    if (content == message.end() || !content->is_string()) return {};
    return content->get<std::string>();
  }
  throw TransportError("giving up after " + std::to_string(retry_.max_retries + 1) +
                       " attempts: " + last_error);
}

// ---- ResponseCache ----

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path ResponseCache::entry_path(std::string_view model,
                                                std::string_view prompt) const {
  return dir_ / sanitize_component(model) / (sha256_hex(prompt) + ".json");
}

std::optional<ModelResponse> ResponseCache::get(std::string_view model,
                                                std::string_view prompt) const {
  const auto path = entry_path(model, prompt);
  std::shared_lock lock(mutex_);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  const json doc = json::parse(read_all(path), nullptr, false);
  if (doc.is_discarded() || doc.value("model", "") != model) return std::nullopt;
  ModelResponse response;
  response.raw = doc.value("raw", "");
  response.parse_status =
      doc.value("parse_status", "") == "parsed" ? ParseStatus::kParsed : ParseStatus::kUnparseable;
  response.attempts = doc.value("attempts", 1);
  response.from_cache = true;
  return response;
}

void ResponseCache::put(std::string_view model, std::string_view prompt,
                        const ModelResponse& response) {
  const auto path = entry_path(model, prompt);
  json doc;
  doc["model"] = model;
  doc["prompt_sha256"] = sha256_hex(prompt);
  doc["template_version"] = kPromptTemplateVersion;
  doc["raw"] = response.raw;
  doc["parse_status"] = to_string(response.parse_status);
  doc["attempts"] = response.attempts;

  std::unique_lock lock(mutex_);
  std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write cache entry " + tmp.string());
    out << doc.dump(1) << '\n';
  }
  std::filesystem::rename(tmp, path);
}

// ---- query ----

ModelResponse query(ChatModel& model, std::string_view prompt, const ResponseFormat& format,
                    ResponseCache* cache) {
  if (cache) {
    if (auto hit = cache->get(model.name(), prompt)) return *hit;
  }
  std::vector<ChatMessage> messages{{"user", std::string(prompt)}};
  ModelResponse response;
  const int max_attempts = 1 + std::max(0, model.max_reprompts());
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    response.raw = model.complete(messages);
    response.attempts = attempt;
    if (format.accepts && format.accepts(response.raw)) {
      response.parse_status = ParseStatus::kParsed;
      break;
    }
    response.parse_status = ParseStatus::kUnparseable;
    messages.push_back({"assistant", response.raw});
    messages.push_back({"user", std::string(kCorrectivePrefix) + format.corrective});
  }
  if (cache) cache->put(model.name(), prompt, response);
  return response;
}

}  // namespace decayprobe
