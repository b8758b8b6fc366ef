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

#ifndef DECAYPROBE_GATEWAY_H_
#define DECAYPROBE_GATEWAY_H_

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "decayprobe/obfuscator.h"
#include "decayprobe/types.h"

namespace decayprobe {

inline constexpr std::string_view kPromptTemplateVersion = "v1";

// Wraps variant text in the fixed instruction template for its task kind.
// Empty text is allowed: a fully truncated task is still queried.
std::string render_prompt(const ObfuscatedVariant& variant, TaskKind kind);
std::string render_prompt(std::string_view text, TaskKind kind);

// Inverse of render_prompt: the task text if `prompt` is a rendered
// template, nullopt otherwise.
std::optional<std::string> strip_prompt_template(std::string_view prompt);

struct ChatMessage {
  std::string role;
  std::string content;
};

// What a caller accepts as a well-formed reply, and what to say when a
// reply is rejected.
struct ResponseFormat {
  std::function<bool(std::string_view)> accepts;
  std::string corrective;
};

// Prefix of every corrective reprompt.
inline constexpr std::string_view kCorrectivePrefix =
    "Your previous reply was not in the required format. ";

class ChatModel {
 public:
  virtual ~ChatModel() = default;
  virtual const std::string& name() const = 0;
  // Extra attempts granted after an unparseable reply.
  virtual int max_reprompts() const = 0;
  // One round trip. Throws TransportError / AuthError.
  virtual std::string complete(std::span<const ChatMessage> messages) = 0;
};

struct ModelRef {
  std::string name;
  std::string endpoint;     // full chat-completions URL
  std::string api_key_env;  // environment variable holding the bearer token
  std::string provider_model;  // "model" field on the wire; defaults to name
  int max_reprompts = 3;
  std::chrono::milliseconds request_timeout{120'000};
  std::optional<double> temperature;
  std::optional<int> max_tokens;
};

struct RetryPolicy {
  int max_retries = 4;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{30'000};
};

// OpenAI-style chat-completion client:
//   POST {model, messages: [{role, content}]} -> choices[0].message.content
class HttpChatModel : public ChatModel {
 public:
  explicit HttpChatModel(ModelRef ref, RetryPolicy retry = {});

  const std::string& name() const override { return ref_.name; }
  int max_reprompts() const override { return ref_.max_reprompts; }
  std::string complete(std::span<const ChatMessage> messages) override;

  const ModelRef& ref() const { return ref_; }
  // HTTP requests issued, including retries.
  int requests_sent() const { return requests_.load(); }

 private:
  ModelRef ref_;
  RetryPolicy retry_;
  std::string scheme_host_port_;
  std::string path_;
  std::atomic<int> requests_{0};
};

enum class ParseStatus { kParsed, kUnparseable };
std::string_view to_string(ParseStatus status);

struct ModelResponse {
  std::string raw;
  ParseStatus parse_status = ParseStatus::kUnparseable;
  int attempts = 0;
  bool from_cache = false;
};

// On-disk response cache: <dir>/<model>/<sha256(prompt)>.json. Readers run
// concurrently; writers are serialized and publish atomically by rename.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<ModelResponse> get(std::string_view model, std::string_view prompt) const;
  void put(std::string_view model, std::string_view prompt, const ModelResponse& response);

  std::filesystem::path entry_path(std::string_view model, std::string_view prompt) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  mutable std::shared_mutex mutex_;
};

// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);

// Sends `prompt`; while `format` rejects the reply, appends the reply and a
// corrective turn and asks again, for at most 1 + max_reprompts calls.
ModelResponse query(ChatModel& model, std::string_view prompt, const ResponseFormat& format,
                    ResponseCache* cache = nullptr);

}  // namespace decayprobe

#endif  // DECAYPROBE_GATEWAY_H_
