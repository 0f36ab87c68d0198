// Copyright 2026 The Ideatree Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef IDEATREE_GENERATION_CHAT_CLIENT_HPP_
#define IDEATREE_GENERATION_CHAT_CLIENT_HPP_

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace ideatree {

struct ChatEndpointConfig {
  // Plain HTTP base URL, e.g. "http://127.0.0.1:8000".
  std::string base_url = "http://127.0.0.1:8000";
  std::string path = "/v1/chat/completions";
  std::string model = "default";
  double temperature = 0.7;
  double timeout_seconds = 120.0;
  // Extra attempts after the first, for transport errors and for responses
  // that do not parse.
  std::size_t max_retries = 2;
  // Name of the environment variable holding the bearer token; empty for
  // none.
  std::string api_key_env;
  // Directory whose <name>.txt files override the built-in templates.
  std::string template_dir;
};

ChatEndpointConfig chat_endpoint_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ChatEndpointConfig& c);

struct ChatMessage {
  std::string role;
  std::string content;
};

// One chat-completion exchange over HTTP. Stateless and safe to share
// between threads.
class ChatClient {
 public:
  explicit ChatClient(ChatEndpointConfig config);

  // Content of the first choice. Transport errors and non-2xx statuses are
  // retried; throws TransportFailure once retries run out and
  // MalformedResponse for a body that is not a chat completion.
  std::string complete(const std::vector<ChatMessage>& messages) const;

  // Calls complete() until `parse` accepts the content. Throws
  // MalformedResponse when a single allowed attempt fails to parse and
  // RetriesExhausted when several did.
  template <typename T>
  T complete_parsed(const std::vector<ChatMessage>& messages,
                    const std::function<std::optional<T>(const std::string&)>& parse) const;

  const ChatEndpointConfig& config() const noexcept { return config_; }

 private:
  [[noreturn]] void fail_parse(std::size_t attempts, const std::string& last) const;

  ChatEndpointConfig config_;
};

// Built-in prompt template for `name`, or the file <template_dir>/<name>.txt
// when it exists.
std::string load_template(const std::string& template_dir, const std::string& name);

// Replaces every {{key}} with its value. Unknown placeholders are left as
// they are.
std::string render_template(std::string text, const std::map<std::string, std::string>& values);

// Items of a bulleted ("- ", "* ") or numbered ("1.", "2)") list.
std::vector<std::string> parse_list_items(const std::string& content);

// Body of the first fenced code block, or the whole content without one.
std::string extract_code(const std::string& content);

template <typename T>
T ChatClient::complete_parsed(
    const std::vector<ChatMessage>& messages,
    const std::function<std::optional<T>(const std::string&)>& parse) const {
  std::string last;
  const std::size_t attempts = config_.max_retries + 1;
  for (std::size_t i = 0; i < attempts; ++i) {
    last = complete(messages);
    if (auto v = parse(last)) return std::move(*v);
  }
  fail_parse(attempts, last);
}

}  // namespace ideatree

#endif  // IDEATREE_GENERATION_CHAT_CLIENT_HPP_
