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


#include "ideatree/generation/chat_client.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "httplib.h"
#include "ideatree/core/error.hpp"

namespace ideatree {

namespace {

using nlohmann::json;

const std::map<std::string, std::string>& builtin_templates() {
  static const std::map<std::string, std::string> kTemplates = {
#include "ideatree/builtin_templates.inc"
  };
  return kTemplates;
}

std::string strip(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

ChatEndpointConfig chat_endpoint_config_from_json(const json& j) {
  ChatEndpointConfig c;
  static const std::set<std::string> kKeys = {"base_url",    "path",        "model",
                                              "temperature", "timeout_seconds", "max_retries",
                                              "api_key_env", "template_dir"};
  if (!j.is_object()) throw Error(ErrorCode::kConfigInvalid, "llm: must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!kKeys.contains(k)) throw Error(ErrorCode::kConfigInvalid, "llm: unknown key '" + k + "'");
  }
  try {
    c.base_url = j.value("base_url", c.base_url);
    c.path = j.value("path", c.path);
    c.model = j.value("model", c.model);
    c.temperature = j.value("temperature", c.temperature);
    c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
    c.max_retries = j.value("max_retries", c.max_retries);
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.template_dir = j.value("template_dir", c.template_dir);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("llm: ") + e.what());
  }
  if (!(c.timeout_seconds > 0.0)) {
    throw Error(ErrorCode::kConfigInvalid, "llm: timeout_seconds must be positive");
  }
  if (c.base_url.rfind("http://", 0) != 0) {
    throw Error(ErrorCode::kConfigInvalid, "llm: base_url must start with http://");
  }
  return c;
}

json to_json(const ChatEndpointConfig& c) {
  return {{"base_url", c.base_url},       {"path", c.path},
          {"model", c.model},             {"temperature", c.temperature},
          {"timeout_seconds", c.timeout_seconds}, {"max_retries", c.max_retries},
          {"api_key_env", c.api_key_env}, {"template_dir", c.template_dir}};
}

ChatClient::ChatClient(ChatEndpointConfig config) : config_(std::move(config)) {}

std::string ChatClient::complete(const std::vector<ChatMessage>& messages) const {
  json body = {{"model", config_.model}, {"temperature", config_.temperature}};
  body["messages"] = json::array();
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  httplib::Headers headers;
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(config_.timeout_seconds));
  std::string last_error;
  for (std::size_t attempt = 0; attempt <= config_.max_retries; ++attempt) {
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    const auto res = client.Post(config_.path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      last_error = "HTTP status " + std::to_string(res->status);
      continue;
    }
    try {
      const json reply = json::parse(res->body);
      return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedResponse, std::string("not a chat completion: ") + e.what());
    }
  }
  throw Error(ErrorCode::kTransportFailure,
              config_.base_url + config_.path + " after " +
                  std::to_string(config_.max_retries + 1) + " attempts: " + last_error);
}

void ChatClient::fail_parse(std::size_t attempts, const std::string& last) const {
  const std::string excerpt = last.substr(0, 200);
  if (attempts <= 1) {
    throw Error(ErrorCode::kMalformedResponse, "unexpected reply: " + excerpt);
  }
  throw Error(ErrorCode::kRetriesExhausted,
              std::to_string(attempts) + " replies failed to parse; last: " + excerpt);
}

std::string load_template(const std::string& template_dir, const std::string& name) {
  if (!template_dir.empty()) {
    std::ifstream in(std::filesystem::path(template_dir) / (name + ".txt"));
    if (in) {
      std::stringstream buf;
      buf << in.rdbuf();
      return buf.str();
    }
  }
  const auto it = builtin_templates().find(name);
  if (it == builtin_templates().end()) {
    throw std::invalid_argument("no prompt template named '" + name + "'");
  }
  return it->second;
}

std::string render_template(std::string text, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    const std::string placeholder = "{{" + key + "}}";
    std::size_t pos = 0;
    while ((pos = text.find(placeholder, pos)) != std::string::npos) {
      text.replace(pos, placeholder.size(), value);
      pos += value.size();
    }
  }
  return text;
}

std::vector<std::string> parse_list_items(const std::string& content) {
  std::vector<std::string> items;
  std::istringstream in(content);
  std::string raw;
  while (std::getline(in, raw)) {
    const std::string line = strip(raw);
    std::size_t skip = 0;
    if (line.starts_with("- ") || line.starts_with("* ")) {
      skip = 2;
    } else {
      std::size_t d = 0;
      while (d < line.size() && std::isdigit(static_cast<unsigned char>(line[d]))) ++d;
      if (d > 0 && d < line.size() && (line[d] == '.' || line[d] == ')')) skip = d + 1;
    }
    if (skip == 0) continue;
    const std::string item = strip(std::string_view(line).substr(skip));
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::string extract_code(const std::string& content) {
  const auto open = content.find("```");
  if (open == std::string::npos) return strip(content) + "\n";
  const auto body = content.find('\n', open);
  if (body == std::string::npos) return strip(content) + "\n";
  const auto close = content.find("```", body);
  return content.substr(body + 1, close == std::string::npos ? std::string::npos : close - body - 1);
}

}  // namespace ideatree
