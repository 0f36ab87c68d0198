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


#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include "httplib.h"
#include "ideatree/core/error.hpp"
#include "ideatree/generation/llm_generator.hpp"

namespace ideatree {
namespace {

// Chat-completion stub: answers with whatever the handler returns for the
// last user message.
class StubServer {
 public:
  using Handler = std::function<std::string(const std::string& prompt)>;

  explicit StubServer(Handler handler, int status = 200, double delay_seconds = 0.0) {
    server_.Post("/v1/chat/completions", [=, this](const httplib::Request& req,
                                                   httplib::Response& res) {
      ++requests_;
      const auto body = nlohmann::json::parse(req.body);
      last_request_ = body;
      if (delay_seconds > 0) {
        std::this_thread::sleep_for(std::chrono::duration<double>(delay_seconds));
      }
      const std::string prompt = body["messages"].back()["content"];
      nlohmann::json reply = {
          {"choices", {{{"message", {{"role", "assistant"}, {"content", handler(prompt)}}}}}}};
      res.status = status;
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  ChatEndpointConfig endpoint(std::size_t retries = 0, double timeout = 5.0) const {
    ChatEndpointConfig c;
    c.base_url = "http://127.0.0.1:" + std::to_string(port_);
    c.model = "stub-model";
    c.temperature = 0.2;
    c.max_retries = retries;
    c.timeout_seconds = timeout;
    return c;
  }
  int requests() const { return requests_; }
  nlohmann::json last_request() const { return last_request_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  nlohmann::json last_request_;
};

std::string bullets(std::size_t n) {
  std::string s = "Here you go:\n";
  for (std::size_t i = 0; i < n; ++i) s += "- idea number " + std::to_string(i) + "\n";
  return s;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no ideatree::Error thrown";
  return ErrorCode::kInvariantViolation;
}

TEST(LlmGeneratorTest, ProposeReturnsRequestedCount) {
  StubServer stub([](const std::string& prompt) {
    const auto pos = prompt.find("Propose ");
    const auto n = std::stoul(prompt.substr(pos + 8));
    return bullets(n);
  });
  LlmGenerator gen(stub.endpoint());
  ContextState ctx;
  ctx.append(ContextTag::kReader, "tabular regression");
  const auto ideas = gen.propose_fe(ctx, 3, {});
  ASSERT_EQ(ideas.size(), 3u);
  EXPECT_EQ(ideas[0], "idea number 0");
  const auto req = stub.last_request();
  EXPECT_EQ(req["model"], "stub-model");
  EXPECT_EQ(req["temperature"], 0.2);
  EXPECT_EQ(req["messages"][0]["role"], "system");
  EXPECT_NE(req["messages"][1]["content"].get<std::string>().find("[Reader] tabular regression"),
            std::string::npos);
  Node fe;
  fe.level = NodeLevel::kFe;
  fe.idea_text = "lag features";
  EXPECT_EQ(gen.propose_mt(fe, ctx, 2, {}).size(), 2u);
}

TEST(LlmGeneratorTest, ShortResponseIsMalformed) {
  StubServer stub([](const std::string&) { return bullets(1); });
  LlmGenerator single(stub.endpoint(0));
  ContextState ctx;
  EXPECT_EQ(code_of([&] { single.propose_fe(ctx, 2, {}); }), ErrorCode::kMalformedResponse);
  LlmGenerator retrying(stub.endpoint(2));
  const int before = stub.requests();
  EXPECT_EQ(code_of([&] { retrying.propose_fe(ctx, 2, {}); }), ErrorCode::kRetriesExhausted);
  EXPECT_EQ(stub.requests() - before, 3);
}

TEST(LlmGeneratorTest, TimeoutIsTransportFailureAfterRetries) {
  StubServer stub([](const std::string&) { return bullets(1); }, 200, 0.6);
  LlmGenerator gen(stub.endpoint(1, 0.2));
  ContextState ctx;
  EXPECT_EQ(code_of([&] { gen.propose_fe(ctx, 1, {}); }), ErrorCode::kTransportFailure);
  EXPECT_EQ(stub.requests(), 2);
}

TEST(LlmGeneratorTest, ServerErrorIsTransportFailure) {
  StubServer stub([](const std::string&) { return bullets(1); }, 503);
  LlmGenerator gen(stub.endpoint(0));
  ContextState ctx;
  EXPECT_EQ(code_of([&] { gen.merge_fe(Node{}, Node{}, ctx); }), ErrorCode::kTransportFailure);
}

TEST(LlmGeneratorTest, MergeEdaAndCoder) {
  StubServer stub([](const std::string& prompt) -> std::string {
    if (prompt.find("exploratory") != std::string::npos) return "- none";
    if (prompt.find("corrected script") != std::string::npos) return "```python\nfixed()\n```";
    if (prompt.find("complete Python script") != std::string::npos) {
      return "Sure.\n```python\nepochs=10\nprint(1)\n```\n";
    }
    return "- combined idea";
  });
  LlmGenerator gen(stub.endpoint());
  ContextState ctx;
  EXPECT_EQ(gen.merge_mt(Node{}, Node{}, ctx), "combined idea");
  EXPECT_FALSE(gen.enrich_eda(IdeationTree{}, ctx));

  LlmCoder coder(stub.endpoint());
  IdeationTree tree;
  Node fe;
  fe.level = NodeLevel::kFe;
  const NodeId f = tree.add_node(tree.root_id(), fe);
  const NodeId m = tree.add_node(f, Node{});
  EXPECT_EQ(coder.implement(tree, m, ctx, {{1, "KeyError: x"}}), "epochs=10\nprint(1)\n");
  EXPECT_NE(stub.last_request()["messages"][1]["content"].get<std::string>().find("KeyError: x"),
            std::string::npos);
  EXPECT_EQ(coder.repair("broken()", "NameError", "x"), "fixed()\n");
}

TEST(ChatClientTest, ListParsingAndTemplates) {
  EXPECT_EQ(parse_list_items("intro\n- a\n* b\n3. c\n4) d\n-bad\n10.e"),
            (std::vector<std::string>{"a", "b", "c", "d", "e"}));
  EXPECT_EQ(render_template("{{x}} and {{x}} {{y}}", {{"x", "1"}}), "1 and 1 {{y}}");
  EXPECT_EQ(extract_code("no fence"), "no fence\n");
  // The built-in templates are the files shipped in templates/.
  const std::filesystem::path dir = std::filesystem::path(IDEATREE_SOURCE_DIR) / "templates";
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto name = entry.path().stem().string();
    EXPECT_EQ(load_template("", name), load_template(dir.string(), name)) << name;
  }
  EXPECT_THROW(load_template("", "no_such_template"), std::invalid_argument);
}

}  // namespace
}  // namespace ideatree
