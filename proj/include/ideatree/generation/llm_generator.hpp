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


#ifndef IDEATREE_GENERATION_LLM_GENERATOR_HPP_
#define IDEATREE_GENERATION_LLM_GENERATOR_HPP_

#include "ideatree/generation/chat_client.hpp"
#include "ideatree/generation/generator.hpp"
#include "ideatree/generation/retrieval.hpp"

namespace ideatree {

struct ExternalKnowledgeConfig {
  std::size_t retrieve_n_papers = 3;
  std::size_t retrieve_n_competitions = 3;
  // Key ideas requested from the model per query.
  std::size_t number_rag_ideas = 5;
};

// Idea generation through a chat-completion endpoint. Each port call sends
// one system message and one user message rendered from the named template
// (propose_fe, propose_mt, merge_fe, merge_mt, enrich_eda,
// external_decision, external_extract). Errors surface as TransportFailure,
// MalformedResponse or RetriesExhausted.
class LlmGenerator final : public IdeaGenerator {
 public:
  // `retriever` may be null and must outlive the generator.
  LlmGenerator(ChatEndpointConfig endpoint, const Retriever* retriever = nullptr,
               ExternalKnowledgeConfig external = {});

  std::vector<std::string> propose_fe(const ContextState& ctx, std::size_t n,
                                      std::span<const MemoryExcerpt> memory) override;
  std::vector<std::string> propose_mt(const Node& fe, const ContextState& ctx, std::size_t m,
                                      std::span<const MemoryExcerpt> memory) override;
  std::string merge_fe(const Node& a, const Node& b, const ContextState& ctx) override;
  std::string merge_mt(const Node& a, const Node& b, const ContextState& ctx) override;
  std::optional<std::string> enrich_eda(const IdeationTree& tree,
                                        const ContextState& ctx) override;
  // Unforced queries first ask the model whether retrieval is worthwhile.
  std::vector<std::string> query_external(const ContextState& ctx, bool forced) override;

 private:
  std::vector<ChatMessage> messages(const std::string& name,
                                    const std::map<std::string, std::string>& values) const;
  std::vector<std::string> ask_list(const std::string& name,
                                    std::map<std::string, std::string> values, std::size_t n);
  std::string ask_one(const std::string& name, std::map<std::string, std::string> values);

  ChatClient client_;
  const Retriever* retriever_;
  ExternalKnowledgeConfig external_;
};

// Code generation and repair through a chat-completion endpoint (templates
// implement and repair). The script is taken from the first fenced block.
class LlmCoder final : public Coder {
 public:
  explicit LlmCoder(ChatEndpointConfig endpoint);

  std::string implement(const IdeationTree& tree, NodeId mt, const ContextState& ctx,
                        const std::map<std::uint64_t, std::string>& known_errors) override;
  std::string repair(const std::string& code, std::string_view error_class,
                     std::string_view message) override;

 private:
  std::string ask_code(const std::string& name, const std::map<std::string, std::string>& values);

  ChatClient client_;
};

// Memory excerpts as "- [score] text" lines, "(none)" when empty.
std::string render_memory(std::span<const MemoryExcerpt> memory);

}  // namespace ideatree

#endif  // IDEATREE_GENERATION_LLM_GENERATOR_HPP_
