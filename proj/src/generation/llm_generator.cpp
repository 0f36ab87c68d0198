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


#include "ideatree/generation/llm_generator.hpp"

#include <cctype>
#include <cstdio>

#include "ideatree/core/error.hpp"

namespace ideatree {

namespace {

std::string or_none(const std::string& s) { return s.empty() ? "(none)\n" : s; }

}  // namespace

std::string render_memory(std::span<const MemoryExcerpt> memory) {
  std::string out;
  for (const auto& m : memory) {
    char score[32] = "unscored";
    if (m.score) std::snprintf(score, sizeof score, "%.6g", *m.score);
    out += "- [" + std::string(score) + "] " + m.idea_text + "\n";
  }
  return or_none(out);
}

LlmGenerator::LlmGenerator(ChatEndpointConfig endpoint, const Retriever* retriever,
                           ExternalKnowledgeConfig external)
    : client_(std::move(endpoint)), retriever_(retriever), external_(external) {}

std::vector<ChatMessage> LlmGenerator::messages(
    const std::string& name, const std::map<std::string, std::string>& values) const {
  const auto& dir = client_.config().template_dir;
  return {{"system", load_template(dir, "system")},
          {"user", render_template(load_template(dir, name), values)}};
}

std::vector<std::string> LlmGenerator::ask_list(const std::string& name,
                                                std::map<std::string, std::string> values,
                                                std::size_t n) {
  values["n"] = std::to_string(n);
  return client_.complete_parsed<std::vector<std::string>>(
      messages(name, values),
      [n](const std::string& content) -> std::optional<std::vector<std::string>> {
        auto items = parse_list_items(content);
        if (items.size() != n) return std::nullopt;
        return items;
      });
}

std::string LlmGenerator::ask_one(const std::string& name,
                                  std::map<std::string, std::string> values) {
  return client_.complete_parsed<std::string>(
      messages(name, values), [](const std::string& content) -> std::optional<std::string> {
        auto items = parse_list_items(content);
        if (items.empty()) return std::nullopt;
        return items.front();
      });
}

std::vector<std::string> LlmGenerator::propose_fe(const ContextState& ctx, std::size_t n,
                                                  std::span<const MemoryExcerpt> memory) {
  return ask_list("propose_fe", {{"context", or_none(ctx.render())},
                                 {"memory", render_memory(memory)}},
                  n);
}

std::vector<std::string> LlmGenerator::propose_mt(const Node& fe, const ContextState& ctx,
                                                  std::size_t m,
                                                  std::span<const MemoryExcerpt> memory) {
  return ask_list("propose_mt", {{"context", or_none(ctx.render())},
                                 {"fe", fe.idea_text},
                                 {"memory", render_memory(memory)}},
                  m);
}

std::string LlmGenerator::merge_fe(const Node& a, const Node& b, const ContextState& ctx) {
  return ask_one("merge_fe",
                 {{"context", or_none(ctx.render())}, {"a", a.idea_text}, {"b", b.idea_text}});
}

std::string LlmGenerator::merge_mt(const Node& a, const Node& b, const ContextState& ctx) {
  return ask_one("merge_mt",
                 {{"context", or_none(ctx.render())}, {"a", a.idea_text}, {"b", b.idea_text}});
}

std::optional<std::string> LlmGenerator::enrich_eda(const IdeationTree& tree,
                                                    const ContextState& ctx) {
  std::string ideas;
  for (const auto& [id, n] : tree.nodes()) {
    if (n.level == NodeLevel::kFe) ideas += "- " + n.idea_text + "\n";
  }
  const std::string finding =
      ask_one("enrich_eda", {{"context", or_none(ctx.render())}, {"tree", or_none(ideas)}});
  std::string lowered;
  for (char c : finding) lowered += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lowered == "none" || lowered == "none.") return std::nullopt;
  return finding;
}

std::vector<std::string> LlmGenerator::query_external(const ContextState& ctx, bool forced) {
  if (!retriever_) return {};
  if (!forced) {
    const bool wanted = client_.complete_parsed<bool>(
        messages("external_decision", {{"context", or_none(ctx.render())}}),
        [](const std::string& content) -> std::optional<bool> {
          std::string w;
          for (char c : content) {
            if (std::isalpha(static_cast<unsigned char>(c))) {
              w += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            } else if (!w.empty()) {
              break;
            }
          }
          if (w == "yes") return true;
          if (w == "no") return false;
          return std::nullopt;
        });
    if (!wanted) return {};
  }
  const std::string query = ctx.render();
  std::string documents;
  for (const auto& [source, k] :
       {std::pair{DocumentSource::kPapers, external_.retrieve_n_papers},
        std::pair{DocumentSource::kCompetitions, external_.retrieve_n_competitions}}) {
    for (const auto& d : retriever_->retrieve(query, k, source)) {
      documents += "## " + std::string(to_string(d.source)) + ": " + d.title + "\n" + d.body + "\n\n";
    }
  }
  if (documents.empty()) return {};
  const auto n = external_.number_rag_ideas;
  return client_.complete_parsed<std::vector<std::string>>(
      messages("external_extract", {{"context", or_none(ctx.render())},
                                    {"documents", documents},
                                    {"n", std::to_string(n)}}),
      [n](const std::string& content) -> std::optional<std::vector<std::string>> {
        auto items = parse_list_items(content);
        if (items.empty() || items.size() > n) return std::nullopt;
        return items;
      });
}

// ---------------------------------------------------------------------------

LlmCoder::LlmCoder(ChatEndpointConfig endpoint) : client_(std::move(endpoint)) {}

std::string LlmCoder::ask_code(const std::string& name,
                               const std::map<std::string, std::string>& values) {
  const auto& dir = client_.config().template_dir;
  const std::vector<ChatMessage> msgs = {
      {"system", load_template(dir, "system")},
      {"user", render_template(load_template(dir, name), values)}};
  return client_.complete_parsed<std::string>(
      msgs, [](const std::string& content) -> std::optional<std::string> {
        std::string code = extract_code(content);
        if (code.find_first_not_of(" \t\r\n") == std::string::npos) return std::nullopt;
        return code;
      });
}

std::string LlmCoder::implement(const IdeationTree& tree, NodeId mt, const ContextState& ctx,
                                const std::map<std::uint64_t, std::string>& known_errors) {
  const Node& node = tree.node(mt);
  std::string errors;
  for (const auto& [sig, text] : known_errors) errors += "- " + text + "\n";
  return ask_code("implement",
                  {{"context", or_none(ctx.render())},
                   {"fe", node.parent ? tree.node(*node.parent).idea_text : std::string()},
                   {"mt", node.idea_text},
                   {"known_errors", or_none(errors)}});
}

std::string LlmCoder::repair(const std::string& code, std::string_view error_class,
                             std::string_view message) {
  return ask_code("repair", {{"code", code},
                             {"error_class", std::string(error_class)},
                             {"message", std::string(message)}});
}

}  // namespace ideatree
