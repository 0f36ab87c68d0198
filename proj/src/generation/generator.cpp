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


#include "ideatree/generation/generator.hpp"

#include <algorithm>
#include <stdexcept>

#include "ideatree/core/error.hpp"

namespace ideatree {

std::string_view to_string(ContextStrategy s) {
  switch (s) {
    case ContextStrategy::kNearest: return "nearest";
    case ContextStrategy::kFarthest: return "farthest";
    case ContextStrategy::kRandom: return "random";
  }
  return "?";
}

ContextStrategy context_strategy_from_string(std::string_view s) {
  if (s == "nearest") return ContextStrategy::kNearest;
  if (s == "farthest") return ContextStrategy::kFarthest;
  if (s == "random") return ContextStrategy::kRandom;
  throw std::invalid_argument("unknown context strategy '" + std::string(s) + "'");
}

std::string_view to_string(ExternalPolicy p) {
  switch (p) {
    case ExternalPolicy::kAlways: return "always";
    case ExternalPolicy::kNever: return "never";
    case ExternalPolicy::kAdaptive: return "adaptive";
  }
  return "?";
}

ExternalPolicy external_policy_from_string(std::string_view s) {
  if (s == "always") return ExternalPolicy::kAlways;
  if (s == "never") return ExternalPolicy::kNever;
  if (s == "adaptive") return ExternalPolicy::kAdaptive;
  throw std::invalid_argument("unknown external policy '" + std::string(s) + "'");
}

std::vector<NodeId> select_context_nodes(const IdeationTree& tree, NodeId anchor,
                                         ContextStrategy strategy, std::size_t n,
                                         const EmbeddingProvider& embedder, Rng& rng) {
  if (!tree.contains(anchor)) {
    throw Error(ErrorCode::kUnknownAnchor, "no node with id " + to_string(anchor));
  }
  const Node& a = tree.node(anchor);
  std::vector<NodeId> pool;
  for (const NodeId id : tree.ids_at(a.level)) {
    if (id != anchor) pool.push_back(id);
  }
  n = std::min(n, pool.size());
  if (strategy == ContextStrategy::kRandom) {
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = static_cast<std::ptrdiff_t>(rng.below(pool.size()));
      out.push_back(pool[static_cast<std::size_t>(j)]);
      pool.erase(pool.begin() + j);
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  const Embedding ea = embedder.embed(a.idea_text);
  std::vector<std::pair<double, NodeId>> ranked;
  ranked.reserve(pool.size());
  for (const NodeId id : pool) {
    const double d = cosine_distance(ea, embedder.embed(tree.node(id).idea_text));
    ranked.emplace_back(strategy == ContextStrategy::kNearest ? d : -d, id);
  }
  std::sort(ranked.begin(), ranked.end());
  std::vector<NodeId> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(ranked[i].second);
  return out;
}

std::vector<MemoryExcerpt> memory_excerpts(const IdeationTree& tree,
                                           std::span<const NodeId> ids,
                                           const MetricSpec& metric) {
  std::vector<MemoryExcerpt> out;
  out.reserve(ids.size());
  for (const NodeId id : ids) {
    const Node& n = tree.node(id);
    const auto& s = n.level == NodeLevel::kMt ? n.raw_score : n.aggregated_score;
    std::optional<double> score;
    if (s) score = metric.direction == Direction::kHigherBetter ? *s : -*s;
    out.push_back({id, n.level, n.idea_text, score});
  }
  return out;
}

std::vector<std::string> gate_external_query(ContextState& ctx, ExternalPolicy policy,
                                             IdeaGenerator& gen, std::size_t cap,
                                             RunLog* log) {
  if (policy == ExternalPolicy::kNever) return {};
  std::vector<std::string> segments;
  try {
    segments = gen.query_external(ctx, policy == ExternalPolicy::kAlways);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kRetrievalFailure) throw;
    if (log) log->append(event::kExternalQueryFailed, {{"error", e.what()}});
    return {};
  }
  std::vector<std::string> appended;
  for (auto& s : segments) {
    if (appended.size() >= cap) break;
    if (s.empty()) continue;
    ctx.append(ContextTag::kExternal, s);
    appended.push_back(std::move(s));
  }
  if (log && !appended.empty()) {
    log->append(event::kContextAppended, {{"tag", "External"}, {"count", appended.size()}});
  }
  return appended;
}

}  // namespace ideatree
