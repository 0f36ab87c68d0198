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


// Ports through which the search obtains ideas and code, plus the two
// context helpers that sit in front of them: tree-memory selection and
// external-knowledge gating.

#ifndef IDEATREE_GENERATION_GENERATOR_HPP_
#define IDEATREE_GENERATION_GENERATOR_HPP_

#include <cstddef>
#include <optional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ideatree/core/rng.hpp"
#include "ideatree/core/run_log.hpp"
#include "ideatree/core/tree.hpp"
#include "ideatree/generation/context.hpp"
#include "ideatree/generation/embedding.hpp"

namespace ideatree {

// A previously explored node shown to the generator as memory.
struct MemoryExcerpt {
  NodeId id;
  NodeLevel level = NodeLevel::kFe;
  std::string idea_text;
  // Oriented (larger is better) raw score for MT nodes, oriented aggregate
  // for FE nodes; unset if unknown.
  std::optional<double> score;
};

// Idea generation. Implementations must tolerate concurrent calls.
//
// propose_fe and propose_mt return exactly the requested number of ideas or
// throw (GeneratorFailure or a transport-specific code that the stages map
// to GeneratorFailure).
class IdeaGenerator {
 public:
  virtual ~IdeaGenerator() = default;

  virtual std::vector<std::string> propose_fe(const ContextState& ctx, std::size_t n,
                                              std::span<const MemoryExcerpt> memory) = 0;
  virtual std::vector<std::string> propose_mt(const Node& fe, const ContextState& ctx,
                                              std::size_t m,
                                              std::span<const MemoryExcerpt> memory) = 0;
  virtual std::string merge_fe(const Node& a, const Node& b, const ContextState& ctx) = 0;
  virtual std::string merge_mt(const Node& a, const Node& b, const ContextState& ctx) = 0;
  // A new EDA finding, or nothing if the generator has none to add.
  virtual std::optional<std::string> enrich_eda(const IdeationTree& tree,
                                                const ContextState& ctx) = 0;
  // External knowledge segments. With `forced` the generator must query its
  // sources; otherwise it decides whether a query is worthwhile and may
  // return nothing. Throws RetrievalFailure.
  virtual std::vector<std::string> query_external(const ContextState& ctx, bool forced) = 0;
};

// Turns an MT node (with its FE parent) into a runnable code artifact.
//
// Time-sensitive parameters are written as `name=value` lines so that fast
// mode can cap them. `known_errors` maps the signatures (see
// core/signature.hpp) of errors seen earlier in the run to their
// "Class: message" text; a regeneration should avoid repeating them.
class Coder {
 public:
  virtual ~Coder() = default;
  virtual std::string implement(const IdeationTree& tree, NodeId mt, const ContextState& ctx,
                                const std::map<std::uint64_t, std::string>& known_errors) = 0;
  // One repair attempt. Must be callable concurrently and must not depend on
  // call order.
  virtual std::string repair(const std::string& code, std::string_view error_class,
                             std::string_view message) = 0;
};

enum class ContextStrategy { kNearest, kFarthest, kRandom };
std::string_view to_string(ContextStrategy s);
ContextStrategy context_strategy_from_string(std::string_view s);

// Up to n other nodes at the anchor's level. Nearest/Farthest rank by cosine
// distance between idea-text embeddings (ascending/descending); Random draws
// uniformly without replacement. Ties go to the lower id. Throws
// UnknownAnchor.
std::vector<NodeId> select_context_nodes(const IdeationTree& tree, NodeId anchor,
                                         ContextStrategy strategy, std::size_t n,
                                         const EmbeddingProvider& embedder, Rng& rng);

// Excerpts for the given ids, in the given order.
std::vector<MemoryExcerpt> memory_excerpts(const IdeationTree& tree,
                                           std::span<const NodeId> ids,
                                           const MetricSpec& metric);

enum class ExternalPolicy { kAlways, kNever, kAdaptive };
std::string_view to_string(ExternalPolicy p);
ExternalPolicy external_policy_from_string(std::string_view s);

// Queries external knowledge according to the policy and appends at most
// `cap` segments to ctx with tag External. A RetrievalFailure is logged as
// ExternalQueryFailed and treated as an empty result. Returns the appended
// segments.
std::vector<std::string> gate_external_query(ContextState& ctx, ExternalPolicy policy,
                                             IdeaGenerator& gen, std::size_t cap,
                                             RunLog* log = nullptr);

}  // namespace ideatree

#endif  // IDEATREE_GENERATION_GENERATOR_HPP_
