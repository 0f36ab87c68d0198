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


// Deterministic stand-ins for the language-model backends. Ideas are points
// in a d-dimensional space rendered as text ("fe [0.1, -0.4]"), so that a
// simulated landscape can score them and every run is reproducible from its
// seed.

#ifndef IDEATREE_GENERATION_SYNTHETIC_HPP_
#define IDEATREE_GENERATION_SYNTHETIC_HPP_

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>

#include "ideatree/core/rng.hpp"
#include "ideatree/generation/generator.hpp"
#include "ideatree/generation/idea_vector.hpp"
#include "ideatree/generation/retrieval.hpp"
#include "json.hpp"

namespace ideatree {

enum class MergeRule {
  // Elementwise midpoint of the parents.
  kMidpoint,
  // Each coordinate copied from a parent chosen by a fair coin.
  kCrossover,
};

struct SpaceConfig {
  std::size_t dimension = 2;
  // Fresh proposals are N(0, proposal_sigma^2 I).
  double proposal_sigma = 1.0;
  // Chance that a proposal perturbs the best idea in memory instead.
  double exploit_probability = 0.5;
  double local_sigma = 0.3;
  MergeRule merge_rule = MergeRule::kMidpoint;
  // Standard deviation of the noise added to every merge result.
  double merge_perturbation = 0.05;
  // Documents per source for external queries.
  std::size_t retrieve_n_papers = 3;
  std::size_t retrieve_n_competitions = 3;

  // Throws InvalidSpaceConfig.
  void validate() const;
};

SpaceConfig space_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SpaceConfig& c);

class SyntheticGenerator final : public IdeaGenerator {
 public:
  // `retriever` may be null (external queries then return nothing) and must
  // outlive the generator. Throws InvalidSpaceConfig.
  SyntheticGenerator(SpaceConfig config, std::uint64_t seed,
                     const Retriever* retriever = nullptr);

  std::vector<std::string> propose_fe(const ContextState& ctx, std::size_t n,
                                      std::span<const MemoryExcerpt> memory) override;
  std::vector<std::string> propose_mt(const Node& fe, const ContextState& ctx, std::size_t m,
                                      std::span<const MemoryExcerpt> memory) override;
  std::string merge_fe(const Node& a, const Node& b, const ContextState& ctx) override;
  std::string merge_mt(const Node& a, const Node& b, const ContextState& ctx) override;
  std::optional<std::string> enrich_eda(const IdeationTree& tree,
                                        const ContextState& ctx) override;
  // Adaptive (not forced) queries only run while the context holds no
  // external segment yet.
  std::vector<std::string> query_external(const ContextState& ctx, bool forced) override;

  const SpaceConfig& config() const noexcept { return config_; }

 private:
  std::vector<std::string> propose(std::string_view label, std::size_t n,
                                   std::span<const MemoryExcerpt> memory, NodeLevel level);
  std::string merge(std::string_view label, const Node& a, const Node& b);

  SpaceConfig config_;
  const Retriever* retriever_;
  std::mutex mu_;
  Rng rng_;
  std::uint64_t eda_findings_ = 0;
};

struct SyntheticCoderConfig {
  // Each of max_bugs potential bugs is present with this probability.
  double bug_probability = 0.5;
  std::size_t max_bugs = 6;
  // Chance that a repair removes the first bug. Decided by a hash of the
  // code, so repair is a pure function.
  double fix_probability = 1.0;
  std::uint64_t epochs = 50;
  std::uint64_t n_estimators = 400;

  void validate() const;
};

SyntheticCoderConfig synthetic_coder_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SyntheticCoderConfig& c);

// Emits code artifacts in the key=value convention plus zero or more lines
// `bug=<ErrorClass>: <message>` that the simulated evaluator turns into
// runtime errors.
class SyntheticCoder final : public Coder {
 public:
  SyntheticCoder(SyntheticCoderConfig config, std::uint64_t seed);

  std::string implement(const IdeationTree& tree, NodeId mt, const ContextState& ctx,
                        const std::map<std::uint64_t, std::string>& known_errors) override;
  std::string repair(const std::string& code, std::string_view error_class,
                     std::string_view message) override;

 private:
  SyntheticCoderConfig config_;
  std::uint64_t seed_;
  std::mutex mu_;
  // implement() calls so far per node; with the node id and the seed this
  // fixes the draws, so results do not depend on call order across nodes.
  std::map<NodeId, std::uint64_t> calls_;
};

// First `bug=` line of a synthetic artifact as (class, message).
std::optional<std::pair<std::string, std::string>> first_bug(std::string_view code);

}  // namespace ideatree

#endif  // IDEATREE_GENERATION_SYNTHETIC_HPP_
