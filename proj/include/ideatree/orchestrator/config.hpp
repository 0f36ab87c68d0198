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


// Run configuration. Every key has a default; a config file only lists what
// it changes. Unknown keys are errors.

#ifndef IDEATREE_ORCHESTRATOR_CONFIG_HPP_
#define IDEATREE_ORCHESTRATOR_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ideatree/core/tree.hpp"
#include "ideatree/evaluation/fast_mode.hpp"
#include "ideatree/evaluation/simulated.hpp"
#include "ideatree/evaluation/subprocess.hpp"
#include "ideatree/generation/chat_client.hpp"
#include "ideatree/generation/generator.hpp"
#include "ideatree/generation/synthetic.hpp"
#include "ideatree/search/stages.hpp"
#include "json.hpp"

namespace ideatree {

enum class ClockMode { kSimulated, kWall };
enum class PortsMode { kSynthetic, kLlm };

std::string_view to_string(ClockMode m);
std::string_view to_string(PortsMode m);

struct SyntheticPortsConfig {
  SpaceConfig space;
  SyntheticCoderConfig coder;
  LandscapeConfig landscape;
  MetricSpec metric;
  // Architectures (MT ideas) tried when building the anchor set.
  std::size_t anchor_architectures = 3;
};

struct LlmPortsConfig {
  ChatEndpointConfig endpoint;
  // Subprocess settings; data_dir and scratch_dir default to the dataset
  // and the run directory.
  nlohmann::json subprocess = nlohmann::json::object();
  // Directory of retrieval documents; empty for none.
  std::string corpus_dir;
  // "baseline" (embedding similarity) or "llm".
  std::string predictor = "baseline";
  std::size_t anchor_architectures = 3;
};

struct RunConfig {
  // Search hyperparameters.
  double time_run_minutes = 360;
  double runtime_error_time = 30;
  double subset_size_in_percent = 10;
  std::uint64_t validator_size_threshold = 10000;
  std::size_t number_of_ideas_eda = 5;
  std::size_t number_of_ideas_data = 2;
  std::size_t number_of_ideas_modelling = 2;
  std::size_t max_add_idea = 2;
  std::size_t number_of_selected_node = 2;
  std::size_t number_of_iterations_parents = 2;
  std::size_t number_of_selected_node_merging = 2;
  std::size_t number_of_iterations_children = 3;
  std::size_t number_of_ideas_min = 2;
  std::size_t number_of_ideas_max = 5;
  std::size_t retrieve_n_papers = 3;
  std::size_t retrieve_n_competitions = 3;
  std::size_t number_rag_ideas = 5;

  // Engine keys.
  std::uint64_t seed = 0;
  std::uint32_t theta_fail = 2;
  double temperature = 1.0;
  double merge_epsilon = 0.0;
  ClockMode clock = ClockMode::kSimulated;
  std::size_t workers = 1;
  bool merging = true;
  bool debug_acceleration = true;
  bool predict_before_evaluate = true;
  // Share of a batch that gets a full evaluation when predicting first.
  double predict_keep_fraction = 0.5;
  std::size_t max_retries = 5;
  std::size_t max_regenerations = 2;
  double fast_mode_cap = 2;
  std::size_t memory_size = 5;
  ContextStrategy memory_strategy = ContextStrategy::kRandom;
  ExternalPolicy external_policy = ExternalPolicy::kAdaptive;
  ExpansionMode expansion_mode = ExpansionMode::kFeNodes;
  SampleTopMode sample_top_mode = SampleTopMode::kSoftmax;
  std::size_t max_resplits = 2;
  // Checkpoint after every n-th stage.
  std::size_t checkpoint_every = 1;
  PortsMode ports = PortsMode::kSynthetic;
  SyntheticPortsConfig synthetic;
  LlmPortsConfig llm;

  StageParams stage_params() const;
  FastModeTransform fast_mode() const;
};

// Parses a config document. On failure `config` is empty and `errors`
// holds one "key: problem" line per problem found.
struct ConfigParse {
  std::optional<RunConfig> config;
  std::vector<std::string> errors;
};

ConfigParse parse_run_config(const nlohmann::json& doc);
// Problems with an already built config; empty when valid.
std::vector<std::string> validate_run_config(const RunConfig& c);
// Reads and parses a JSON file. Throws ConfigInvalid (listing every
// problem) or IoError.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig run_config_or_throw(const nlohmann::json& doc);

nlohmann::json to_json(const RunConfig& c);

}  // namespace ideatree

#endif  // IDEATREE_ORCHESTRATOR_CONFIG_HPP_
