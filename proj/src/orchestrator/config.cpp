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


#include "ideatree/orchestrator/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ideatree/core/error.hpp"

namespace ideatree {

using nlohmann::json;

std::string_view to_string(ClockMode m) { return m == ClockMode::kSimulated ? "simulated" : "wall"; }
std::string_view to_string(PortsMode m) { return m == PortsMode::kSynthetic ? "synthetic" : "llm"; }

namespace {

std::string_view sample_top_name(SampleTopMode m) {
  return m == SampleTopMode::kSoftmax ? "softmax" : "proportional";
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Each setter throws std::exception with a short problem description.
using Setter = std::function<void(const json&, RunConfig&)>;

std::uint64_t as_count(const json& v) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw std::invalid_argument("must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

double as_real(const json& v) {
  if (!v.is_number()) throw std::invalid_argument("must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw std::invalid_argument("must be finite");
  return d;
}

bool as_bool(const json& v) {
  if (!v.is_boolean()) throw std::invalid_argument("must be true or false");
  return v.get<bool>();
}

std::string as_string(const json& v) {
  if (!v.is_string()) throw std::invalid_argument("must be a string");
  return v.get<std::string>();
}

template <typename T>
Setter count_field(T RunConfig::*field) {
  return [field](const json& v, RunConfig& c) { c.*field = static_cast<T>(as_count(v)); };
}

Setter real_field(double RunConfig::*field) {
  return [field](const json& v, RunConfig& c) { c.*field = as_real(v); };
}

Setter bool_field(bool RunConfig::*field) {
  return [field](const json& v, RunConfig& c) { c.*field = as_bool(v); };
}

MetricSpec metric_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("must be an object");
  MetricSpec m;
  for (const auto& [k, v] : j.items()) {
    if (k == "name") {
      m.name = as_string(v);
    } else if (k == "direction") {
      m.direction = direction_from_string(as_string(v));
    } else {
      throw std::invalid_argument("unknown key '" + k + "'");
    }
  }
  return m;
}

void parse_synthetic(const json& j, RunConfig& c, std::vector<std::string>& errors) {
  if (!j.is_object()) {
    errors.push_back("synthetic: must be an object");
    return;
  }
  for (const auto& [k, v] : j.items()) {
    try {
      if (k == "space") {
        c.synthetic.space = space_config_from_json(v);
      } else if (k == "coder") {
        c.synthetic.coder = synthetic_coder_config_from_json(v);
      } else if (k == "landscape") {
        c.synthetic.landscape = landscape_config_from_json(v);
      } else if (k == "metric") {
        c.synthetic.metric = metric_from_json(v);
      } else if (k == "anchor_architectures") {
        c.synthetic.anchor_architectures = as_count(v);
      } else {
        errors.push_back("synthetic." + k + ": unknown key");
      }
    } catch (const std::exception& e) {
      errors.push_back("synthetic." + k + ": " + e.what());
    }
  }
}

void parse_llm(const json& j, RunConfig& c, std::vector<std::string>& errors) {
  if (!j.is_object()) {
    errors.push_back("llm: must be an object");
    return;
  }
  for (const auto& [k, v] : j.items()) {
    try {
      if (k == "endpoint") {
        c.llm.endpoint = chat_endpoint_config_from_json(v);
      } else if (k == "subprocess") {
        // Checked now with placeholder directories; the real ones are
        // filled in when the run starts.
        json probe = v;
        if (!probe.is_object()) throw std::invalid_argument("must be an object");
        if (!probe.contains("data_dir")) probe["data_dir"] = "data";
        if (!probe.contains("scratch_dir")) probe["scratch_dir"] = "scratch";
        subprocess_config_from_json(probe);
        c.llm.subprocess = v;
      } else if (k == "corpus_dir") {
        c.llm.corpus_dir = as_string(v);
      } else if (k == "predictor") {
        c.llm.predictor = as_string(v);
        if (c.llm.predictor != "baseline" && c.llm.predictor != "llm") {
          throw std::invalid_argument("must be \"baseline\" or \"llm\"");
        }
      } else if (k == "anchor_architectures") {
        c.llm.anchor_architectures = as_count(v);
      } else {
        errors.push_back("llm." + k + ": unknown key");
      }
    } catch (const std::exception& e) {
      errors.push_back("llm." + k + ": " + e.what());
    }
  }
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"time_run_minutes", real_field(&RunConfig::time_run_minutes)},
      {"runtime_error_time", real_field(&RunConfig::runtime_error_time)},
      {"subset_size_in_percent", real_field(&RunConfig::subset_size_in_percent)},
      {"validator_size_threshold", count_field(&RunConfig::validator_size_threshold)},
      {"number_of_ideas_eda", count_field(&RunConfig::number_of_ideas_eda)},
      {"number_of_ideas_data", count_field(&RunConfig::number_of_ideas_data)},
      {"number_of_ideas_modelling", count_field(&RunConfig::number_of_ideas_modelling)},
      {"max_add_idea", count_field(&RunConfig::max_add_idea)},
      {"number_of_selected_node", count_field(&RunConfig::number_of_selected_node)},
      {"number_of_iterations_parents", count_field(&RunConfig::number_of_iterations_parents)},
      {"number_of_selected_node_merging",
       count_field(&RunConfig::number_of_selected_node_merging)},
      {"number_of_iterations_children", count_field(&RunConfig::number_of_iterations_children)},
      {"number_of_ideas_min", count_field(&RunConfig::number_of_ideas_min)},
      {"number_of_ideas_max", count_field(&RunConfig::number_of_ideas_max)},
      {"retrieve_n_papers", count_field(&RunConfig::retrieve_n_papers)},
      {"retrieve_n_competitions", count_field(&RunConfig::retrieve_n_competitions)},
      {"number_rag_ideas", count_field(&RunConfig::number_rag_ideas)},
      {"seed", count_field(&RunConfig::seed)},
      {"theta_fail", count_field(&RunConfig::theta_fail)},
      {"temperature", real_field(&RunConfig::temperature)},
      {"merge_epsilon", real_field(&RunConfig::merge_epsilon)},
      {"clock",
       [](const json& v, RunConfig& c) {
         const std::string s = lower(as_string(v));
         if (s == "simulated") {
           c.clock = ClockMode::kSimulated;
         } else if (s == "wall") {
           c.clock = ClockMode::kWall;
         } else {
           throw std::invalid_argument("must be \"simulated\" or \"wall\"");
         }
       }},
      {"workers", count_field(&RunConfig::workers)},
      {"merging", bool_field(&RunConfig::merging)},
      {"debug_acceleration", bool_field(&RunConfig::debug_acceleration)},
      {"predict_before_evaluate", bool_field(&RunConfig::predict_before_evaluate)},
      {"predict_keep_fraction", real_field(&RunConfig::predict_keep_fraction)},
      {"max_retries", count_field(&RunConfig::max_retries)},
      {"max_regenerations", count_field(&RunConfig::max_regenerations)},
      {"fast_mode_cap", real_field(&RunConfig::fast_mode_cap)},
      {"memory_size", count_field(&RunConfig::memory_size)},
      {"memory_strategy",
       [](const json& v, RunConfig& c) {
         c.memory_strategy = context_strategy_from_string(as_string(v));
       }},
      {"external_policy",
       [](const json& v, RunConfig& c) {
         c.external_policy = external_policy_from_string(as_string(v));
       }},
      {"expansion_mode",
       [](const json& v, RunConfig& c) {
         c.expansion_mode = expansion_mode_from_string(as_string(v));
       }},
      {"sample_top_mode",
       [](const json& v, RunConfig& c) {
         const std::string s = as_string(v);
         if (s == "softmax") {
           c.sample_top_mode = SampleTopMode::kSoftmax;
         } else if (s == "proportional") {
           c.sample_top_mode = SampleTopMode::kProportional;
         } else {
           throw std::invalid_argument("must be \"softmax\" or \"proportional\"");
         }
       }},
      {"max_resplits", count_field(&RunConfig::max_resplits)},
      {"checkpoint_every", count_field(&RunConfig::checkpoint_every)},
      {"ports",
       [](const json& v, RunConfig& c) {
         const std::string s = as_string(v);
         if (s == "synthetic") {
           c.ports = PortsMode::kSynthetic;
         } else if (s == "llm" || s == "llm+subprocess") {
           c.ports = PortsMode::kLlm;
         } else {
           throw std::invalid_argument("must be \"synthetic\" or \"llm+subprocess\"");
         }
       }},
  };
  return table;
}

}  // namespace

StageParams RunConfig::stage_params() const {
  StageParams p;
  p.n_fe = number_of_ideas_data;
  p.m_mt = number_of_ideas_modelling;
  p.n_selected = number_of_selected_node;
  p.max_add_idea = max_add_idea;
  p.freshness_iterations = number_of_iterations_parents;
  p.resample_per_parent = number_of_iterations_children;
  p.n_selected_merging = number_of_selected_node_merging;
  p.temperature = temperature;
  p.merge_epsilon = merge_epsilon;
  p.sample_top_mode = sample_top_mode;
  p.expansion_mode = expansion_mode;
  p.memory_size = memory_size;
  p.memory_strategy = memory_strategy;
  p.external_policy = external_policy;
  p.external_cap = number_rag_ideas;
  return p;
}

FastModeTransform RunConfig::fast_mode() const {
  FastModeTransform t;
  for (auto& [key, cap] : t.caps) cap = fast_mode_cap;
  t.subset_fraction = subset_size_in_percent / 100.0;
  return t;
}

std::vector<std::string> validate_run_config(const RunConfig& c) {
  std::vector<std::string> errors;
  auto positive = [&](std::uint64_t v, const char* name) {
    if (v == 0) errors.push_back(std::string(name) + ": must be positive");
  };
  if (!(c.time_run_minutes >= 0)) errors.push_back("time_run_minutes: must be non-negative");
  if (!(c.runtime_error_time > 0)) errors.push_back("runtime_error_time: must be positive");
  if (!(c.subset_size_in_percent > 0 && c.subset_size_in_percent <= 100)) {
    errors.push_back("subset_size_in_percent: must lie in (0, 100]");
  }
  positive(c.validator_size_threshold, "validator_size_threshold");
  positive(c.number_of_ideas_eda, "number_of_ideas_eda");
  positive(c.number_of_ideas_data, "number_of_ideas_data");
  positive(c.number_of_ideas_modelling, "number_of_ideas_modelling");
  positive(c.max_add_idea, "max_add_idea");
  positive(c.number_of_selected_node, "number_of_selected_node");
  positive(c.number_of_iterations_parents, "number_of_iterations_parents");
  positive(c.number_of_selected_node_merging, "number_of_selected_node_merging");
  positive(c.number_of_iterations_children, "number_of_iterations_children");
  positive(c.number_of_ideas_min, "number_of_ideas_min");
  positive(c.number_of_ideas_max, "number_of_ideas_max");
  if (c.number_of_ideas_min > c.number_of_ideas_max) {
    errors.push_back("number_of_ideas_min: must not exceed number_of_ideas_max");
  }
  positive(c.retrieve_n_papers, "retrieve_n_papers");
  positive(c.retrieve_n_competitions, "retrieve_n_competitions");
  positive(c.number_rag_ideas, "number_rag_ideas");
  positive(c.theta_fail, "theta_fail");
  if (!(c.temperature > 0)) errors.push_back("temperature: must be positive");
  if (!(c.merge_epsilon >= 0)) errors.push_back("merge_epsilon: must be non-negative");
  positive(c.workers, "workers");
  if (!(c.predict_keep_fraction > 0 && c.predict_keep_fraction <= 1)) {
    errors.push_back("predict_keep_fraction: must lie in (0, 1]");
  }
  positive(c.max_retries, "max_retries");
  if (!(c.fast_mode_cap > 0)) errors.push_back("fast_mode_cap: must be positive");
  positive(c.checkpoint_every, "checkpoint_every");
  if (c.synthetic.space.dimension != c.synthetic.landscape.dimension) {
    errors.push_back("synthetic.landscape.dimension: must equal synthetic.space.dimension");
  }
  positive(c.synthetic.anchor_architectures, "synthetic.anchor_architectures");
  positive(c.llm.anchor_architectures, "llm.anchor_architectures");
  return errors;
}

ConfigParse parse_run_config(const json& doc) {
  ConfigParse out;
  if (!doc.is_object()) {
    out.errors.push_back("config: must be a JSON object");
    return out;
  }
  RunConfig c;
  for (const auto& [k, v] : doc.items()) {
    if (k == "synthetic") {
      parse_synthetic(v, c, out.errors);
      continue;
    }
    if (k == "llm") {
      parse_llm(v, c, out.errors);
      continue;
    }
    const auto it = setters().find(k);
    if (it == setters().end()) {
      out.errors.push_back(k + ": unknown key");
      continue;
    }
    try {
      it->second(v, c);
    } catch (const std::exception& e) {
      out.errors.push_back(k + ": " + e.what());
    }
  }
  // The synthetic space follows the retrieval counts unless it names its own.
  const json space = doc.contains("synthetic") && doc["synthetic"].is_object()
                         ? doc["synthetic"].value("space", json::object())
                         : json::object();
  if (!space.contains("retrieve_n_papers")) c.synthetic.space.retrieve_n_papers = c.retrieve_n_papers;
  if (!space.contains("retrieve_n_competitions")) {
    c.synthetic.space.retrieve_n_competitions = c.retrieve_n_competitions;
  }
  const auto more = validate_run_config(c);
  out.errors.insert(out.errors.end(), more.begin(), more.end());
  if (out.errors.empty()) out.config = std::move(c);
  return out;
}

RunConfig run_config_or_throw(const json& doc) {
  auto parsed = parse_run_config(doc);
  if (!parsed.config) {
    std::string msg;
    for (const auto& e : parsed.errors) msg += (msg.empty() ? "" : "; ") + e;
    throw Error(ErrorCode::kConfigInvalid, msg);
  }
  return std::move(*parsed.config);
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  json doc;
  try {
    doc = json::parse(ss.str());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("config: not valid JSON: ") + e.what());
  }
  return run_config_or_throw(doc);
}

json to_json(const RunConfig& c) {
  return {
      {"time_run_minutes", c.time_run_minutes},
      {"runtime_error_time", c.runtime_error_time},
      {"subset_size_in_percent", c.subset_size_in_percent},
      {"validator_size_threshold", c.validator_size_threshold},
      {"number_of_ideas_eda", c.number_of_ideas_eda},
      {"number_of_ideas_data", c.number_of_ideas_data},
      {"number_of_ideas_modelling", c.number_of_ideas_modelling},
      {"max_add_idea", c.max_add_idea},
      {"number_of_selected_node", c.number_of_selected_node},
      {"number_of_iterations_parents", c.number_of_iterations_parents},
      {"number_of_selected_node_merging", c.number_of_selected_node_merging},
      {"number_of_iterations_children", c.number_of_iterations_children},
      {"number_of_ideas_min", c.number_of_ideas_min},
      {"number_of_ideas_max", c.number_of_ideas_max},
      {"retrieve_n_papers", c.retrieve_n_papers},
      {"retrieve_n_competitions", c.retrieve_n_competitions},
      {"number_rag_ideas", c.number_rag_ideas},
      {"seed", c.seed},
      {"theta_fail", c.theta_fail},
      {"temperature", c.temperature},
      {"merge_epsilon", c.merge_epsilon},
      {"clock", to_string(c.clock)},
      {"workers", c.workers},
      {"merging", c.merging},
      {"debug_acceleration", c.debug_acceleration},
      {"predict_before_evaluate", c.predict_before_evaluate},
      {"predict_keep_fraction", c.predict_keep_fraction},
      {"max_retries", c.max_retries},
      {"max_regenerations", c.max_regenerations},
      {"fast_mode_cap", c.fast_mode_cap},
      {"memory_size", c.memory_size},
      {"memory_strategy", to_string(c.memory_strategy)},
      {"external_policy", to_string(c.external_policy)},
      {"expansion_mode", to_string(c.expansion_mode)},
      {"sample_top_mode", sample_top_name(c.sample_top_mode)},
      {"max_resplits", c.max_resplits},
      {"checkpoint_every", c.checkpoint_every},
      {"ports", c.ports == PortsMode::kSynthetic ? "synthetic" : "llm+subprocess"},
      {"synthetic",
       {{"space", to_json(c.synthetic.space)},
        {"coder", to_json(c.synthetic.coder)},
        {"landscape", to_json(c.synthetic.landscape)},
        {"metric",
         {{"name", c.synthetic.metric.name},
          {"direction", to_string(c.synthetic.metric.direction)}}},
        {"anchor_architectures", c.synthetic.anchor_architectures}}},
      {"llm",
       {{"endpoint", to_json(c.llm.endpoint)},
        {"subprocess", c.llm.subprocess},
        {"corpus_dir", c.llm.corpus_dir},
        {"predictor", c.llm.predictor},
        {"anchor_architectures", c.llm.anchor_architectures}}},
  };
}

}  // namespace ideatree
