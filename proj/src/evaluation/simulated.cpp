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


#include "ideatree/evaluation/simulated.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "ideatree/core/rng.hpp"
#include "ideatree/generation/idea_vector.hpp"
#include "ideatree/generation/synthetic.hpp"

namespace ideatree {

namespace {

using nlohmann::json;

IdeaVector vector_of(const Node& n) {
  auto all = parse_all_idea_vectors(n.idea_text);
  if (all.empty()) {
    throw Error(ErrorCode::kUnparseableIdea, "node " + to_string(n.id) + ": '" +
                                                 n.idea_text.substr(0, 60) + "'");
  }
  return std::move(all.back());
}

// Standard normal from two hashed uniforms.
double hashed_normal(std::uint64_t key) {
  const std::uint64_t a = splitmix64(key);
  const std::uint64_t b = splitmix64(a);
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

void LandscapeConfig::validate() const {
  auto bad = [](const std::string& what) {
    throw Error(ErrorCode::kConfigInvalid, "landscape: " + what);
  };
  if (dimension == 0) bad("dimension must be positive");
  if (!optimum.empty() && optimum.size() != dimension) bad("optimum has the wrong dimension");
  for (double x : optimum) {
    if (!std::isfinite(x)) bad("optimum must be finite");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) bad("noise_sigma must be >= 0");
  if (!(full_cost > 0.0) || !(debug_cost > 0.0)) bad("costs must be positive");
  if (!(debug_cost < full_cost)) bad("debug_cost must be below full_cost");
  if (!std::isfinite(merge_bonus)) bad("merge_bonus must be finite");
}

std::vector<double> LandscapeConfig::optimum_or_origin() const {
  return optimum.empty() ? std::vector<double>(dimension, 0.0) : optimum;
}

LandscapeConfig landscape_config_from_json(const json& j) {
  static const std::set<std::string> kKeys = {"dimension",  "optimum",   "noise_sigma",
                                              "full_cost",  "debug_cost", "merge_bonus"};
  if (!j.is_object()) throw Error(ErrorCode::kConfigInvalid, "landscape: must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!kKeys.contains(k)) {
      throw Error(ErrorCode::kConfigInvalid, "landscape: unknown key '" + k + "'");
    }
  }
  LandscapeConfig c;
  try {
    c.dimension = j.value("dimension", c.dimension);
    c.optimum = j.value("optimum", c.optimum);
    c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
    c.full_cost = j.value("full_cost", c.full_cost);
    c.debug_cost = j.value("debug_cost", c.debug_cost);
    c.merge_bonus = j.value("merge_bonus", c.merge_bonus);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigInvalid, std::string("landscape: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const LandscapeConfig& c) {
  return {{"dimension", c.dimension},   {"optimum", c.optimum},
          {"noise_sigma", c.noise_sigma}, {"full_cost", c.full_cost},
          {"debug_cost", c.debug_cost}, {"merge_bonus", c.merge_bonus}};
}

SimulatedEvaluator::SimulatedEvaluator(LandscapeConfig config, MetricSpec metric,
                                       std::uint64_t seed)
    : config_(std::move(config)), metric_(std::move(metric)), seed_(seed) {
  config_.validate();
  optimum_ = config_.optimum_or_origin();
}

double SimulatedEvaluator::sq_dist(std::span<const double> v) const {
  if (v.size() != optimum_.size()) {
    throw Error(ErrorCode::kUnparseableIdea, "idea vector has dimension " +
                                                 std::to_string(v.size()) + ", landscape " +
                                                 std::to_string(optimum_.size()));
  }
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) d += (v[i] - optimum_[i]) * (v[i] - optimum_[i]);
  return d;
}

double SimulatedEvaluator::bonus(const IdeationTree& tree, const Node& n) const {
  if (n.provenance.kind != Provenance::Kind::kMerged || config_.merge_bonus == 0.0) return 0.0;
  double mean = 0.0;
  for (const NodeId src : n.provenance.sources) mean += sq_dist(vector_of(tree.node(src)));
  mean /= static_cast<double>(n.provenance.sources.size());
  return config_.merge_bonus / (1.0 + mean);
}

double SimulatedEvaluator::value(const IdeationTree& tree, NodeId id) const {
  const Node& mt = tree.node(id);
  if (mt.level != NodeLevel::kMt || !mt.parent) {
    throw Error(ErrorCode::kUnparseableIdea, "node " + to_string(id) + " is not an MT node");
  }
  const Node& fe = tree.node(*mt.parent);
  return -(sq_dist(vector_of(fe)) + sq_dist(vector_of(mt))) + bonus(tree, fe) + bonus(tree, mt);
}

double SimulatedEvaluator::true_score(const IdeationTree& tree, NodeId mt) const {
  const double v = value(tree, mt);
  return metric_.direction == Direction::kHigherBetter ? v : -v;
}

double SimulatedEvaluator::true_score(std::span<const double> fe,
                                      std::span<const double> mt) const {
  const double v = -(sq_dist(fe) + sq_dist(mt));
  return metric_.direction == Direction::kHigherBetter ? v : -v;
}

EvalOutcome SimulatedEvaluator::evaluate(const EvalRequest& request) {
  EvalOutcome out;
  out.cost = request.mode == EvalMode::kFull ? config_.full_cost : config_.debug_cost;
  if (auto bug = first_bug(request.code)) {
    out.failure = FailureReport{ErrorCode::kNonzeroExit, bug->first, bug->second,
                                "Traceback (most recent call last):\n" + bug->first + ": " +
                                    bug->second + "\n"};
    return out;
  }
  double v;
  try {
    v = value(*request.tree, request.node);
  } catch (const Error& e) {
    out.failure = FailureReport{e.code(), std::string(to_string(e.code())), e.what(), ""};
    return out;
  }
  const std::uint64_t key =
      splitmix64(seed_ ^ splitmix64(request.node.value)) ^
      (request.mode == EvalMode::kFull ? 0 : 0xdeb6deb6deb6deb6ULL);
  v += config_.noise_sigma * hashed_normal(key);
  out.score = metric_.direction == Direction::kHigherBetter ? v : -v;
  return out;
}

}  // namespace ideatree
