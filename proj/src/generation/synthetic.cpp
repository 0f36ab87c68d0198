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


#include "ideatree/generation/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>

#include "ideatree/core/error.hpp"
#include "ideatree/core/signature.hpp"

namespace ideatree {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 6> kErrorClasses = {
    "KeyError", "ValueError", "IndexError", "TypeError", "MemoryError", "ShapeError"};
constexpr std::array<std::string_view, 8> kColumns = {
    "price", "age", "region", "target", "user_id", "date", "count", "label"};

std::string bug_message(std::size_t cls, std::string_view col, std::uint64_t n) {
  const std::string c(col);
  const std::string k = std::to_string(n);
  switch (cls) {
    case 0: return "column '" + c + "' not found in frame of " + k + " columns";
    case 1: return "could not convert '" + c + "' to float at row " + k;
    case 2: return "index " + k + " out of bounds for feature '" + c + "'";
    case 3: return "unsupported operand for '" + c + "' in step " + k;
    case 4: return "cannot allocate " + k + " MB for '" + c + "' matrix";
    default: return "shape mismatch: '" + c + "' has " + k + " rows";
  }
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

IdeaVector node_vector(const Node& n) {
  auto all = parse_all_idea_vectors(n.idea_text);
  if (all.empty()) {
    throw Error(ErrorCode::kUnparseableIdea, "node " + to_string(n.id) + " has no idea vector");
  }
  return std::move(all.back());
}

template <typename T>
T take(const json& j, const char* key, T fallback, std::set<std::string>& seen) {
  seen.insert(key);
  if (!j.contains(key)) return fallback;
  return j.at(key).get<T>();
}

void reject_unknown(const json& j, const std::set<std::string>& known, ErrorCode code,
                    std::string_view where) {
  for (const auto& [k, v] : j.items()) {
    if (!known.contains(k)) {
      throw Error(code, std::string(where) + ": unknown key '" + k + "'");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

void SpaceConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kInvalidSpaceConfig, what); };
  if (dimension == 0) bad("dimension must be positive");
  if (!finite_nonneg(proposal_sigma)) bad("proposal_sigma must be finite and >= 0");
  if (!finite_nonneg(local_sigma)) bad("local_sigma must be finite and >= 0");
  if (!finite_nonneg(merge_perturbation)) bad("merge_perturbation must be finite and >= 0");
  if (!(exploit_probability >= 0.0 && exploit_probability <= 1.0)) {
    bad("exploit_probability must lie in [0, 1]");
  }
}

SpaceConfig space_config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidSpaceConfig, "space must be an object");
  SpaceConfig c;
  std::set<std::string> seen;
  try {
    c.dimension = take<std::size_t>(j, "dimension", c.dimension, seen);
    c.proposal_sigma = take<double>(j, "proposal_sigma", c.proposal_sigma, seen);
    c.exploit_probability = take<double>(j, "exploit_probability", c.exploit_probability, seen);
    c.local_sigma = take<double>(j, "local_sigma", c.local_sigma, seen);
    c.merge_perturbation = take<double>(j, "merge_perturbation", c.merge_perturbation, seen);
    const auto rule = take<std::string>(j, "merge_rule", "midpoint", seen);
    if (rule == "midpoint") {
      c.merge_rule = MergeRule::kMidpoint;
    } else if (rule == "crossover") {
      c.merge_rule = MergeRule::kCrossover;
    } else {
      throw Error(ErrorCode::kInvalidSpaceConfig, "unknown merge_rule '" + rule + "'");
    }
    c.retrieve_n_papers = take<std::size_t>(j, "retrieve_n_papers", c.retrieve_n_papers, seen);
    c.retrieve_n_competitions =
        take<std::size_t>(j, "retrieve_n_competitions", c.retrieve_n_competitions, seen);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidSpaceConfig, e.what());
  }
  reject_unknown(j, seen, ErrorCode::kInvalidSpaceConfig, "space");
  c.validate();
  return c;
}

json to_json(const SpaceConfig& c) {
  return {{"dimension", c.dimension},
          {"proposal_sigma", c.proposal_sigma},
          {"exploit_probability", c.exploit_probability},
          {"local_sigma", c.local_sigma},
          {"merge_rule", c.merge_rule == MergeRule::kMidpoint ? "midpoint" : "crossover"},
          {"merge_perturbation", c.merge_perturbation},
          {"retrieve_n_papers", c.retrieve_n_papers},
          {"retrieve_n_competitions", c.retrieve_n_competitions}};
}

SyntheticGenerator::SyntheticGenerator(SpaceConfig config, std::uint64_t seed,
                                       const Retriever* retriever)
    : config_(config), retriever_(retriever), rng_(seed) {
  config_.validate();
}

std::vector<std::string> SyntheticGenerator::propose(std::string_view label, std::size_t n,
                                                     std::span<const MemoryExcerpt> memory,
                                                     NodeLevel level) {
  // Best scored excerpt of the requested level, lowest id on ties.
  std::optional<IdeaVector> best;
  std::optional<double> best_score;
  for (const auto& m : memory) {
    if (m.level != level || !m.score) continue;
    const auto v = parse_all_idea_vectors(m.idea_text);
    if (v.empty() || v.back().size() != config_.dimension) continue;
    if (!best_score || *m.score > *best_score) {
      best_score = m.score;
      best = v.back();
    }
  }
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool exploit = rng_.uniform() < config_.exploit_probability && best;
    IdeaVector v(config_.dimension);
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double z = rng_.normal();
      v[k] = exploit ? (*best)[k] + config_.local_sigma * z : config_.proposal_sigma * z;
    }
    out.push_back(format_idea_vector(label, v));
  }
  return out;
}

std::vector<std::string> SyntheticGenerator::propose_fe(const ContextState&, std::size_t n,
                                                        std::span<const MemoryExcerpt> memory) {
  return propose("fe", n, memory, NodeLevel::kFe);
}

std::vector<std::string> SyntheticGenerator::propose_mt(const Node&, const ContextState&,
                                                        std::size_t m,
                                                        std::span<const MemoryExcerpt> memory) {
  return propose("mt", m, memory, NodeLevel::kMt);
}

std::string SyntheticGenerator::merge(std::string_view label, const Node& a, const Node& b) {
  const IdeaVector va = node_vector(a);
  const IdeaVector vb = node_vector(b);
  if (va.size() != config_.dimension || vb.size() != config_.dimension) {
    throw Error(ErrorCode::kGeneratorFailure, "merge parents have the wrong dimension");
  }
  std::lock_guard lock(mu_);
  IdeaVector v(config_.dimension);
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double base = config_.merge_rule == MergeRule::kMidpoint
                            ? 0.5 * (va[k] + vb[k])
                            : (rng_.uniform() < 0.5 ? va[k] : vb[k]);
    v[k] = base + config_.merge_perturbation * rng_.normal();
  }
  return format_idea_vector(label, v);
}

std::string SyntheticGenerator::merge_fe(const Node& a, const Node& b, const ContextState&) {
  return merge("fe", a, b);
}

std::string SyntheticGenerator::merge_mt(const Node& a, const Node& b, const ContextState&) {
  return merge("mt", a, b);
}

std::optional<std::string> SyntheticGenerator::enrich_eda(const IdeationTree&,
                                                          const ContextState&) {
  std::lock_guard lock(mu_);
  const auto k = ++eda_findings_;
  const auto coord = rng_.below(config_.dimension);
  char buf[128];
  std::snprintf(buf, sizeof buf, "finding %llu: coordinate %llu has skew %.3f",
                static_cast<unsigned long long>(k), static_cast<unsigned long long>(coord),
                rng_.normal());
  return std::string(buf);
}

std::vector<std::string> SyntheticGenerator::query_external(const ContextState& ctx,
                                                            bool forced) {
  if (!retriever_) return {};
  if (!forced && ctx.count(ContextTag::kExternal) > 0) return {};
  const std::string query = ctx.render();
  std::vector<std::string> out;
  for (const auto& [source, k] :
       {std::pair{DocumentSource::kPapers, config_.retrieve_n_papers},
        std::pair{DocumentSource::kCompetitions, config_.retrieve_n_competitions}}) {
    for (const auto& d : retriever_->retrieve(query, k, source)) {
      out.push_back(d.title + ": " + d.body);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

void SyntheticCoderConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kInvalidSpaceConfig, what); };
  if (!(bug_probability >= 0.0 && bug_probability <= 1.0)) bad("bug_probability not in [0, 1]");
  if (!(fix_probability >= 0.0 && fix_probability <= 1.0)) bad("fix_probability not in [0, 1]");
  if (epochs == 0 || n_estimators == 0) bad("epochs and n_estimators must be positive");
}

SyntheticCoderConfig synthetic_coder_config_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidSpaceConfig, "coder must be an object");
  SyntheticCoderConfig c;
  std::set<std::string> seen;
  try {
    c.bug_probability = take<double>(j, "bug_probability", c.bug_probability, seen);
    c.max_bugs = take<std::size_t>(j, "max_bugs", c.max_bugs, seen);
    c.fix_probability = take<double>(j, "fix_probability", c.fix_probability, seen);
    c.epochs = take<std::uint64_t>(j, "epochs", c.epochs, seen);
    c.n_estimators = take<std::uint64_t>(j, "n_estimators", c.n_estimators, seen);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidSpaceConfig, e.what());
  }
  reject_unknown(j, seen, ErrorCode::kInvalidSpaceConfig, "coder");
  c.validate();
  return c;
}

json to_json(const SyntheticCoderConfig& c) {
  return {{"bug_probability", c.bug_probability},
          {"max_bugs", c.max_bugs},
          {"fix_probability", c.fix_probability},
          {"epochs", c.epochs},
          {"n_estimators", c.n_estimators}};
}

SyntheticCoder::SyntheticCoder(SyntheticCoderConfig config, std::uint64_t seed)
    : config_(config), seed_(seed) {
  config_.validate();
}

std::string SyntheticCoder::implement(const IdeationTree& tree, NodeId mt, const ContextState&,
                                      const std::map<std::uint64_t, std::string>& known_errors) {
  const Node& node = tree.node(mt);
  std::string code = "# synthetic pipeline for node " + to_string(mt) + "\n";
  if (node.parent) code += "# " + tree.node(*node.parent).idea_text + "\n";
  code += "# " + node.idea_text + "\n";
  code += "epochs=" + std::to_string(config_.epochs) + "\n";
  code += "n_estimators=" + std::to_string(config_.n_estimators) + "\n";
  code += "learning_rate=0.05\n";
  std::uint64_t call;
  {
    std::lock_guard lock(mu_);
    call = calls_[mt]++;
  }
  Rng rng(splitmix64(splitmix64(seed_ ^ 0xc0de) ^ splitmix64(mt.value)) + call);
  for (std::size_t i = 0; i < config_.max_bugs; ++i) {
    const bool present = rng.uniform() < config_.bug_probability;
    const auto cls = rng.below(kErrorClasses.size());
    const auto col = rng.below(kColumns.size());
    const auto n = 1 + rng.below(999);
    if (!present) continue;
    const std::string msg = bug_message(cls, kColumns[col], n);
    if (known_errors.contains(error_signature(kErrorClasses[cls], msg))) continue;
    code += "bug=" + std::string(kErrorClasses[cls]) + ": " + msg + "\n";
  }
  return code;
}

std::string SyntheticCoder::repair(const std::string& code, std::string_view,
                                   std::string_view) {
  const double u = static_cast<double>(splitmix64(fnv1a64(code, splitmix64(seed_))) >> 11) *
                   0x1.0p-53;
  if (u >= config_.fix_probability) return code;
  const auto first = code.find("\nbug=");
  if (first == std::string::npos) return code;
  const auto end = code.find('\n', first + 1);
  return code.substr(0, first + 1) + (end == std::string::npos ? "" : code.substr(end + 1));
}

std::optional<std::pair<std::string, std::string>> first_bug(std::string_view code) {
  std::size_t pos = 0;
  while (pos < code.size()) {
    const auto nl = code.find('\n', pos);
    const auto line = code.substr(pos, nl == std::string_view::npos ? code.npos : nl - pos);
    if (line.starts_with("bug=")) {
      const auto body = line.substr(4);
      const auto colon = body.find(": ");
      if (colon == std::string_view::npos) return std::pair{std::string(body), std::string()};
      return std::pair{std::string(body.substr(0, colon)), std::string(body.substr(colon + 2))};
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return std::nullopt;
}

}  // namespace ideatree
