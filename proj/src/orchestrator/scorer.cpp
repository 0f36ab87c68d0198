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


#include "ideatree/orchestrator/scorer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "ideatree/core/error.hpp"
#include "ideatree/core/signature.hpp"
#include "ideatree/search/selection.hpp"

namespace ideatree {

using nlohmann::json;

struct PipelineScorer::Job {
  NodeId id;
  std::string code;
  std::vector<DebugAttempt> attempts;
  std::vector<ErrorRecord> new_errors;
  std::optional<double> score;
  std::string failure;
  double cost = 0.0;
  std::size_t regenerations = 0;
  std::size_t full_evaluations = 0;
};

void ScorerOptions::validate() const {
  if (workers == 0) throw Error(ErrorCode::kConfigInvalid, "workers: must be positive");
  if (max_attempts == 0) throw Error(ErrorCode::kConfigInvalid, "max_attempts: must be positive");
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw Error(ErrorCode::kConfigInvalid, "keep_fraction: must lie in (0, 1]");
  }
}

PipelineScorer::PipelineScorer(Coder& coder, EvaluationPort& port, Clock& clock,
                               MetricSpec metric, ScorerOptions options,
                               std::vector<NamedCheck> checks)
    : coder_(coder),
      port_(port),
      clock_(clock),
      metric_(std::move(metric)),
      options_(std::move(options)),
      checks_(std::move(checks)) {
  options_.validate();
}

void PipelineScorer::enable_prediction(Predictor& predictor, const AnchorSet& anchors,
                                       std::string dataset_description) {
  if (anchors.empty()) throw Error(ErrorCode::kEmptyAnchorSet, "prediction needs anchors");
  predictor_ = &predictor;
  anchors_ = &anchors;
  dataset_description_ = std::move(dataset_description);
}

void PipelineScorer::disable_prediction() {
  predictor_ = nullptr;
  anchors_ = nullptr;
}

std::vector<NodeId> PipelineScorer::prune(TreeEditor& editor, std::vector<NodeId> ids) {
  if (!predictor_ || ids.size() < 2) return ids;
  std::vector<NodeId> kept;
  std::vector<std::pair<double, NodeId>> ranked;
  for (const NodeId id : ids) {
    try {
      const double p = predictor_->predict(pipeline_description(editor.tree(), id), *anchors_,
                                           dataset_description_);
      editor.set_predicted(id, p);
      ranked.emplace_back(orient(p, metric_.direction).value, id);
    } catch (const std::exception&) {
      // Without a prediction the node is evaluated.
      kept.push_back(id);
    }
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  const auto keep = static_cast<std::size_t>(
      std::ceil(options_.keep_fraction * static_cast<double>(ranked.size())));
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (i < keep) {
      kept.push_back(ranked[i].second);
    } else {
      ++stats_.pruned;
    }
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

void PipelineScorer::run_job(const IdeationTree& tree, const ContextState& ctx, Job& job) const {
  ErrorLog local = errors_;
  const std::size_t base = local.size();
  const Fixer fixer = [this](const std::string& code, const FailureReport& f) {
    return coder_.repair(code, f.error_class, f.message);
  };
  auto describe = [](const DebugResult& r) {
    for (auto it = r.attempts.rbegin(); it != r.attempts.rend(); ++it) {
      if (it->failure) return it->failure->error_class + ": " + it->failure->message;
    }
    return std::string("EvaluationFailure: no successful attempt");
  };
  try {
    // Known errors are shown to the coder only when it regenerates after a
    // recurring error; first implementations start from a clean slate.
    job.code = coder_.implement(tree, job.id, ctx, {});
    for (std::size_t regen = 0;; ++regen) {
      if (!options_.debug_acceleration) {
        DebugResult r =
            unaccelerated_loop(tree, job.id, job.code, port_, fixer, options_.max_attempts, local);
        job.cost += r.cost;
        job.code = r.code;
        job.attempts.insert(job.attempts.end(), r.attempts.begin(), r.attempts.end());
        if (r.outcome == DebugResult::Outcome::kDebuggedOk && r.score) {
          job.score = r.score;
        } else {
          job.failure = describe(r);
        }
        break;
      }
      DebugResult r = debug_loop(tree, job.id, job.code, port_, fixer, options_.fast_mode,
                                 options_.max_attempts, local);
      job.cost += r.cost;
      job.code = r.code;
      job.attempts.insert(job.attempts.end(), r.attempts.begin(), r.attempts.end());
      if (r.outcome == DebugResult::Outcome::kDebuggedOk) {
        const EvalOutcome full = port_.evaluate({&tree, job.id, job.code, EvalMode::kFull, 1.0});
        job.cost += full.cost;
        ++job.full_evaluations;
        if (full.ok()) {
          job.score = full.score;
        } else {
          const FailureReport f = full.failure.value_or(FailureReport{});
          job.failure = f.error_class + ": " + f.message;
        }
        break;
      }
      if (r.outcome == DebugResult::Outcome::kRegenerate && regen < options_.max_regenerations) {
        job.code = coder_.implement(tree, job.id, ctx, local.known_errors());
        ++job.regenerations;
        continue;
      }
      job.failure = describe(r);
      break;
    }
  } catch (const std::exception& e) {
    job.failure = std::string(dynamic_cast<const Error*>(&e)
                                  ? to_string(static_cast<const Error&>(e).code())
                                  : "Exception") +
                  ": " + e.what();
  }
  job.new_errors.assign(local.records().begin() + static_cast<std::ptrdiff_t>(base),
                        local.records().end());
}

void PipelineScorer::score(TreeEditor& editor, const ContextState& ctx,
                           std::span<const NodeId> mts) {
  std::vector<NodeId> ids(mts.begin(), mts.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  std::vector<NodeId> passed;
  for (const NodeId id : ids) {
    const CheckResult c = check(editor.tree().node(id).idea_text, checks_);
    if (c.passed) {
      passed.push_back(id);
      continue;
    }
    std::string reasons;
    for (const auto& r : c.reasons) reasons += (reasons.empty() ? "" : "; ") + r;
    editor.set_failed(id, "CheckFailed: " + reasons);
    ++stats_.checked_out;
    ++stats_.failed;
  }

  std::vector<Job> jobs;
  for (const NodeId id : prune(editor, std::move(passed))) {
    jobs.emplace_back();
    jobs.back().id = id;
  }

  const IdeationTree& tree = editor.tree();
  const std::size_t workers = std::min(options_.workers, jobs.size());
  if (workers <= 1) {
    for (Job& job : jobs) run_job(tree, ctx, job);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) run_job(tree, ctx, jobs[i]);
      });
    }
  }

  for (Job& job : jobs) {
    clock_.charge(job.cost);
    for (auto& r : job.new_errors) errors_.append(std::move(r));
    for (std::size_t i = 0; i < job.attempts.size(); ++i) {
      const DebugAttempt& a = job.attempts[i];
      json payload = {{"node", job.id.value},
                      {"attempt", i + 1},
                      {"mode", to_string(a.mode)},
                      {"ok", a.ok},
                      {"cost", a.cost},
                      {"capped", a.capped}};
      if (a.failure) {
        payload["error_class"] = a.failure->error_class;
        payload["message"] = a.failure->message;
      }
      editor.emit(event::kDebugAttempt, std::move(payload));
      if (a.mode == EvalMode::kDebug) {
        ++stats_.debug_evaluations;
      } else {
        ++stats_.full_evaluations;
      }
    }
    stats_.full_evaluations += job.full_evaluations;
    stats_.regenerations += job.regenerations;
    if (!job.code.empty()) editor.set_code(job.id, std::move(job.code));
    if (job.score) {
      editor.set_evaluated(job.id, *job.score);
      ++stats_.evaluated;
    } else {
      editor.set_failed(job.id, job.failure);
      ++stats_.failed;
    }
  }
}

}  // namespace ideatree
