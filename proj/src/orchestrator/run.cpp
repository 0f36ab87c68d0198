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


#include "ideatree/orchestrator/run.hpp"

#include <cstdio>
#include <fstream>
#include <limits>

#include "ideatree/core/error.hpp"
#include "ideatree/core/rng.hpp"
#include "ideatree/evaluation/simulated.hpp"
#include "ideatree/evaluation/subprocess.hpp"
#include "ideatree/generation/llm_generator.hpp"
#include "ideatree/generation/synthetic.hpp"
#include "ideatree/search/selection.hpp"
#include "ideatree/search/stages.hpp"

namespace ideatree {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename F>
auto generate(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kGeneratorFailure) throw;
    throw Error(ErrorCode::kGeneratorFailure, std::string(to_string(e.code())) + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kGeneratorFailure, e.what());
  }
}

NodeId add_node(TreeEditor& editor, NodeId parent, NodeLevel level, std::string text) {
  Node n;
  n.level = level;
  n.idea_text = std::move(text);
  n.created_iteration = editor.tree().iteration();
  return editor.add_node(parent, std::move(n));
}

std::optional<NodeId> best_fe(const IdeationTree& tree, const MetricSpec& metric) {
  std::optional<NodeId> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const NodeId id : tree.ids_at(NodeLevel::kFe)) {
    const auto& agg = tree.node(id).aggregated_score;
    if (!agg) continue;
    const double s = orient(*agg, metric.direction).value;
    if (!best || s > best_score) {
      best = id;
      best_score = s;
    }
  }
  return best;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(); }

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
}

}  // namespace

std::unique_ptr<Clock> make_clock(ClockMode mode) {
  if (mode == ClockMode::kWall) return std::make_unique<WallClock>();
  return std::make_unique<SimulatedClock>();
}

SetupResult synthetic_setup(const RunConfig& config, RunLog* log) {
  SetupResult r;
  r.task.description = "Synthetic landscape: minimize the distance of the pipeline idea vector "
                       "to a hidden optimum.";
  r.task.metric_name = config.synthetic.metric.name;
  r.task.direction = config.synthetic.metric.direction;
  r.metric.metric = config.synthetic.metric;
  r.split.strategy = "holdout";
  r.validator_runs = 0;
  if (log) log->append(event::kSetupCompleted, to_json(r));
  return r;
}

PortBundle make_ports(const RunConfig& config, const SetupResult& setup,
                      const fs::path& scratch_dir) {
  PortBundle b;
  const std::uint64_t seed = config.seed;
  if (config.ports == PortsMode::kSynthetic) {
    const auto& s = config.synthetic;
    b.embedder = std::make_unique<IdeaVectorEmbedder>();
    b.generator = std::make_unique<SyntheticGenerator>(s.space, splitmix64(seed ^ 0x6e6e));
    b.coder = std::make_unique<SyntheticCoder>(s.coder, splitmix64(seed ^ 0xc0c0));
    b.evaluator = std::make_unique<SimulatedEvaluator>(s.landscape, s.metric, splitmix64(seed));
    b.predictor = std::make_unique<BaselinePredictor>(*b.embedder);
    b.checks = {nonblank_check(), idea_vector_check(s.space.dimension)};
    b.anchor_architectures = s.anchor_architectures;
    return b;
  }
  const auto& l = config.llm;
  b.embedder = std::make_unique<HashingEmbedder>();
  if (!l.corpus_dir.empty()) {
    b.retriever = std::make_unique<FileCorpusRetriever>(l.corpus_dir, *b.embedder);
  }
  b.generator = std::make_unique<LlmGenerator>(
      l.endpoint, b.retriever.get(),
      ExternalKnowledgeConfig{config.retrieve_n_papers, config.retrieve_n_competitions,
                              config.number_rag_ideas});
  b.coder = std::make_unique<LlmCoder>(l.endpoint);
  json sub = l.subprocess.is_object() ? l.subprocess : json::object();
  if (!sub.contains("data_dir")) sub["data_dir"] = setup.task.dataset_dir.string();
  if (!sub.contains("scratch_dir")) sub["scratch_dir"] = scratch_dir.string();
  if (!sub.contains("full_timeout_minutes")) sub["full_timeout_minutes"] = config.runtime_error_time;
  if (!sub.contains("debug_timeout_minutes")) {
    sub["debug_timeout_minutes"] = config.runtime_error_time;
  }
  if (!sub.contains("submission_columns")) {
    sub["submission_columns"] = setup.metric.submission_columns;
  }
  b.evaluator = std::make_unique<SubprocessEvaluator>(subprocess_config_from_json(sub));
  if (l.predictor == "llm") {
    b.predictor = std::make_unique<LlmPredictor>(l.endpoint);
  } else {
    b.predictor = std::make_unique<BaselinePredictor>(*b.embedder);
  }
  b.checks = {nonblank_check()};
  b.anchor_architectures = l.anchor_architectures;
  return b;
}

void initialize_tree(TreeEditor& editor, ContextState& ctx, IdeaGenerator& generator,
                     BatchScorer& scorer, const RunConfig& config) {
  editor.record_root();
  const IdeationTree& tree = editor.tree();
  for (std::size_t i = 0; i < config.number_of_ideas_eda; ++i) {
    const auto finding = generate([&] { return generator.enrich_eda(tree, ctx); });
    if (!finding || finding->empty()) break;
    ctx.append(ContextTag::kEda, *finding);
    editor.emit(event::kContextAppended,
                {{"tag", "EDA"}, {"text", *finding}, {"revision", ctx.revision()}});
  }
  const auto fe_texts =
      generate([&] { return generator.propose_fe(ctx, config.number_of_ideas_data, {}); });
  if (fe_texts.size() != config.number_of_ideas_data) {
    throw Error(ErrorCode::kGeneratorFailure, "propose_fe returned " +
                                                  std::to_string(fe_texts.size()) + " ideas");
  }
  std::vector<NodeId> mts;
  for (const auto& text : fe_texts) {
    const NodeId fe = add_node(editor, tree.root_id(), NodeLevel::kFe, text);
    const auto mt_texts = generate([&] {
      return generator.propose_mt(tree.node(fe), ctx, config.number_of_ideas_modelling, {});
    });
    if (mt_texts.size() != config.number_of_ideas_modelling) {
      throw Error(ErrorCode::kGeneratorFailure, "propose_mt returned " +
                                                    std::to_string(mt_texts.size()) + " ideas");
    }
    for (const auto& t : mt_texts) mts.push_back(add_node(editor, fe, NodeLevel::kMt, t));
  }
  scorer.score(editor, ctx, mts);
  editor.backpropagate();
  for (const NodeId id : mts) {
    if (tree.node(id).status == NodeStatus::kEvaluated) return;
  }
  throw Error(ErrorCode::kInitializationFailure,
              "none of the " + std::to_string(mts.size()) + " initial pipelines evaluated");
}

std::optional<NodeId> best_node(const IdeationTree& tree, const MetricSpec& metric) {
  std::optional<NodeId> best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const NodeId id : tree.ids_at(NodeLevel::kMt)) {
    const Node& n = tree.node(id);
    if (n.status != NodeStatus::kEvaluated || !n.raw_score) continue;
    const double s = orient(*n.raw_score, metric.direction).value;
    if (!best || s > best_score) {
      best = id;
      best_score = s;
    }
  }
  return best;
}

json to_json(const RunResult& r) {
  return {{"best", r.best ? json(r.best->value) : json()},
          {"best_score", optional_json(r.best_score)},
          {"passes", r.passes},
          {"elapsed", r.elapsed}};
}

RunResult run_main_loop(LoopEnv& env, const RunConfig& config, Rng& rng) {
  const double budget = config.time_run_minutes;
  auto exhausted = [&] { return env.clock.now() >= budget; };
  StageEnv stage_env{env.editor, env.ctx,    env.generator, env.scorer,
                     env.embedder, env.metric, exhausted};
  const StageParams params = config.stage_params();
  auto checkpoint = [&](const std::string& stage) {
    if (env.checkpoint) env.checkpoint(env.editor.tree(), stage);
  };
  auto failed = [&](const char* stage, const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    env.editor.emit(event::kStageFailed,
                    {{"stage", stage},
                     {"iteration", env.editor.tree().iteration()},
                     {"code", err ? std::string(to_string(err->code())) : "Exception"},
                     {"message", e.what()}});
  };

  RunResult result;
  for (std::uint64_t pass = env.editor.tree().iteration() + 1; !exhausted(); ++pass) {
    env.editor.set_iteration(pass);
    bool complete = true;
    try {
      complete = !adding_stage(stage_env, params, rng).budget_exhausted;
    } catch (const std::exception& e) {
      failed("adding", e);
      complete = false;
    }
    checkpoint("adding");
    if (config.merging) {
      if (exhausted()) break;
      try {
        complete = !merging_stage(stage_env, env.memory, params, rng).budget_exhausted && complete;
      } catch (const std::exception& e) {
        failed("merging", e);
        complete = false;
      }
      checkpoint("merging");
    }
    if (complete) ++result.passes;
  }

  const IdeationTree& tree = env.editor.tree();
  result.best = best_node(tree, env.metric);
  if (result.best) result.best_score = tree.node(*result.best).raw_score;
  result.elapsed = env.clock.now();
  checkpoint("final");
  json finished = to_json(result);
  finished["metric"] = {{"name", env.metric.name}, {"direction", to_string(env.metric.direction)}};
  env.editor.emit(event::kRunFinished, std::move(finished));
  return result;
}

IdeationTree replay(const std::vector<json>& records) {
  if (records.empty() || records.front().value("type", "") != event::kLogHeader) {
    throw Error(ErrorCode::kCorruptLog, "log does not start with a header");
  }
  if (records.front().value("log_version", -1) != kLogVersion) {
    throw Error(ErrorCode::kLogVersionMismatch,
                "log version " + records.front().value("log_version", json()).dump() +
                    ", engine expects " + std::to_string(kLogVersion));
  }
  bool finished = false;
  for (const auto& r : records) finished = finished || r.value("type", "") == event::kRunFinished;
  if (!finished) throw Error(ErrorCode::kCorruptLog, "log has no RunFinished record (truncated?)");
  return apply_journal(records);
}

RunOutcome execute_run(const RunConfig& config, const RunOptions& options) {
  if (const auto errors = validate_run_config(config); !errors.empty()) {
    std::string msg;
    for (const auto& e : errors) msg += (msg.empty() ? "" : "; ") + e;
    throw Error(ErrorCode::kConfigInvalid, msg);
  }
  if (config.ports == PortsMode::kLlm && !options.dataset) {
    throw Error(ErrorCode::kConfigInvalid, "ports: llm+subprocess runs need a dataset directory");
  }

  const auto clock = make_clock(config.clock);
  RunLog log([&clock] { return clock->now(); });
  fs::path scratch = fs::temp_directory_path() / "ideatree-scratch";
  if (options.out_dir) {
    fs::create_directories(*options.out_dir / "checkpoints");
    write_file(*options.out_dir / "config.json", to_json(config).dump(2) + "\n");
    log.attach_file(*options.out_dir / "run.log.jsonl");
    scratch = *options.out_dir / "scratch";
  }
  log.append(event::kRunStarted,
             {{"config", to_json(config)},
              {"dataset", options.dataset ? json(options.dataset->string()) : json()}});

  RunOutcome out;
  if (options.dataset) {
    FileReader reader;
    DeclaredMetric metric;
    HoldoutValidator validator;
    RowCountBaseliner baseliner;
    out.setup = pipeline_setup(*options.dataset, {reader, metric, validator, baseliner},
                               config.max_resplits, config.validator_size_threshold, &log);
  } else {
    out.setup = synthetic_setup(config, &log);
  }
  const MetricSpec metric =
      config.ports == PortsMode::kSynthetic ? config.synthetic.metric : out.setup.metric.metric;

  PortBundle ports = make_ports(config, out.setup, scratch);
  ScorerOptions scorer_options;
  scorer_options.workers = config.workers;
  scorer_options.debug_acceleration = config.debug_acceleration;
  scorer_options.fast_mode = config.fast_mode();
  scorer_options.max_attempts = config.max_retries;
  scorer_options.max_regenerations = config.max_regenerations;
  scorer_options.keep_fraction = config.predict_keep_fraction;
  PipelineScorer scorer(*ports.coder, *ports.evaluator, *clock, metric, scorer_options,
                        ports.checks);

  IdeationTree tree;
  TreeEditor editor(tree, &log);
  ContextState ctx;
  if (!out.setup.task.description.empty()) {
    ctx.append(ContextTag::kReader, out.setup.task.description);
    editor.emit(event::kContextAppended, {{"tag", "Reader"},
                                          {"text", out.setup.task.description},
                                          {"revision", ctx.revision()}});
  }

  std::size_t stages_seen = 0;
  std::size_t checkpoints = 0;
  CheckpointHook checkpoint = [&](const IdeationTree& t, const std::string& stage) {
    const bool last = stage == "final";
    if (!last && stage != "initialization" && ++stages_seen % config.checkpoint_every != 0) {
      return;
    }
    const std::string doc = snapshot(t);
    json payload = {{"stage", stage},
                    {"index", checkpoints},
                    {"iteration", t.iteration()},
                    {"digest", hex64(fnv1a64(doc))}};
    if (const auto b = best_node(t, metric)) {
      payload["best"] = b->value;
      payload["best_oriented_score"] = orient(*t.node(*b).raw_score, metric.direction).value;
    }
    if (options.out_dir) {
      char name[64];
      std::snprintf(name, sizeof name, "%04zu-%s.json", checkpoints, stage.c_str());
      const fs::path path = *options.out_dir / "checkpoints" / (last ? "final.json" : name);
      write_file(path, doc);
      payload["path"] = fs::relative(path, *options.out_dir).string();
    }
    ++checkpoints;
    log.append(event::kCheckpointWritten, std::move(payload));
    log.flush();
  };

  try {
    initialize_tree(editor, ctx, *ports.generator, scorer, config);
  } catch (...) {
    log.flush();
    throw;
  }
  checkpoint(tree, "initialization");

  AnchorSet anchors;
  if (config.predict_before_evaluate && ports.predictor) {
    try {
      const auto fe = best_fe(tree, metric);
      if (!fe) throw Error(ErrorCode::kNoFeNodes, "no FE node with an aggregate");
      const auto architectures = generate([&] {
        return ports.generator->propose_mt(tree.node(*fe), ctx, ports.anchor_architectures, {});
      });
      anchors = build_anchor_set(editor, scorer, ctx, architectures, metric,
                                 {config.number_of_ideas_min, config.number_of_ideas_max});
      scorer.enable_prediction(*ports.predictor, anchors, out.setup.task.description);
    } catch (const std::exception& e) {
      const auto* err = dynamic_cast<const Error*>(&e);
      editor.emit(event::kStageFailed,
                  {{"stage", "anchors"},
                   {"iteration", tree.iteration()},
                   {"code", err ? std::string(to_string(err->code())) : "Exception"},
                   {"message", e.what()}});
    }
  }

  MergeMemory memory(config.theta_fail);
  Rng rng(config.seed);
  LoopEnv env{editor, ctx, *ports.generator, scorer, *ports.embedder, memory, *clock, metric,
              checkpoint};
  out.result = run_main_loop(env, config, rng);
  log.flush();

  out.final_snapshot = snapshot(tree);
  out.log = log.records();
  out.scorer_stats = scorer.stats();
  out.memory = memory.to_json();
  if (options.out_dir) {
    json final_doc = to_json(out.result);
    final_doc["metric"] = {{"name", metric.name}, {"direction", to_string(metric.direction)}};
    if (out.result.best) {
      const auto& code = tree.node(*out.result.best).code_artifact;
      write_file(*options.out_dir / "best_artifact.txt", code.value_or(""));
      final_doc["artifact"] = "best_artifact.txt";
    }
    final_doc["checkpoint"] = "checkpoints/final.json";
    write_file(*options.out_dir / "final.json", final_doc.dump(2) + "\n");
  }
  return out;
}

}  // namespace ideatree
