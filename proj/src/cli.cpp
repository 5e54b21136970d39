/*
 * Copyright 2026 The GraphReview Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "graphreview/cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <limits>

#include "graphreview/aggregate.hpp"
#include "graphreview/corpus.hpp"
#include "graphreview/driver.hpp"
#include "graphreview/error.hpp"
#include "graphreview/metrics.hpp"
#include "graphreview/report.hpp"
#include "graphreview/riml.hpp"
#include "graphreview/signals.hpp"

namespace graphreview {

using util::Json;

namespace {

struct CorpusFlags {
  std::string papers;
  std::string embeddings;
  std::string labels;
  std::size_t truncation = kDefaultTruncationLimit;
};

struct BackendFlags {
  std::string kind = "oracle";
  std::string endpoint;
  std::string model = "default";
  std::string replay;
  std::string prompt_dir;
  std::string cache_dir;
  double flip_probability = 0.0;
  double score_noise = 0.0;
  double anchor_sigma = 1.0;
  int top_logprobs = 0;
  int retries = 3;
};

struct RunFlags {
  std::string mode = "deployment";
  int fixed_t = 5;
  double epsilon_improve = 0.01;
  int patience = 3;
  int max_rounds = 0;
  double lambda = kDefaultLambda;
  double gamma = kDefaultGamma;
  std::string metric = "spearman";
  std::string edge_policy = "both";
  std::string solver = "greedy";
  std::size_t in_flight = 8;
};

void add_corpus_flags(CLI::App* cmd, CorpusFlags& f, bool required) {
  auto* p = cmd->add_option("--papers", f.papers, "Papers file (JSONL: id, role, venue, year, text)");
  auto* e = cmd->add_option("--embeddings", f.embeddings, "Embeddings file (JSONL: paper_id, vector)");
  if (required) {
    p->required();
    e->required();
  }
  cmd->add_option("--labels", f.labels, "Labels file (JSONL: paper_id, score)");
  cmd->add_option("--truncate", f.truncation, "Character cap applied to paper text")
      ->capture_default_str();
}

void add_backend_flags(CLI::App* cmd, BackendFlags& f) {
  cmd->add_option("--backend", f.kind, "oracle | remote | replay")
      ->check(CLI::IsMember({"oracle", "remote", "replay"}))
      ->capture_default_str();
  cmd->add_option("--endpoint", f.endpoint, "Chat-completion URL for the remote backend");
  cmd->add_option("--model", f.model, "Model name sent to the remote backend")->capture_default_str();
  cmd->add_option("--replay", f.replay, "Recorded responses for the replay backend");
  cmd->add_option("--prompt-dir", f.prompt_dir, "Directory of prompt template overrides");
  cmd->add_option("--cache-dir", f.cache_dir, "Response cache directory");
  cmd->add_option("--flip-prob", f.flip_probability, "Oracle comparison flip probability")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--score-noise", f.score_noise, "Oracle Gaussian score noise (sigma)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--anchor-sigma", f.anchor_sigma, "Oracle anchor softening width; 0 interpolates")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--top-logprobs", f.top_logprobs, "Request first-token alternatives (remote)");
  cmd->add_option("--retries", f.retries, "Remote attempts before giving up")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--mode", f.mode, "evaluation | deployment")
      ->check(CLI::IsMember({"evaluation", "deployment"}))
      ->capture_default_str();
  cmd->add_option("--fixed-t", f.fixed_t, "Rounds in deployment mode")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--epsilon-improve", f.epsilon_improve, "Minimum eta improvement")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--patience", f.patience, "Rounds without improvement before stopping")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--max-rounds", f.max_rounds, "Hard cap on evaluation rounds (0 = none)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--lambda", f.lambda, "PPR damping factor")->capture_default_str();
  cmd->add_option("--gamma", f.gamma, "Acceptance rate")->capture_default_str();
  cmd->add_option("--metric", f.metric, "Performance metric for eta")->capture_default_str();
  cmd->add_option("--edge-policy", f.edge_policy, "both | synchronic | diachronic")
      ->check(CLI::IsMember({"both", "synchronic", "diachronic"}))
      ->capture_default_str();
  cmd->add_option("--solver", f.solver, "greedy | exact")
      ->check(CLI::IsMember({"greedy", "exact"}))
      ->capture_default_str();
  cmd->add_option("--in-flight", f.in_flight, "Concurrent backend calls")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

Corpus load(const CorpusFlags& f) {
  CorpusPaths paths{f.papers, f.embeddings, std::nullopt};
  if (!f.labels.empty()) paths.labels = f.labels;
  return load_corpus(paths, f.truncation);
}

BackendConfig backend_config(const BackendFlags& f, std::uint64_t seed) {
  BackendConfig c;
  c.kind = parse_backend_kind(f.kind);
  c.endpoint = f.endpoint;
  c.model = f.model;
  if (const char* key = std::getenv("GRAPHREVIEW_API_KEY")) c.api_key = key;
  c.replay_path = f.replay;
  if (c.kind == BackendKind::kReplay && f.replay.empty()) {
    throw Error(ErrorCode::kInvalidParam, "replay backend requires --replay");
  }
  if (!f.prompt_dir.empty()) c.prompt_dir = f.prompt_dir;
  if (!f.cache_dir.empty()) c.cache_dir = f.cache_dir;
  c.noise.flip_probability = f.flip_probability;
  c.noise.score_sigma = f.score_noise;
  c.noise.anchor_sigma = f.anchor_sigma;
  c.seed = seed;
  c.retry.attempts = f.retries;
  c.top_logprobs = f.top_logprobs;
  return c;
}

RunConfig run_config(const RunFlags& f, std::uint64_t seed) {
  RunConfig c;
  c.mode = parse_run_mode(f.mode);
  c.fixed_t = f.fixed_t;
  c.epsilon_improve = f.epsilon_improve;
  c.patience_max = f.patience;
  c.max_rounds = f.max_rounds;
  c.lambda = f.lambda;
  c.gamma = f.gamma;
  c.metric = f.metric;
  c.seed = seed;
  c.edge_policy = parse_edge_policy(f.edge_policy);
  c.solver = f.solver == "exact" ? SolverMode::kExact : SolverMode::kGreedy;
  c.max_in_flight = f.in_flight;
  return c;
}

void print(const Json& j) { std::cout << j.dump() << std::endl; }

void write_reports_for(const Corpus& corpus, const RunResult& result, const BackendConfig& bc,
                       std::size_t in_flight, const std::filesystem::path& dir) {
  const PromptSet prompts = load_prompts(bc);
  std::shared_ptr<ChatTransport> transport = make_transport(bc);
  const auto outcomes =
      consolidate_all(corpus, result, transport.get(), prompts.consolidation, in_flight);
  write_reports(dir, outcomes);
}

}  // namespace

int run_cli(int argc, char** argv) {
  spdlog::set_default_logger(std::make_shared<spdlog::logger>(
      "graphreview", std::make_shared<spdlog::sinks::stderr_color_sink_mt>()));
  spdlog::set_level(spdlog::level::warn);

  CLI::App app{"Graph-based paper ranking: matching, pairwise signals and PPR aggregation"};
  app.set_config("--config", "", "Flat key=value file mirroring the flags");
  app.require_subcommand(1, 1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Seed for every random choice")->capture_default_str();

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate a corpus or generate a synthetic one");
  CorpusFlags ingest_corpus;
  add_corpus_flags(ingest, ingest_corpus, false);
  std::string ingest_out;
  SyntheticSpec synth;
  bool synthetic = false;
  ingest->add_option("--out-dir", ingest_out, "Write normalized (or synthetic) corpus files here");
  ingest->add_flag("--synthetic", synthetic, "Generate a synthetic corpus instead of loading one");
  ingest->add_option("--submissions", synth.submissions, "Synthetic submissions")->capture_default_str();
  ingest->add_option("--historical", synth.historical, "Synthetic historical papers")
      ->capture_default_str();
  ingest->add_option("--dimension", synth.dimension, "Synthetic embedding dimension")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ingest->add_option("--seed", seed, "Seed for every random choice");

  // run
  auto* run = app.add_subcommand("run", "Grow the graph, collect signals, rank and report");
  CorpusFlags run_corpus;
  BackendFlags run_backend;
  RunFlags run_flags;
  std::string run_out = "out";
  bool skip_reports = false;
  add_corpus_flags(run, run_corpus, true);
  add_backend_flags(run, run_backend);
  add_run_flags(run, run_flags);
  run->add_option("--out", run_out, "Run directory")->capture_default_str();
  run->add_flag("--no-reports", skip_reports, "Skip report consolidation");
  run->add_option("--seed", seed, "Seed for every random choice");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score a ranking against ground truth");
  std::string pred;
  std::string truth;
  std::string batch_dir;
  double eval_gamma = kDefaultGamma;
  evaluate->add_option("--pred", pred, "Ranking CSV (rank, paper_id, pi, decision)");
  evaluate->add_option("--truth", truth, "Labels file (paper_id, score[, decision])");
  evaluate->add_option("--dir", batch_dir, "Directory of <name>.csv / <name>.truth.jsonl pairs");
  evaluate->add_option("--gamma", eval_gamma, "Acceptance rate for derived true decisions")
      ->capture_default_str();

  // riml-export
  auto* riml_cmd = app.add_subcommand("riml-export", "Write node and edge training records");
  CorpusFlags riml_corpus;
  add_corpus_flags(riml_cmd, riml_corpus, true);
  riml::ExportParams riml_params;
  std::string riml_prompts;
  std::string scoring_out = "riml_scoring.jsonl";
  std::string comparison_out = "riml_comparison.jsonl";
  riml_cmd->add_option("--sigma", riml_params.sigma, "Reward width")->capture_default_str();
  riml_cmd->add_option("--tau", riml_params.tau, "Softmax temperature")->capture_default_str();
  riml_cmd->add_option("--delta", riml_params.delta, "Minimum score gap for pairs")
      ->capture_default_str();
  riml_cmd->add_option("--paper", riml_params.paper_ids, "Restrict scoring records to these ids");
  riml_cmd->add_option("--prompt-dir", riml_prompts, "Directory of prompt template overrides");
  riml_cmd->add_option("--scoring-out", scoring_out, "Scoring records")->capture_default_str();
  riml_cmd->add_option("--comparison-out", comparison_out, "Comparison records")
      ->capture_default_str();
  riml_cmd->add_option("--seed", seed, "Seed for every random choice");

  // report
  auto* report = app.add_subcommand("report", "Consolidate review reports for a finished run");
  CorpusFlags report_corpus;
  BackendFlags report_backend;
  std::string report_run_dir;
  std::size_t report_in_flight = 8;
  add_corpus_flags(report, report_corpus, true);
  add_backend_flags(report, report_backend);
  report->add_option("--run-dir", report_run_dir, "Directory written by `run`")->required();
  report->add_option("--in-flight", report_in_flight, "Concurrent backend calls")
      ->check(CLI::PositiveNumber);
  report->add_option("--seed", seed, "Seed for every random choice");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Evaluate eta over a list of parameter values");
  CorpusFlags sweep_corpus;
  BackendFlags sweep_backend;
  RunFlags sweep_flags;
  std::string sweep_param;
  std::vector<std::string> sweep_values;
  add_corpus_flags(sweep, sweep_corpus, true);
  add_backend_flags(sweep, sweep_backend);
  add_run_flags(sweep, sweep_flags);
  sweep->add_option("--param", sweep_param, "lambda | T | gamma")
      ->required()
      ->check(CLI::IsMember({"lambda", "T", "gamma"}));
  sweep->add_option("--values", sweep_values, "Comma-separated values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--seed", seed, "Seed for every random choice");
  std::vector<double> sweep_numbers;

  try {
    app.parse(argc, argv);
    if (sweep->parsed()) {
      std::erase_if(sweep_values, [](const std::string& v) { return v.empty(); });
      if (sweep_values.empty()) throw CLI::ValidationError("--values", "needs at least one value");
      for (const std::string& v : sweep_values) {
        double x = 0.0;
        if (!CLI::detail::lexical_cast(v, x)) {
          throw CLI::ValidationError("--values", "not a number: " + v);
        }
        sweep_numbers.push_back(x);
      }
    }
    if (evaluate->parsed() && batch_dir.empty() && (pred.empty() || truth.empty())) {
      throw CLI::RequiredError("evaluate needs --pred and --truth, or --dir");
    }
    if (ingest->parsed() && !synthetic && (ingest_corpus.papers.empty() || ingest_corpus.embeddings.empty())) {
      throw CLI::RequiredError("ingest needs --papers and --embeddings, or --synthetic");
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (verbose) spdlog::set_level(spdlog::level::info);

  try {
    if (ingest->parsed()) {
      Corpus corpus;
      if (synthetic) {
        synth.seed = seed;
        corpus = make_synthetic_corpus(synth);
      } else {
        corpus = load(ingest_corpus);
      }
      if (!ingest_out.empty()) {
        const std::filesystem::path dir(ingest_out);
        save_corpus(corpus, {dir / "papers.jsonl", dir / "embeddings.jsonl",
                             std::optional<std::filesystem::path>(dir / "labels.jsonl")});
      }
      print(Json{{"N", corpus.size()},
                 {"n", corpus.num_submissions()},
                 {"dimension", corpus.dimension()},
                 {"labels", corpus.labels().size()}});
    } else if (run->parsed()) {
      const Corpus corpus = load(run_corpus);
      RunConfig config = run_config(run_flags, seed);
      config.run_dir = std::filesystem::path(run_out);
      const BackendConfig bc = backend_config(run_backend, seed);
      auto backend = make_backend(bc, corpus);
      const RunResult result = run_pipeline(corpus, config, *backend);
      if (!skip_reports) {
        write_reports_for(corpus, result, bc, config.max_in_flight,
                          std::filesystem::path(run_out) / "reports");
      }
      Json summary{{"best_T", result.best_t},
                   {"rounds", result.trace.size()},
                   {"accepts", result.best_ranking.accept_count},
                   {"submissions", result.best_ranking.entries.size()},
                   {"backend_calls", backend->calls()},
                   {"out", run_out}};
      if (config.mode == RunMode::kEvaluation && !result.trace.empty()) {
        summary["eta_best"] = result.trace.back().eta_best;
      }
      print(summary);
    } else if (evaluate->parsed()) {
      if (!batch_dir.empty()) {
        Json all = Json::object();
        for (const auto& [name, r] : metrics::evaluate_directory(batch_dir, eval_gamma)) {
          all[name] = r.to_json();
        }
        print(all);
      } else {
        print(metrics::evaluate(metrics::load_eval_input(pred, truth, eval_gamma)).to_json());
      }
    } else if (riml_cmd->parsed()) {
      const Corpus corpus = load(riml_corpus);
      riml_params.seed = seed;
      const PromptSet prompts =
          riml_prompts.empty() ? PromptSet::defaults() : PromptSet::load(riml_prompts);
      const auto summary = riml::export_training_set(corpus, AnchorScale::iclr(), riml_params,
                                                     prompts, scoring_out, comparison_out);
      print(Json{{"scoring_records", summary.scoring_records},
                 {"comparison_records", summary.comparison_records}});
    } else if (report->parsed()) {
      const Corpus corpus = load(report_corpus);
      const RunResult result = read_run_directory(report_run_dir, corpus);
      const BackendConfig bc = backend_config(report_backend, seed);
      write_reports_for(corpus, result, bc, report_in_flight,
                        std::filesystem::path(report_run_dir) / "reports");
      print(Json{{"reports", result.best_ranking.entries.size()}});
    } else if (sweep->parsed()) {
      const Corpus corpus = load(sweep_corpus);
      if (!corpus.submissions_labeled()) {
        throw Error(ErrorCode::kLabelRequired, "sweep needs a label for every submission");
      }
      const BackendConfig bc = backend_config(sweep_backend, seed);
      auto backend = make_backend(bc, corpus);
      std::cout << sweep_param << ",eta,eta_best\n";
      double best = -std::numeric_limits<double>::infinity();
      for (double value : sweep_numbers) {
        RunConfig config = run_config(sweep_flags, seed);
        config.mode = RunMode::kDeployment;
        if (sweep_param == "lambda") config.lambda = value;
        if (sweep_param == "gamma") config.gamma = value;
        if (sweep_param == "T") {
          if (value < 1 || value != static_cast<int>(value)) {
            throw Error(ErrorCode::kInvalidParam, "T values must be positive integers");
          }
          config.fixed_t = static_cast<int>(value);
        }
        const RunResult result = run_pipeline(corpus, config, *backend);
        const double eta =
            compute_eta(result.best_ranking, corpus.labels(), config.metric, config.gamma);
        best = std::max(best, eta);
        std::cout << value << ',' << eta << ',' << best << '\n';
      }
      std::cout.flush();
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.name() << ": " << e.what() << std::endl;
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: IoError: " << e.what() << std::endl;
    return 1;
  } catch (const Json::exception& e) {
    std::cerr << "error: ParseError: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}

}  // namespace graphreview
