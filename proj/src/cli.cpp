// src/cli.cpp

// Copyright 2026  osid authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "osid/cli.hpp"

#include <cstdio>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "osid/io.hpp"

namespace osid::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, "config " + path + ": " + what);
}

// Typed section reader that rejects unknown keys, so typos in a config file
// fail loudly with the offending field named.
struct Section {
  const json& j;
  std::string path;
  std::set<std::string> seen;

  Section(const json& obj, std::string p) : j(obj), path(std::move(p)) {
    if (!j.is_object()) config_error(path, "must be a JSON object");
  }

  template <typename T>
  void get(const char* key, T& target) {
    seen.insert(key);
    if (!j.contains(key)) return;
    try {
      target = j.at(key).get<T>();
    } catch (const json::exception& e) {
      config_error(path + "." + key, e.what());
    }
  }

  const json* sub(const char* key) {
    seen.insert(key);
    return j.contains(key) ? &j.at(key) : nullptr;
  }

  void done() const {
    for (auto it = j.begin(); it != j.end(); ++it)
      if (!seen.count(it.key()))
        config_error(path + "." + it.key(), "unknown key");
  }
};

void validate_config(const RunConfig& c) {
  if (c.synth.dim < 2) config_error("synth.dim", "must be >= 2");
  if (c.synth.train_speakers < 1 || c.synth.test_speakers < 1)
    config_error("synth", "speaker counts must be >= 1");
  if (c.synth.utterances_per_speaker < 1)
    config_error("synth.utterances_per_speaker", "must be >= 1");
  if (c.synth.intra_spread < 0) config_error("synth.intra_spread", "must be >= 0");
  if (c.shift.bias_scale < 0 || c.shift.extra_noise < 0)
    config_error("shift", "scales must be >= 0");
  if (c.episode.m_train < 1) config_error("episode.m_train", "must be >= 1");
  if (c.episode.n_support < 1) config_error("episode.n_support", "must be >= 1");
  if (c.episode.queries_per_speaker < 0 || c.episode.imposter_queries < 0)
    config_error("episode", "query counts must be >= 0");
  if (c.nnet.dropout < 0 || c.nnet.dropout >= 1)
    config_error("nnet.dropout", "must be in [0, 1)");
  if (c.nnet.adapter_hidden_multiple < 1)
    config_error("nnet.adapter_hidden_multiple", "must be >= 1");
  if (c.stage_a.epochs < 0 || c.stage_b.episodes < 0 || c.stage_c.episodes < 0)
    config_error("stages", "episode/epoch counts must be >= 0");
  if (c.stage_a.batch_size < 1) config_error("stages.a.batch_size", "must be >= 1");
  if (c.eval.n_sets < 1) config_error("eval.n_sets", "must be >= 1");
  if (c.eval.trial.m < 1) config_error("eval.m", "must be >= 1");
  if (c.calibrate.grid_points < 1)
    config_error("calibrate.grid_points", "must be >= 1");
  if (c.calibrate.backend != "cosine" && c.calibrate.backend != "relnet")
    config_error("calibrate.backend", "must be cosine or relnet");
  for (const std::string& m : c.eval.methods) parse_method_kind(m);
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }

  RunConfig c;
  Section top(root, "");
  top.get("seed", c.seed);

  if (const json* j = top.sub("paths")) {
    Section s(*j, "paths");
    s.get("train_corpus", c.paths.train_corpus);
    s.get("test_corpus", c.paths.test_corpus);
    s.done();
  }
  if (const json* j = top.sub("synth")) {
    Section s(*j, "synth");
    s.get("dim", c.synth.dim);
    s.get("train_speakers", c.synth.train_speakers);
    s.get("test_speakers", c.synth.test_speakers);
    s.get("utterances_per_speaker", c.synth.utterances_per_speaker);
    s.get("intra_spread", c.synth.intra_spread);
    s.done();
  }
  if (const json* j = top.sub("shift")) {
    Section s(*j, "shift");
    s.get("enabled", c.shift.enabled);
    s.get("bias_scale", c.shift.bias_scale);
    s.get("extra_noise", c.shift.extra_noise);
    s.done();
  }
  if (const json* j = top.sub("episode")) {
    Section s(*j, "episode");
    s.get("m_train", c.episode.m_train);
    s.get("n_support", c.episode.n_support);
    s.get("queries_per_speaker", c.episode.queries_per_speaker);
    s.get("imposter_queries", c.episode.imposter_queries);
    s.done();
  }
  if (const json* j = top.sub("nnet")) {
    Section s(*j, "nnet");
    s.get("relnet_hidden", c.nnet.relnet_hidden);
    s.get("idn_hidden", c.nnet.idn_hidden);
    s.get("adapter_hidden_multiple", c.nnet.adapter_hidden_multiple);
    s.get("dropout", c.nnet.dropout);
    s.done();
  }
  if (const json* j = top.sub("stages")) {
    Section s(*j, "stages");
    if (const json* ja = s.sub("a")) {
      Section sa(*ja, "stages.a");
      sa.get("epochs", c.stage_a.epochs);
      sa.get("batch_size", c.stage_a.batch_size);
      sa.get("lr", c.stage_a.lr);
      sa.done();
    }
    if (const json* jb = s.sub("b")) {
      Section sb(*jb, "stages.b");
      sb.get("episodes", c.stage_b.episodes);
      sb.get("lr", c.stage_b.lr);
      sb.get("adapter_trainable", c.stage_b.adapter_trainable);
      sb.done();
    }
    if (const json* jc = s.sub("c")) {
      Section sc(*jc, "stages.c");
      sc.get("episodes", c.stage_c.episodes);
      sc.get("lr", c.stage_c.lr);
      sc.get("backbone_lr", c.stage_c.backbone_lr);
      sc.get("warmup_episodes", c.stage_c.warmup_episodes);
      sc.get("lambda", c.stage_c.lambda);
      sc.get("end_to_end", c.stage_c.end_to_end);
      sc.done();
    }
    s.done();
  }
  if (const json* j = top.sub("eval")) {
    Section s(*j, "eval");
    s.get("m", c.eval.trial.m);
    s.get("n_enroll", c.eval.trial.n_enroll);
    s.get("queries_per_speaker", c.eval.trial.queries_per_speaker);
    s.get("imposters_per_speaker", c.eval.trial.imposters_per_speaker);
    s.get("cohort_size", c.eval.trial.cohort_size);
    s.get("n_sets", c.eval.n_sets);
    s.get("methods", c.eval.methods);
    s.get("tau", c.eval.tau);
    s.get("tau_file", c.eval.tau_file);
    s.get("idn_threshold", c.eval.idn_threshold);
    s.get("cohort_top_k", c.eval.cohort_top_k);
    s.get("checkpoint", c.eval.checkpoint);
    s.done();
  }
  if (const json* j = top.sub("calibrate")) {
    Section s(*j, "calibrate");
    s.get("m", c.calibrate.m);
    s.get("n_sets", c.calibrate.n_sets);
    s.get("grid_min", c.calibrate.grid_min);
    s.get("grid_max", c.calibrate.grid_max);
    s.get("grid_points", c.calibrate.grid_points);
    s.get("backend", c.calibrate.backend);
    s.get("checkpoint", c.calibrate.checkpoint);
    s.get("trial_pairs", c.calibrate.trial_pairs);
    s.done();
  }
  top.done();
  validate_config(c);
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  return parse_run_config(io::read_file(path));
}

namespace {

fs::path resolve(const fs::path& out_dir, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : out_dir / path;
}

std::vector<double> linspace(double lo, double hi, Index points) {
  std::vector<double> grid;
  if (points == 1) {
    grid.push_back(lo);
    return grid;
  }
  for (Index i = 0; i < points; ++i)
    grid.push_back(lo + (hi - lo) * static_cast<double>(i) /
                            static_cast<double>(points - 1));
  return grid;
}

std::shared_ptr<const nnet::ModelStack> load_stack(const fs::path& path,
                                                   Index corpus_dim) {
  io::Checkpoint ckpt = io::read_checkpoint(path);
  if (ckpt.stack.dim != corpus_dim)
    throw Error(ErrorCode::DimensionMismatch,
                "checkpoint '" + path.string() + "' has dimension " +
                    std::to_string(ckpt.stack.dim) + ", corpus has " +
                    std::to_string(corpus_dim));
  return std::make_shared<const nnet::ModelStack>(std::move(ckpt.stack));
}

struct Thresholds {
  double fixed = 0.0;
  double snorm = 0.0;  // for score-norm methods, in normalized-score units
};

Thresholds load_tau(const RunConfig& config, const fs::path& out_dir) {
  if (config.eval.tau_file.empty())
    return {config.eval.tau, config.eval.tau};
  const fs::path path = resolve(out_dir, config.eval.tau_file);
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, path.string() + ": " + e.what());
  }
  if (j.contains("fixed_tau")) {
    Thresholds t;
    t.fixed = j.at("fixed_tau").get<double>();
    t.snorm = j.value("snorm_tau", t.fixed);
    return t;
  }
  if (j.contains("mode")) {
    const double tau = io::threshold_table_from_json(j.dump()).tau;
    return {tau, tau};
  }
  throw Error(ErrorCode::FormatError,
              path.string() + ": expected field fixed_tau or a threshold table");
}

}  // namespace

int run_gen(const RunConfig& config, const fs::path& out_dir) {
  fs::create_directories(out_dir);

  SynthConfig train_cfg{config.synth.dim, config.synth.train_speakers,
                        config.synth.utterances_per_speaker,
                        config.synth.intra_spread,
                        derive_seed(config.seed, "gen/train")};
  Corpus train = generate_corpus(train_cfg, Partition::Train, "train_");

  SynthConfig test_cfg = train_cfg;
  test_cfg.n_speakers = config.synth.test_speakers;
  test_cfg.seed = derive_seed(config.seed, "gen/test");
  Corpus test = generate_corpus(test_cfg, Partition::Test, "test_");

  if (config.shift.enabled) {
    ShiftConfig shift{config.shift.bias_scale, config.shift.extra_noise,
                      derive_seed(config.seed, "gen/shift")};
    test = apply_domain_shift(test, shift);
  }

  io::write_corpus(resolve(out_dir, config.paths.train_corpus), train,
                   Partition::Train);
  io::write_corpus(resolve(out_dir, config.paths.test_corpus), test,
                   Partition::Test);

  const Separability train_sep = measure_separability(train);
  const Separability test_sep = measure_separability(test);
  std::printf("train: %lld speakers, %lld utterances, cosine gap %.4f\n",
              static_cast<long long>(train.speaker_count()),
              static_cast<long long>(train.utterance_count()), train_sep.gap);
  std::printf("test:  %lld speakers, %lld utterances, cosine gap %.4f%s\n",
              static_cast<long long>(test.speaker_count()),
              static_cast<long long>(test.utterance_count()), test_sep.gap,
              config.shift.enabled ? " (shifted)" : "");
  return 0;
}

int run_train(const RunConfig& config, const fs::path& out_dir,
              const TrainOverrides& overrides) {
  fs::create_directories(out_dir);
  Corpus corpus = io::load_corpus(resolve(out_dir, config.paths.train_corpus),
                                  resolve(out_dir, config.paths.test_corpus));

  std::vector<char> stages;
  if (overrides.stage == 0) {
    stages = {'a', 'b', 'c'};
  } else if (overrides.stage == 'a' || overrides.stage == 'b' ||
             overrides.stage == 'c') {
    stages = {overrides.stage};
  } else {
    throw Error(ErrorCode::InvalidConfig,
                std::string("unknown stage '") + overrides.stage + "'");
  }

  // Starting point: an explicit checkpoint, the previous stage's checkpoint
  // when resuming, or a fresh seeded stack.
  nnet::ModelStack stack;
  if (!overrides.from.empty()) {
    stack = io::read_checkpoint(resolve(out_dir, overrides.from)).stack;
  } else if (stages.front() != 'a') {
    const char prev = (stages.front() == 'b') ? 'a' : 'b';
    stack = io::read_checkpoint(out_dir / (std::string("ckpt_stage_") + prev +
                                           ".bin"))
                .stack;
  } else {
    nnet::StackArchitecture arch;
    arch.dim = corpus.dim();
    arch.m_train = config.episode.m_train;
    arch.relnet_hidden = config.nnet.relnet_hidden;
    arch.idn_hidden = config.nnet.idn_hidden;
    arch.adapter_hidden_multiple = config.nnet.adapter_hidden_multiple;
    arch.dropout_rate = config.nnet.dropout;
    Rng init_rng(derive_seed(config.seed, "train/init"));
    stack = nnet::make_model_stack(arch, init_rng);
  }
  if (stack.dim != corpus.dim())
    throw Error(ErrorCode::DimensionMismatch,
                "checkpoint dimension " + std::to_string(stack.dim) +
                    " does not match corpus dimension " +
                    std::to_string(corpus.dim()));

  StageAConfig stage_a = config.stage_a;
  StageBConfig stage_b = config.stage_b;
  StageCConfig stage_c = config.stage_c;
  if (overrides.episodes >= 0) {
    stage_a.epochs = overrides.episodes;
    stage_b.episodes = overrides.episodes;
    stage_c.episodes = overrides.episodes;
  }
  if (overrides.frozen) stage_c.end_to_end = false;

  TrainReport report;
  for (char stage : stages) {
    Rng rng(derive_seed(config.seed, std::string("train/") + stage));
    if (stage == 'a') {
      const double acc = train_stage_a(stack, corpus, stage_a, rng, report);
      std::printf("stage a: closed-set train accuracy %.4f\n", acc);
    } else if (stage == 'b') {
      train_stage_b(stack, corpus, config.episode, stage_b, rng, report);
      std::printf("stage b: %lld episodes\n",
                  static_cast<long long>(stage_b.episodes));
    } else {
      train_stage_c(stack, corpus, config.episode, stage_c, rng, report);
      std::printf("stage c: %lld episodes (%s)\n",
                  static_cast<long long>(stage_c.episodes),
                  stage_c.end_to_end ? "end-to-end" : "frozen");
    }
    io::Checkpoint ckpt{stack, config.seed, std::string(1, stage)};
    io::write_checkpoint(out_dir / (std::string("ckpt_stage_") + stage + ".bin"),
                         ckpt);
  }
  io::write_train_report(out_dir / "train_report.tsv", report);
  return 0;
}

int run_calibrate(const RunConfig& config, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  Corpus corpus = io::read_corpus(resolve(out_dir, config.paths.test_corpus),
                                  Partition::Test);

  TrialConfig trial_config = config.eval.trial;
  trial_config.m = config.calibrate.m;
  Rng rng(derive_seed(config.seed, "calibrate/trials"));
  std::vector<SpeakerSetTrial> trials;
  for (Index t = 0; t < config.calibrate.n_sets; ++t)
    trials.push_back(build_speaker_set(corpus, trial_config, rng));

  MethodSpec prototype;
  if (config.calibrate.backend == "relnet") {
    prototype.kind = MethodSpec::Kind::FixedRelNet;
    prototype.checkpoint =
        load_stack(resolve(out_dir, config.calibrate.checkpoint), corpus.dim());
  } else {
    prototype.kind = MethodSpec::Kind::FixedCosine;
  }
  prototype.seed = derive_seed(config.seed, "calibrate/products");

  const std::vector<double> grid =
      linspace(config.calibrate.grid_min, config.calibrate.grid_max,
               config.calibrate.grid_points);
  const auto [tau, accuracy] = calibrate_fixed_threshold(prototype, trials, grid);

  // Score-norm thresholds live in normalized-score units, so their grid
  // spans the scores actually observed on the calibration trials.
  MethodSpec snorm_proto;
  snorm_proto.kind = MethodSpec::Kind::ScoreNorm;
  snorm_proto.cohort_top_k = config.eval.cohort_top_k;
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const SpeakerSetTrial& trial : trials) {
    auto observe = [&](const Vector& q) {
      Decision d = decide(snorm_proto, q, trial);
      lo = first ? d.raw_score : std::min(lo, d.raw_score);
      hi = first ? d.raw_score : std::max(hi, d.raw_score);
      first = false;
    };
    for (const LabeledQuery& q : trial.enrolled_queries) observe(q.embedding);
    for (const Vector& q : trial.imposter_queries) observe(q);
  }
  const auto [snorm_tau, snorm_accuracy] = calibrate_fixed_threshold(
      snorm_proto, trials, linspace(lo, hi, config.calibrate.grid_points));

  std::vector<TrialPair> pairs =
      config.calibrate.trial_pairs.empty()
          ? verification_trials(prototype, trials)
          : io::read_trial_pairs(resolve(out_dir, config.calibrate.trial_pairs));
  const EerResult eer = compute_eer(pairs);

  json j;
  j["backend"] = config.calibrate.backend;
  j["fixed_tau"] = tau;
  j["accuracy_at_tau"] = accuracy;
  j["snorm_tau"] = snorm_tau;
  j["snorm_accuracy"] = snorm_accuracy;
  j["eer"] = eer.eer;
  j["eer_threshold"] = eer.threshold;
  j["m"] = config.calibrate.m;
  j["n_sets"] = config.calibrate.n_sets;
  j["grid"] = {{"min", config.calibrate.grid_min},
               {"max", config.calibrate.grid_max},
               {"points", config.calibrate.grid_points}};
  io::write_file_atomic(out_dir / "calibration.json", j.dump(2) + "\n");
  io::write_threshold_table(out_dir / "threshold_table.json",
                            ThresholdTable::fixed(tau));

  std::printf(
      "fixed tau %.6f (accuracy %.4f), snorm tau %.6f (accuracy %.4f), "
      "eer %.4f at %.6f\n",
      tau, accuracy, snorm_tau, snorm_accuracy, eer.eer, eer.threshold);
  return 0;
}

int run_eval(const RunConfig& config, const fs::path& out_dir,
             const std::vector<std::string>& method_override) {
  fs::create_directories(out_dir);
  Corpus corpus = io::read_corpus(resolve(out_dir, config.paths.test_corpus),
                                  Partition::Test);

  Rng rng(derive_seed(config.seed, "eval/trials"));
  std::vector<SpeakerSetTrial> trials;
  for (Index t = 0; t < config.eval.n_sets; ++t)
    trials.push_back(build_speaker_set(corpus, config.eval.trial, rng));

  const std::vector<std::string>& names =
      method_override.empty() ? config.eval.methods : method_override;
  const Thresholds tau = load_tau(config, out_dir);

  std::shared_ptr<const nnet::ModelStack> stack;
  std::vector<std::pair<std::string, EvalResult>> results;
  for (const std::string& name : names) {
    MethodSpec method;
    method.kind = parse_method_kind(name);
    method.tau =
        method.kind == MethodSpec::Kind::ScoreNorm ? tau.snorm : tau.fixed;
    method.idn_threshold = config.eval.idn_threshold;
    method.cohort_top_k = config.eval.cohort_top_k;
    method.seed = derive_seed(config.seed, "eval/products");
    if (method.kind == MethodSpec::Kind::FixedRelNet ||
        method.kind == MethodSpec::Kind::SstRelNet ||
        method.kind == MethodSpec::Kind::IdnRelNet) {
      if (!stack)
        stack = load_stack(resolve(out_dir, config.eval.checkpoint), corpus.dim());
      method.checkpoint = stack;
    }
    results.emplace_back(method_kind_name(method.kind),
                         evaluate_method(method, trials));
  }

  io::write_eval_reports(out_dir / "eval.json", out_dir / "eval.tsv", results,
                         config.eval.n_sets);
  std::printf("method          overall            imposter\n");
  for (const auto& [name, r] : results)
    std::printf("%-15s %.4f +/- %.4f   %.4f +/- %.4f\n", name.c_str(),
                r.overall_mean, r.overall_ci95, r.imposter_mean,
                r.imposter_ci95);
  return 0;
}

int run_eer(const fs::path& trial_pair_file, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const std::vector<TrialPair> pairs = io::read_trial_pairs(trial_pair_file);
  const EerResult result = compute_eer(pairs);
  io::write_file_atomic(out_dir / "eer.json", io::eer_to_json(result));
  std::printf("eer %.6f at threshold %.6f (%zu trials)\n", result.eer,
              result.threshold, pairs.size());
  return 0;
}

int main_entry(int argc, char** argv) {
  CLI::App app{"open-set speaker identification on precomputed embeddings"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_given = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "override the config seed")
        ->each([&](const std::string&) { seed_given = true; });
  };

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic corpus");
  bool shift_flag = false;
  gen->add_flag("--shift", shift_flag, "apply the domain shift to the test corpus");
  add_common(gen);

  CLI::App* train = app.add_subcommand("train", "run the training stages");
  TrainOverrides overrides;
  std::string stage_str;
  train->add_option("--stage", stage_str, "run a single stage: a, b or c");
  train->add_flag("--frozen", overrides.frozen,
                  "freeze adapter and relation network in stage c");
  long long episodes_override = -1;
  train->add_option("--episodes", episodes_override,
                    "override episode/epoch counts for the stages run");
  train->add_option("--from", overrides.from, "resume from this checkpoint");
  add_common(train);

  CLI::App* calibrate =
      app.add_subcommand("calibrate", "calibrate fixed thresholds and EER");
  add_common(calibrate);

  CLI::App* eval = app.add_subcommand("eval", "evaluate methods on speaker sets");
  std::string methods_csv;
  eval->add_option("--methods", methods_csv,
                   "comma-separated methods (fixed, score_norm, sst, idn, ...)");
  add_common(eval);

  CLI::App* eer = app.add_subcommand("eer", "equal error rate of a trial-pair file");
  std::string trial_file;
  eer->add_option("trials", trial_file, "trial-pair file (score<TAB>label)")
      ->required();
  add_common(eer);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    RunConfig config =
        config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (seed_given) config.seed = seed;

    if (gen->parsed()) {
      if (shift_flag) config.shift.enabled = true;
      return run_gen(config, out_dir);
    }
    if (train->parsed()) {
      if (!stage_str.empty()) {
        if (stage_str.size() != 1)
          throw Error(ErrorCode::InvalidConfig,
                      "--stage must be one of a, b, c");
        overrides.stage = stage_str[0];
      }
      overrides.episodes = static_cast<Index>(episodes_override);
      return run_train(config, out_dir, overrides);
    }
    if (calibrate->parsed()) return run_calibrate(config, out_dir);
    if (eval->parsed()) {
      std::vector<std::string> methods;
      if (!methods_csv.empty()) {
        std::size_t start = 0;
        while (start <= methods_csv.size()) {
          std::size_t comma = methods_csv.find(',', start);
          if (comma == std::string::npos) comma = methods_csv.size();
          if (comma > start)
            methods.push_back(methods_csv.substr(start, comma - start));
          start = comma + 1;
        }
      }
      return run_eval(config, out_dir, methods);
    }
    if (eer->parsed()) return run_eer(trial_file, out_dir);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return error_exit_code(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace osid::cli
