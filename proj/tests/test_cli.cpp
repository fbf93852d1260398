// tests/test_cli.cpp

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

#include <doctest.h>

#include <filesystem>

#include "osid/cli.hpp"
#include "osid/io.hpp"

using namespace osid;
using namespace osid::cli;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("osid_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Small but trainable end-to-end configuration.
RunConfig tiny_config() {
  RunConfig c;
  c.seed = 7;
  c.synth.dim = 8;
  c.synth.train_speakers = 12;
  c.synth.test_speakers = 10;
  c.synth.utterances_per_speaker = 16;
  c.synth.intra_spread = 0.3;
  c.episode = EpisodeConfig{4, 1, 2, 8};
  c.nnet.relnet_hidden = {16, 8};
  c.nnet.idn_hidden = {16, 8};
  c.stage_a.epochs = 1;
  c.stage_b.episodes = 10;
  c.stage_c.episodes = 10;
  c.eval.trial.m = 3;
  c.eval.trial.n_enroll = 3;
  c.eval.trial.queries_per_speaker = 4;
  c.eval.trial.imposters_per_speaker = 4;
  c.eval.trial.cohort_size = 5;
  c.eval.n_sets = 6;
  c.eval.tau = 0.4;
  c.calibrate.m = 3;
  c.calibrate.n_sets = 5;
  return c;
}

}  // namespace

TEST_CASE("config parsing: defaults, overrides, and unknown keys") {
  RunConfig defaults = parse_run_config("{}");
  CHECK(defaults.seed == 42);
  CHECK(defaults.episode.m_train == 10);
  CHECK(defaults.eval.trial.m == 5);

  RunConfig custom = parse_run_config(
      "{\"seed\": 9, \"episode\": {\"m_train\": 80, \"imposter_queries\": 160},"
      " \"stages\": {\"c\": {\"lambda\": 0.5, \"end_to_end\": false}}}");
  CHECK(custom.seed == 9);
  CHECK(custom.episode.m_train == 80);
  CHECK(custom.episode.imposter_queries == 160);
  CHECK(custom.stage_c.lambda == 0.5);
  CHECK_FALSE(custom.stage_c.end_to_end);

  CHECK_THROWS_WITH_AS(parse_run_config("{\"sede\": 9}"),
                       doctest::Contains("sede"), Error);
  CHECK_THROWS_WITH_AS(parse_run_config("{\"episode\": {\"m_trian\": 5}}"),
                       doctest::Contains("m_trian"), Error);
  CHECK_THROWS_WITH_AS(parse_run_config("{\"synth\": {\"dim\": 1}}"),
                       doctest::Contains("dim"), Error);
  CHECK_THROWS_WITH_AS(parse_run_config("{\"eval\": {\"methods\": [\"nope\"]}}"),
                       doctest::Contains("nope"), Error);
  CHECK_THROWS_AS(parse_run_config("not json"), Error);
}

TEST_CASE("gen writes both partitions and is byte-reproducible") {
  RunConfig config = tiny_config();
  fs::path dir1 = temp_dir("gen1");
  fs::path dir2 = temp_dir("gen2");
  CHECK(run_gen(config, dir1) == 0);
  CHECK(run_gen(config, dir2) == 0);

  CHECK(io::read_file(dir1 / "train.spkemb") ==
        io::read_file(dir2 / "train.spkemb"));
  CHECK(io::read_file(dir1 / "test.spkemb") ==
        io::read_file(dir2 / "test.spkemb"));

  Corpus merged = io::load_corpus(dir1 / "train.spkemb", dir1 / "test.spkemb");
  CHECK(merged.partition_indices(Partition::Train).size() == 12);
  CHECK(merged.partition_indices(Partition::Test).size() == 10);
}

TEST_CASE("gen --shift changes only the test corpus") {
  RunConfig clean = tiny_config();
  RunConfig shifted = clean;
  shifted.shift.enabled = true;
  fs::path dir_clean = temp_dir("gen_clean");
  fs::path dir_shift = temp_dir("gen_shift");
  run_gen(clean, dir_clean);
  run_gen(shifted, dir_shift);
  CHECK(io::read_file(dir_clean / "train.spkemb") ==
        io::read_file(dir_shift / "train.spkemb"));
  CHECK(io::read_file(dir_clean / "test.spkemb") !=
        io::read_file(dir_shift / "test.spkemb"));
}

TEST_CASE("train writes per-stage checkpoints deterministically") {
  RunConfig config = tiny_config();
  fs::path dir1 = temp_dir("train1");
  fs::path dir2 = temp_dir("train2");
  run_gen(config, dir1);
  run_gen(config, dir2);
  CHECK(run_train(config, dir1) == 0);
  CHECK(run_train(config, dir2) == 0);

  for (const char* name :
       {"ckpt_stage_a.bin", "ckpt_stage_b.bin", "ckpt_stage_c.bin",
        "train_report.tsv"}) {
    CAPTURE(name);
    CHECK(io::read_file(dir1 / name) == io::read_file(dir2 / name));
  }

  io::Checkpoint c = io::read_checkpoint(dir1 / "ckpt_stage_c.bin");
  CHECK(c.stage == "c");
  CHECK(c.stack.dim == 8);
}

TEST_CASE("train --episodes 0 passes checkpoints through unchanged") {
  RunConfig config = tiny_config();
  fs::path dir = temp_dir("train_zero");
  run_gen(config, dir);
  TrainOverrides overrides;
  overrides.episodes = 0;
  run_train(config, dir, overrides);
  io::Checkpoint a = io::read_checkpoint(dir / "ckpt_stage_a.bin");
  io::Checkpoint c = io::read_checkpoint(dir / "ckpt_stage_c.bin");
  CHECK((nnet::flatten_parameters(a.stack.adapter) -
         nnet::flatten_parameters(c.stack.adapter)).norm() == 0.0);
  CHECK((nnet::flatten_parameters(a.stack.relnet) -
         nnet::flatten_parameters(c.stack.relnet)).norm() == 0.0);
  CHECK((nnet::flatten_parameters(a.stack.idn) -
         nnet::flatten_parameters(c.stack.idn)).norm() == 0.0);
}

TEST_CASE("train --stage c --frozen keeps stage-b parameter blobs") {
  RunConfig config = tiny_config();
  fs::path dir = temp_dir("train_frozen");
  run_gen(config, dir);
  run_train(config, dir);  // stages a..c to produce ckpt_stage_b.bin

  TrainOverrides overrides;
  overrides.stage = 'c';
  overrides.frozen = true;
  run_train(config, dir, overrides);

  io::Checkpoint b = io::read_checkpoint(dir / "ckpt_stage_b.bin");
  io::Checkpoint c = io::read_checkpoint(dir / "ckpt_stage_c.bin");
  CHECK((nnet::flatten_parameters(b.stack.adapter) -
         nnet::flatten_parameters(c.stack.adapter)).norm() == 0.0);
  CHECK((nnet::flatten_parameters(b.stack.relnet) -
         nnet::flatten_parameters(c.stack.relnet)).norm() == 0.0);
  CHECK((nnet::flatten_parameters(b.stack.idn) -
         nnet::flatten_parameters(c.stack.idn)).norm() > 0.0);
}

TEST_CASE("calibrate emits thresholds that eval ingests unchanged") {
  RunConfig config = tiny_config();
  config.synth.intra_spread = 0.1;  // separable
  fs::path dir = temp_dir("calibrate");
  run_gen(config, dir);
  CHECK(run_calibrate(config, dir) == 0);

  CHECK(fs::exists(dir / "calibration.json"));
  CHECK(fs::exists(dir / "threshold_table.json"));
  ThresholdTable table = io::read_threshold_table(dir / "threshold_table.json");
  CHECK(table.mode == ThresholdTable::Mode::Fixed);

  // a separable corpus calibrates to perfect accuracy
  const std::string text = io::read_file(dir / "calibration.json");
  CHECK(text.find("\"accuracy_at_tau\": 1.0") != std::string::npos);
  CHECK(text.find("\"eer\": 0.0") != std::string::npos);
  CHECK(text.find("snorm_tau") != std::string::npos);

  // eval reads the calibration output without modification
  config.eval.tau_file = "calibration.json";
  config.eval.methods = {"fixed_cosine", "sst_cosine", "score_norm"};
  CHECK(run_eval(config, dir) == 0);
  CHECK(fs::exists(dir / "eval.json"));
  CHECK(fs::exists(dir / "eval.tsv"));

  config.eval.tau_file = "threshold_table.json";
  CHECK(run_eval(config, dir) == 0);
}

TEST_CASE("eval TSV has one row per method") {
  RunConfig config = tiny_config();
  fs::path dir = temp_dir("eval_shape");
  run_gen(config, dir);
  config.eval.n_sets = 10;
  run_eval(config, dir, {"fixed_cosine", "sst_cosine"});
  const std::string tsv = io::read_file(dir / "eval.tsv");
  CHECK(tsv.find("method\toverall_mean\toverall_ci95\timposter_mean\t"
                 "imposter_ci95\n") == 0);
  std::size_t rows = 0;
  for (char ch : tsv)
    if (ch == '\n') ++rows;
  CHECK(rows == 3);  // header + two methods

  // rerunning reproduces the reports byte for byte
  const std::string json_before = io::read_file(dir / "eval.json");
  run_eval(config, dir, {"fixed_cosine", "sst_cosine"});
  CHECK(io::read_file(dir / "eval.json") == json_before);
}

TEST_CASE("eer subcommand reproduces compute_eer on a file") {
  fs::path dir = temp_dir("eer");
  io::write_trial_pairs(dir / "pairs.tsv",
                        {{0.9, true}, {0.8, true}, {0.1, false}, {0.2, false}});
  CHECK(run_eer(dir / "pairs.tsv", dir) == 0);
  const std::string text = io::read_file(dir / "eer.json");
  CHECK(text.find("\"eer\": 0.0") != std::string::npos);
  CHECK(text.find("far_curve") != std::string::npos);
}

TEST_CASE("missing inputs produce structured errors") {
  RunConfig config = tiny_config();
  fs::path dir = temp_dir("missing");
  CHECK_THROWS_AS(run_train(config, dir), Error);
  CHECK_THROWS_AS(run_eval(config, dir), Error);
  try {
    run_eval(config, dir);
  } catch (const Error& e) {
    CHECK(error_exit_code(e.code()) == 2);  // IoError category
  }
}
