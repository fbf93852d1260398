// include/osid/cli.hpp

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

#ifndef OSID_CLI_HPP
#define OSID_CLI_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "osid/eval.hpp"
#include "osid/synthdata.hpp"
#include "osid/training.hpp"

namespace osid::cli {

/**
   One structured configuration document drives every subcommand.  CLI flags
   override config keys, and the config file overrides the built-in defaults.
   Relative paths inside the config resolve against the --out directory, so a
   whole pipeline can live under one output root.

   The built-in defaults are desk scale (small corpus, m_train=10) so the
   out-of-the-box pipeline runs in seconds; episode sizes can be raised to
   the production scale (m_train=80, 1 support, 2 queries, 160 imposters)
   through the config file.
*/
struct RunConfig {
  std::uint64_t seed = 42;

  struct Paths {
    std::string train_corpus = "train.spkemb";
    std::string test_corpus = "test.spkemb";
  } paths;

  struct Synth {
    Index dim = 32;
    Index train_speakers = 60;
    Index test_speakers = 40;
    Index utterances_per_speaker = 25;
    double intra_spread = 0.3;
  } synth;

  struct Shift {
    bool enabled = false;  // applies to the test corpus only
    double bias_scale = 0.5;
    double extra_noise = 0.2;
  } shift;

  EpisodeConfig episode{/*m_train=*/10, /*n_support=*/1,
                        /*queries_per_speaker=*/2, /*imposter_queries=*/20};

  struct Nnet {
    std::vector<Index> relnet_hidden{256, 64};
    std::vector<Index> idn_hidden{256, 64};
    Index adapter_hidden_multiple = 2;
    double dropout = 0.1;
  } nnet;

  StageAConfig stage_a;
  StageBConfig stage_b;
  StageCConfig stage_c;

  struct Eval {
    TrialConfig trial;
    Index n_sets = 200;
    std::vector<std::string> methods{"fixed_cosine", "score_norm", "sst_cosine"};
    double tau = 0.0;
    std::string tau_file;  // overrides tau when set
    double idn_threshold = 0.5;
    Index cohort_top_k = 0;
    std::string checkpoint = "ckpt_stage_c.bin";
  } eval;

  struct Calibrate {
    Index m = 5;
    Index n_sets = 50;
    double grid_min = -1.0;
    double grid_max = 1.0;
    Index grid_points = 201;
    std::string backend = "cosine";  // or "relnet"
    std::string checkpoint = "ckpt_stage_c.bin";
    std::string trial_pairs;  // optional: EER from this file instead
  } calibrate;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);

struct TrainOverrides {
  char stage = 0;           // 0 = all stages, else 'a'/'b'/'c'
  bool frozen = false;      // force stage C end_to_end = false
  Index episodes = -1;      // override episode/epoch counts when >= 0
  std::string from;         // resume checkpoint path
};

int run_gen(const RunConfig& config, const std::filesystem::path& out_dir);
int run_train(const RunConfig& config, const std::filesystem::path& out_dir,
              const TrainOverrides& overrides = {});
int run_calibrate(const RunConfig& config, const std::filesystem::path& out_dir);
int run_eval(const RunConfig& config, const std::filesystem::path& out_dir,
             const std::vector<std::string>& method_override = {});
int run_eer(const std::filesystem::path& trial_pair_file,
            const std::filesystem::path& out_dir);

// Full argv entry point used by the osid binary.
int main_entry(int argc, char** argv);

}  // namespace osid::cli

#endif  // OSID_CLI_HPP
