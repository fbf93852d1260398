// include/osid/training.hpp

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

#ifndef OSID_TRAINING_HPP
#define OSID_TRAINING_HPP

#include "osid/corpus.hpp"
#include "osid/nnet.hpp"
#include "osid/rng.hpp"

namespace osid {

struct EpisodeConfig {
  Index m_train = 80;
  Index n_support = 1;
  Index queries_per_speaker = 2;
  Index imposter_queries = 160;  // balanced: m_train * queries_per_speaker
};

struct Episode {
  nnet::EpisodeBatch batch;
  std::vector<Index> support_speakers;  // corpus record index per support row
  std::vector<Index> query_speakers;    // corpus record index per query
};

/**
   One meta-learning mini-batch: m_train support speakers sampled without
   replacement, n_support + queries_per_speaker utterances per speaker (also
   without replacement), and imposter queries drawn from the speakers left
   out of the support set.  Enrolled queries come first, in support order,
   then the imposters.
*/
Episode sample_episode(const Corpus& corpus, const EpisodeConfig& config,
                       Rng& rng, bool with_imposters = true,
                       Partition from = Partition::Train);

struct TrainReportRow {
  long step = 0;
  char stage = 'a';
  double l_relation = 0.0;
  double l_imposter = 0.0;
  double l_total = 0.0;
};

using TrainReport = std::vector<TrainReportRow>;

struct StageAConfig {
  Index epochs = 5;
  Index batch_size = 32;
  double lr = 1e-3;
};

struct StageBConfig {
  Index episodes = 300;
  double lr = 1e-3;
  bool adapter_trainable = true;
};

struct StageCConfig {
  Index episodes = 500;
  double lr = 1e-4;          // imposter detection network
  double backbone_lr = -1.0;  // adapter and relnet; < 0 means use lr
  Index warmup_episodes = 0;  // linear lr ramp over the first episodes
  double lambda = 1.0;
  bool end_to_end = true;  // false freezes adapter and relnet
};

// Stage A: adapter plus a throwaway linear softmax head, trained with
// cross-entropy over the train-partition speakers.  Returns the closed-set
// classification accuracy on the training data after the last epoch.
double train_stage_a(nnet::ModelStack& stack, const Corpus& corpus,
                     const StageAConfig& config, Rng& rng, TrainReport& report);

// Stage B: episodic relation-network training on L_relation only, episodes
// without imposter queries.
void train_stage_b(nnet::ModelStack& stack, const Corpus& corpus,
                   const EpisodeConfig& episode_config,
                   const StageBConfig& config, Rng& rng, TrainReport& report);

// Stage C: episodes with imposters, minimizing L_relation + lambda *
// L_imposter.  end_to_end=false updates only the imposter detection network;
// lambda == 0 leaves the imposter detection network untouched as well, since
// it then has no objective.
void train_stage_c(nnet::ModelStack& stack, const Corpus& corpus,
                   const EpisodeConfig& episode_config,
                   const StageCConfig& config, Rng& rng, TrainReport& report);

// Pooled query-level ROC-AUC of the imposter score over freshly sampled
// episodes (imposters are the positive class).
double idn_episode_auc(const nnet::ModelStack& stack, const Corpus& corpus,
                       const EpisodeConfig& episode_config, Index n_episodes,
                       Rng& rng, Partition from = Partition::Test);

struct RelationSeparation {
  double matched_mean = 0.0;
  double mismatched_mean = 0.0;
  double gap = 0.0;
};

// Mean relation score on matched vs mismatched query-centroid pairs over
// freshly sampled imposter-free episodes.
RelationSeparation relation_separation(const nnet::ModelStack& stack,
                                       const Corpus& corpus,
                                       const EpisodeConfig& episode_config,
                                       Index n_episodes, Rng& rng,
                                       Partition from = Partition::Test);

}  // namespace osid

#endif  // OSID_TRAINING_HPP
