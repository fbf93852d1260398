// src/training.cpp

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

#include "osid/training.hpp"

#include <algorithm>
#include <cmath>

#include "osid/thresholding.hpp"

namespace osid {

Episode sample_episode(const Corpus& corpus, const EpisodeConfig& config,
                       Rng& rng, bool with_imposters, Partition from) {
  if (config.m_train < 1 || config.n_support < 1 ||
      config.queries_per_speaker < 0 || config.imposter_queries < 0)
    throw Error(ErrorCode::InvalidConfig, "invalid episode config");

  const std::vector<Index> pool = corpus.partition_indices(from);
  const Index needed_utts = config.n_support + config.queries_per_speaker;

  std::vector<Index> eligible;
  for (Index i : pool)
    if (static_cast<Index>(corpus.speaker(i).utterances.size()) >= needed_utts)
      eligible.push_back(i);

  const Index min_speakers =
      config.m_train + ((with_imposters && config.imposter_queries > 0) ? 1 : 0);
  if (static_cast<Index>(pool.size()) < min_speakers)
    throw Error(ErrorCode::InsufficientSpeakers,
                "need " + std::to_string(min_speakers) + " speakers, corpus " +
                    partition_name(from) + " partition has " +
                    std::to_string(pool.size()));
  if (static_cast<Index>(eligible.size()) < config.m_train)
    throw Error(ErrorCode::InsufficientUtterances,
                "only " + std::to_string(eligible.size()) + " speakers have " +
                    std::to_string(needed_utts) + " utterances");

  Episode episode;
  std::vector<std::size_t> picked = rng.sample_without_replacement(
      eligible.size(), static_cast<std::size_t>(config.m_train));
  for (std::size_t p : picked) episode.support_speakers.push_back(eligible[p]);

  // Support rows and enrolled queries, speaker by speaker.
  std::vector<std::vector<Index>> query_utts(episode.support_speakers.size());
  for (std::size_t row = 0; row < episode.support_speakers.size(); ++row) {
    const SpeakerRecord& spk = corpus.speaker(episode.support_speakers[row]);
    std::vector<std::size_t> utts = rng.sample_without_replacement(
        spk.utterances.size(), static_cast<std::size_t>(needed_utts));
    std::vector<Vector> support_row;
    for (Index k = 0; k < config.n_support; ++k)
      support_row.push_back(spk.utterances[utts[static_cast<std::size_t>(k)]]);
    episode.batch.support.push_back(std::move(support_row));
    for (Index q = 0; q < config.queries_per_speaker; ++q)
      query_utts[row].push_back(static_cast<Index>(
          utts[static_cast<std::size_t>(config.n_support + q)]));
  }
  for (std::size_t row = 0; row < episode.support_speakers.size(); ++row) {
    const SpeakerRecord& spk = corpus.speaker(episode.support_speakers[row]);
    for (Index utt : query_utts[row]) {
      episode.batch.queries.push_back(spk.utterances[utt]);
      episode.batch.labels.push_back(static_cast<Index>(row));
      episode.query_speakers.push_back(episode.support_speakers[row]);
    }
  }

  if (with_imposters && config.imposter_queries > 0) {
    std::vector<Index> leftover;
    for (Index i : pool)
      if (std::find(episode.support_speakers.begin(),
                    episode.support_speakers.end(),
                    i) == episode.support_speakers.end())
        leftover.push_back(i);
    if (leftover.empty())
      throw Error(ErrorCode::InsufficientSpeakers,
                  "no speakers left for imposter queries");
    for (Index q = 0; q < config.imposter_queries; ++q) {
      const Index spk_idx = leftover[rng.uniform_index(leftover.size())];
      const SpeakerRecord& spk = corpus.speaker(spk_idx);
      const std::size_t utt = rng.uniform_index(spk.utterances.size());
      episode.batch.queries.push_back(spk.utterances[utt]);
      episode.batch.labels.push_back(kImposterLabel);
      episode.query_speakers.push_back(spk_idx);
    }
  }
  return episode;
}

namespace {

// Numerically stable softmax cross-entropy; fills dlogits with p - onehot.
double softmax_cross_entropy(const Vector& logits, Index label,
                             Vector& dlogits) {
  const double max_logit = logits.maxCoeff();
  Vector exps = (logits.array() - max_logit).exp();
  const double z = exps.sum();
  dlogits = exps / z;
  const double loss = -std::log(std::max(dlogits[label], 1e-300));
  dlogits[label] -= 1.0;
  return loss;
}

}  // namespace

double train_stage_a(nnet::ModelStack& stack, const Corpus& corpus,
                     const StageAConfig& config, Rng& rng, TrainReport& report) {
  const std::vector<Index> speakers = corpus.partition_indices(Partition::Train);
  if (speakers.empty())
    throw Error(ErrorCode::InsufficientSpeakers, "train partition is empty");
  if (config.batch_size < 1)
    throw Error(ErrorCode::InvalidConfig, "stage A batch size must be >= 1");

  const Index n_classes = static_cast<Index>(speakers.size());
  Rng init_rng = rng.fork("stage_a/head");
  nnet::MlpModel head = nnet::make_mlp(corpus.dim(), {}, n_classes,
                                       nnet::Activation::Identity, 0.0, init_rng);

  nnet::AdamConfig adam_config;
  adam_config.lr = config.lr;
  nnet::AdamState adapter_state = nnet::make_adam(stack.adapter, adam_config);
  nnet::AdamState head_state = nnet::make_adam(head, adam_config);

  std::vector<std::pair<Index, std::size_t>> items;  // (class, utterance)
  for (Index c = 0; c < n_classes; ++c)
    for (std::size_t u = 0; u < corpus.speaker(speakers[c]).utterances.size(); ++u)
      items.emplace_back(c, u);

  Rng shuffle_rng = rng.fork("stage_a/shuffle");
  nnet::MlpGradients adapter_grads = nnet::make_gradients(stack.adapter);
  nnet::MlpGradients head_grads = nnet::make_gradients(head);

  long step = 0;
  for (Index epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(items);
    for (std::size_t start = 0; start < items.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t end =
          std::min(items.size(), start + static_cast<std::size_t>(config.batch_size));
      const double inv_batch = 1.0 / static_cast<double>(end - start);
      adapter_grads.set_zero();
      head_grads.set_zero();
      double batch_loss = 0.0;
      for (std::size_t it = start; it < end; ++it) {
        const auto [cls, utt] = items[it];
        const Vector& x = corpus.speaker(speakers[cls]).utterances[utt];
        nnet::AdapterTrace trace = nnet::adapt_traced(stack.adapter, x);
        nnet::ForwardTape head_tape;
        Vector logits = nnet::mlp_forward(head, trace.adapted, &head_tape);
        Vector dlogits;
        batch_loss += softmax_cross_entropy(logits, cls, dlogits) * inv_batch;
        dlogits *= inv_batch;
        Vector d_adapted = nnet::mlp_backward(head, head_tape, dlogits, head_grads);
        nnet::adapt_backward(stack.adapter, trace, d_adapted, adapter_grads);
      }
      nnet::adam_step(stack.adapter, adapter_grads, adapter_state);
      nnet::adam_step(head, head_grads, head_state);
      report.push_back({step++, 'a', 0.0, 0.0, batch_loss});
    }
  }

  // Closed-set accuracy with the throwaway head, eval mode.
  double correct = 0.0, total = 0.0;
  for (Index c = 0; c < n_classes; ++c) {
    for (const Vector& x : corpus.speaker(speakers[c]).utterances) {
      Vector logits = nnet::mlp_forward(head, nnet::adapt(stack.adapter, x));
      Index best = 0;
      logits.maxCoeff(&best);
      if (best == c) correct += 1.0;
      total += 1.0;
    }
  }
  return total > 0 ? correct / total : 0.0;
}

void train_stage_b(nnet::ModelStack& stack, const Corpus& corpus,
                   const EpisodeConfig& episode_config,
                   const StageBConfig& config, Rng& rng, TrainReport& report) {
  nnet::AdamConfig adam_config;
  adam_config.lr = config.lr;
  nnet::AdamState relnet_state = nnet::make_adam(stack.relnet, adam_config);
  nnet::AdamState adapter_state = nnet::make_adam(stack.adapter, adam_config);

  Rng episode_rng = rng.fork("stage_b/episodes");
  Rng dropout_rng = rng.fork("stage_b/dropout");
  Rng product_rng = rng.fork("stage_b/products");

  nnet::EpisodeOptions options;
  options.use_imposter_loss = false;
  options.lambda = 0.0;
  options.train_adapter = config.adapter_trainable;
  options.train_relnet = true;
  options.train_idn = false;
  options.dropout_rng = &dropout_rng;

  nnet::StackGradients grads = nnet::make_stack_gradients(stack);
  for (Index e = 0; e < config.episodes; ++e) {
    Episode episode =
        sample_episode(corpus, episode_config, episode_rng, false);
    grads.adapter.set_zero();
    grads.relnet.set_zero();
    nnet::EpisodeLoss loss =
        nnet::episode_run(stack, episode.batch, options, product_rng, &grads);
    nnet::adam_step(stack.relnet, grads.relnet, relnet_state);
    if (config.adapter_trainable)
      nnet::adam_step(stack.adapter, grads.adapter, adapter_state);
    report.push_back({e, 'b', loss.relation, 0.0, loss.total});
  }
}

void train_stage_c(nnet::ModelStack& stack, const Corpus& corpus,
                   const EpisodeConfig& episode_config,
                   const StageCConfig& config, Rng& rng, TrainReport& report) {
  nnet::AdamConfig adam_config;
  adam_config.lr = config.lr;
  nnet::AdamConfig backbone_config = adam_config;
  backbone_config.lr = config.backbone_lr < 0 ? config.lr : config.backbone_lr;
  nnet::AdamState adapter_state = nnet::make_adam(stack.adapter, backbone_config);
  nnet::AdamState relnet_state = nnet::make_adam(stack.relnet, backbone_config);
  nnet::AdamState idn_state = nnet::make_adam(stack.idn, adam_config);

  Rng episode_rng = rng.fork("stage_c/episodes");
  Rng dropout_rng = rng.fork("stage_c/dropout");
  Rng product_rng = rng.fork("stage_c/products");

  nnet::EpisodeOptions options;
  options.use_imposter_loss = true;
  options.lambda = config.lambda;
  options.train_adapter = config.end_to_end;
  options.train_relnet = config.end_to_end;
  options.train_idn = config.lambda != 0.0;  // no objective, no update
  options.dropout_rng = &dropout_rng;

  nnet::StackGradients grads = nnet::make_stack_gradients(stack);
  for (Index e = 0; e < config.episodes; ++e) {
    Episode episode = sample_episode(corpus, episode_config, episode_rng, true);
    grads.adapter.set_zero();
    grads.relnet.set_zero();
    grads.idn.set_zero();
    nnet::EpisodeLoss loss =
        nnet::episode_run(stack, episode.batch, options, product_rng, &grads);
    const double ramp =
        (config.warmup_episodes > 0 && e < config.warmup_episodes)
            ? static_cast<double>(e + 1) /
                  static_cast<double>(config.warmup_episodes)
            : 1.0;
    idn_state.config.lr = adam_config.lr * ramp;
    relnet_state.config.lr = backbone_config.lr * ramp;
    adapter_state.config.lr = backbone_config.lr * ramp;
    if (options.train_idn) nnet::adam_step(stack.idn, grads.idn, idn_state);
    if (config.end_to_end) {
      nnet::adam_step(stack.relnet, grads.relnet, relnet_state);
      nnet::adam_step(stack.adapter, grads.adapter, adapter_state);
    }
    report.push_back({e, 'c', loss.relation, loss.imposter, loss.total});
  }
}

double idn_episode_auc(const nnet::ModelStack& stack, const Corpus& corpus,
                       const EpisodeConfig& episode_config, Index n_episodes,
                       Rng& rng, Partition from) {
  Rng episode_rng = rng.fork("auc/episodes");
  Rng product_rng = rng.fork("auc/products");
  std::vector<TrialPair> trials;
  for (Index e = 0; e < n_episodes; ++e) {
    Episode episode =
        sample_episode(corpus, episode_config, episode_rng, true, from);
    nnet::EpisodeScores scores =
        nnet::score_episode(stack, episode.batch, product_rng);
    for (std::size_t i = 0; i < scores.imposter.size(); ++i)
      trials.push_back({scores.imposter[i],
                        episode.batch.labels[i] == kImposterLabel});
  }
  return roc_auc(trials);
}

RelationSeparation relation_separation(const nnet::ModelStack& stack,
                                       const Corpus& corpus,
                                       const EpisodeConfig& episode_config,
                                       Index n_episodes, Rng& rng,
                                       Partition from) {
  Rng episode_rng = rng.fork("sep/episodes");
  Rng product_rng = rng.fork("sep/products");
  double matched = 0.0, mismatched = 0.0;
  long n_matched = 0, n_mismatched = 0;
  for (Index e = 0; e < n_episodes; ++e) {
    Episode episode =
        sample_episode(corpus, episode_config, episode_rng, false, from);
    nnet::EpisodeScores scores =
        nnet::score_episode(stack, episode.batch, product_rng);
    for (Index i = 0; i < scores.relation.rows(); ++i)
      for (Index j = 0; j < scores.relation.cols(); ++j) {
        if (episode.batch.labels[static_cast<std::size_t>(i)] == j) {
          matched += scores.relation(i, j);
          ++n_matched;
        } else {
          mismatched += scores.relation(i, j);
          ++n_mismatched;
        }
      }
  }
  RelationSeparation sep;
  if (n_matched > 0) sep.matched_mean = matched / static_cast<double>(n_matched);
  if (n_mismatched > 0)
    sep.mismatched_mean = mismatched / static_cast<double>(n_mismatched);
  sep.gap = sep.matched_mean - sep.mismatched_mean;
  return sep;
}

}  // namespace osid
