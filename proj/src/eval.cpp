// src/eval.cpp

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

#include "osid/eval.hpp"

#include <algorithm>
#include <cmath>

namespace osid {

namespace {

bool needs_checkpoint(MethodSpec::Kind kind) {
  switch (kind) {
    case MethodSpec::Kind::FixedRelNet:
    case MethodSpec::Kind::SstRelNet:
    case MethodSpec::Kind::IdnRelNet:
      return true;
    default:
      return false;
  }
}

// Everything a method needs once per trial: the enrollment in scoring space
// (adapted through the checkpoint's residual adapter when one is present),
// the identification scorer, and any per-trial tables.
struct MethodContext {
  const MethodSpec* method = nullptr;
  const SpeakerSetTrial* trial = nullptr;
  const EnrollmentSet* enrollment = nullptr;  // scoring space
  EnrollmentSet adapted_enrollment{0};        // storage when adapted
  Scorer id_scorer;
  ThresholdTable table;            // SST variants
  std::vector<Vector> centers;     // IdnRelNet
  std::vector<Index> idn_indices;  // IdnRelNet
  bool adapt_query = false;
};

MethodContext prepare(const MethodSpec& method, const SpeakerSetTrial& trial,
                      std::uint64_t product_seed) {
  MethodContext ctx;
  ctx.method = &method;
  ctx.trial = &trial;

  const bool adapted = needs_checkpoint(method.kind);
  if (adapted) {
    if (!method.checkpoint)
      throw Error(ErrorCode::InvalidConfig,
                  std::string(method_kind_name(method.kind)) +
                      " requires a checkpoint");
    if (method.checkpoint->dim != trial.enrollment.dim())
      throw Error(ErrorCode::DimensionMismatch,
                  "checkpoint dimension " +
                      std::to_string(method.checkpoint->dim) +
                      " does not match trial dimension " +
                      std::to_string(trial.enrollment.dim()));
    ctx.adapted_enrollment = EnrollmentSet(trial.enrollment.dim());
    for (Index j = 0; j < trial.enrollment.speaker_count(); ++j) {
      std::vector<Vector> utts;
      for (const Vector& x : trial.enrollment.utterances(j))
        utts.push_back(nnet::adapt(method.checkpoint->adapter, x));
      ctx.adapted_enrollment.add_speaker(trial.enrollment.speaker_id(j),
                                         std::move(utts));
    }
    ctx.enrollment = &ctx.adapted_enrollment;
    ctx.adapt_query = true;
    auto stack = method.checkpoint;
    ctx.id_scorer = [stack](const Vector& a, const Vector& b) {
      return nnet::relation_forward(stack->relnet, a, b);
    };
  } else {
    ctx.enrollment = &trial.enrollment;
    ctx.id_scorer = cosine_scorer();
  }

  switch (method.kind) {
    case MethodSpec::Kind::SstCosine:
      ctx.table = speaker_specific_thresholds(*ctx.enrollment, ctx.id_scorer);
      break;
    case MethodSpec::Kind::SstRelNet: {
      // The relation network is not symmetric in its arguments; pairwise
      // thresholds average the two orderings.
      auto stack = method.checkpoint;
      Scorer symmetric = [stack](const Vector& a, const Vector& b) {
        return 0.5 * (nnet::relation_forward(stack->relnet, a, b) +
                      nnet::relation_forward(stack->relnet, b, a));
      };
      ctx.table = speaker_specific_thresholds(*ctx.enrollment, symmetric);
      break;
    }
    case MethodSpec::Kind::IdnRelNet: {
      for (Index j = 0; j < ctx.enrollment->speaker_count(); ++j)
        ctx.centers.push_back(ctx.enrollment->speaker_centroid(j));
      Rng rng(product_seed);
      ctx.idn_indices = nnet::idn_product_indices(
          static_cast<Index>(ctx.centers.size()),
          method.checkpoint->m_train, rng);
      break;
    }
    default:
      break;
  }
  return ctx;
}

Decision decide_in_context(const MethodContext& ctx, const Vector& query) {
  const MethodSpec& method = *ctx.method;
  const Vector scored_query =
      ctx.adapt_query ? nnet::adapt(method.checkpoint->adapter, query) : query;

  switch (method.kind) {
    case MethodSpec::Kind::FixedCosine:
    case MethodSpec::Kind::FixedRelNet:
      return identify_fixed(scored_query, *ctx.enrollment, ctx.id_scorer,
                            method.tau);
    case MethodSpec::Kind::SstCosine:
    case MethodSpec::Kind::SstRelNet:
      return identify_sst(scored_query, *ctx.enrollment, ctx.id_scorer,
                          ctx.table);
    case MethodSpec::Kind::ScoreNorm: {
      Vector normalized =
          adaptive_score_norm(scored_query, *ctx.enrollment, ctx.trial->cohort,
                              ctx.id_scorer, method.cohort_top_k);
      Decision d;
      d.threshold_used = method.tau;
      d.raw_score = normalized[0];
      d.speaker = 0;
      for (Index j = 1; j < normalized.size(); ++j)
        if (normalized[j] > d.raw_score) {
          d.raw_score = normalized[j];
          d.speaker = j;
        }
      d.accepted = d.raw_score > method.tau;
      return d;
    }
    case MethodSpec::Kind::IdnRelNet: {
      const double imposter_score = nnet::idn_forward(
          method.checkpoint->idn,
          nnet::idn_input_with_indices(ctx.centers, scored_query,
                                       ctx.idn_indices));
      ScoredIdentification id =
          identify(scored_query, *ctx.enrollment, ctx.id_scorer);
      Decision d;
      d.speaker = id.best_index;
      d.raw_score = imposter_score;
      d.threshold_used = method.idn_threshold;
      d.accepted = !(imposter_score > method.idn_threshold);
      return d;
    }
  }
  throw Error(ErrorCode::InvalidConfig, "unknown method kind");
}

}  // namespace

const char* method_kind_name(MethodSpec::Kind kind) {
  switch (kind) {
    case MethodSpec::Kind::FixedCosine: return "fixed_cosine";
    case MethodSpec::Kind::FixedRelNet: return "fixed_relnet";
    case MethodSpec::Kind::ScoreNorm: return "score_norm";
    case MethodSpec::Kind::SstCosine: return "sst_cosine";
    case MethodSpec::Kind::SstRelNet: return "sst_relnet";
    case MethodSpec::Kind::IdnRelNet: return "idn_relnet";
  }
  return "unknown";
}

MethodSpec::Kind parse_method_kind(const std::string& name) {
  if (name == "fixed" || name == "fixed_cosine") return MethodSpec::Kind::FixedCosine;
  if (name == "fixed_relnet") return MethodSpec::Kind::FixedRelNet;
  if (name == "score_norm" || name == "snorm") return MethodSpec::Kind::ScoreNorm;
  if (name == "sst" || name == "sst_cosine") return MethodSpec::Kind::SstCosine;
  if (name == "sst_relnet") return MethodSpec::Kind::SstRelNet;
  if (name == "idn" || name == "idn_relnet") return MethodSpec::Kind::IdnRelNet;
  throw Error(ErrorCode::InvalidConfig, "unknown method '" + name + "'");
}

SpeakerSetTrial build_speaker_set(const Corpus& corpus,
                                  const TrialConfig& config, Rng& rng) {
  if (config.m < 1 || config.n_enroll < 1 || config.queries_per_speaker < 0 ||
      config.imposters_per_speaker < 0 || config.cohort_size < 0)
    throw Error(ErrorCode::InvalidConfig, "invalid trial config");

  const std::vector<Index> pool = corpus.partition_indices(Partition::Test);
  const Index needed = config.n_enroll + config.queries_per_speaker;

  std::vector<Index> eligible;
  for (Index i : pool)
    if (static_cast<Index>(corpus.speaker(i).utterances.size()) >= needed)
      eligible.push_back(i);

  if (static_cast<Index>(pool.size()) < config.m + 2)
    throw Error(ErrorCode::InsufficientSpeakers,
                "test partition has " + std::to_string(pool.size()) +
                    " speakers; need " + std::to_string(config.m + 2));
  if (static_cast<Index>(eligible.size()) < config.m)
    throw Error(ErrorCode::InsufficientUtterances,
                "only " + std::to_string(eligible.size()) +
                    " test speakers have " + std::to_string(needed) +
                    " utterances");

  SpeakerSetTrial trial;
  trial.enrollment = EnrollmentSet(corpus.dim());

  std::vector<std::size_t> picked = rng.sample_without_replacement(
      eligible.size(), static_cast<std::size_t>(config.m));
  std::vector<Index> enrolled;
  for (std::size_t p : picked) enrolled.push_back(eligible[p]);

  for (std::size_t j = 0; j < enrolled.size(); ++j) {
    const SpeakerRecord& spk = corpus.speaker(enrolled[j]);
    std::vector<std::size_t> utts = rng.sample_without_replacement(
        spk.utterances.size(), static_cast<std::size_t>(needed));
    std::vector<Vector> enroll_clips;
    for (Index k = 0; k < config.n_enroll; ++k)
      enroll_clips.push_back(spk.utterances[utts[static_cast<std::size_t>(k)]]);
    trial.enrollment.add_speaker(spk.id, std::move(enroll_clips));
    for (Index q = 0; q < config.queries_per_speaker; ++q) {
      LabeledQuery lq;
      lq.embedding =
          spk.utterances[utts[static_cast<std::size_t>(config.n_enroll + q)]];
      lq.label = static_cast<Index>(j);
      trial.enrolled_queries.push_back(std::move(lq));
    }
  }

  // Remaining test speakers split into a cohort pool and an imposter pool so
  // the three speaker sets stay pairwise disjoint.
  std::vector<Index> rest;
  for (Index i : pool)
    if (std::find(enrolled.begin(), enrolled.end(), i) == enrolled.end())
      rest.push_back(i);
  rng.shuffle(rest);

  const Index cohort_pool_size =
      std::min<Index>(config.cohort_size, static_cast<Index>(rest.size()) - 1);
  std::vector<Index> cohort_pool(rest.begin(), rest.begin() + cohort_pool_size);
  std::vector<Index> imposter_pool(rest.begin() + cohort_pool_size, rest.end());
  if (imposter_pool.empty())
    throw Error(ErrorCode::InsufficientSpeakers, "no imposter speakers left");

  const Index n_imposters = config.m * config.imposters_per_speaker;
  for (Index q = 0; q < n_imposters; ++q) {
    const Index spk_idx = imposter_pool[rng.uniform_index(imposter_pool.size())];
    const SpeakerRecord& spk = corpus.speaker(spk_idx);
    trial.imposter_queries.push_back(
        spk.utterances[rng.uniform_index(spk.utterances.size())]);
    trial.imposter_speaker_ids.push_back(spk.id);
  }
  for (Index q = 0; q < config.cohort_size; ++q) {
    const Index spk_idx = cohort_pool[rng.uniform_index(cohort_pool.size())];
    const SpeakerRecord& spk = corpus.speaker(spk_idx);
    trial.cohort.push_back(
        spk.utterances[rng.uniform_index(spk.utterances.size())]);
    trial.cohort_speaker_ids.push_back(spk.id);
  }
  return trial;
}

Decision decide(const MethodSpec& method, const Vector& query,
                const SpeakerSetTrial& trial) {
  MethodContext ctx = prepare(method, trial, method.seed);
  return decide_in_context(ctx, query);
}

EvalResult evaluate_method(const MethodSpec& method,
                           const std::vector<SpeakerSetTrial>& trials) {
  EvalResult result;
  result.n_sets = static_cast<Index>(trials.size());
  result.per_set.reserve(trials.size());

  for (std::size_t t = 0; t < trials.size(); ++t) {
    const SpeakerSetTrial& trial = trials[t];
    MethodContext ctx =
        prepare(method, trial, derive_seed(method.seed, static_cast<std::uint64_t>(t)));
    double correct = 0.0, imposters_rejected = 0.0;
    for (const LabeledQuery& q : trial.enrolled_queries) {
      Decision d = decide_in_context(ctx, q.embedding);
      if (d.accepted && d.speaker == q.label) correct += 1.0;
    }
    for (const Vector& q : trial.imposter_queries) {
      Decision d = decide_in_context(ctx, q);
      if (!d.accepted) {
        correct += 1.0;
        imposters_rejected += 1.0;
      }
    }
    EvalRecord record;
    const double total = static_cast<double>(trial.enrolled_queries.size() +
                                             trial.imposter_queries.size());
    record.overall_acc = total > 0 ? correct / total : 0.0;
    record.imposter_acc =
        trial.imposter_queries.empty()
            ? 0.0
            : imposters_rejected /
                  static_cast<double>(trial.imposter_queries.size());
    result.per_set.push_back(record);
  }

  std::vector<double> overall, imposter;
  for (const EvalRecord& r : result.per_set) {
    overall.push_back(r.overall_acc);
    imposter.push_back(r.imposter_acc);
  }
  if (result.per_set.size() >= 2) {
    std::tie(result.overall_mean, result.overall_ci95) =
        confidence_interval(overall);
    std::tie(result.imposter_mean, result.imposter_ci95) =
        confidence_interval(imposter);
  } else if (result.per_set.size() == 1) {
    result.overall_mean = overall[0];
    result.imposter_mean = imposter[0];
  }
  return result;
}

std::pair<double, double> confidence_interval(const std::vector<double>& values) {
  if (values.size() < 2)
    throw Error(ErrorCode::TooFewSets,
                "confidence interval needs at least two values");
  const double n = static_cast<double>(values.size());
  // Shifted summation keeps constant inputs at exactly zero variance.
  const double shift = values.front();
  double offset = 0.0;
  for (double v : values) offset += v - shift;
  offset /= n;
  const double mean = shift + offset;
  double ss = 0.0;
  for (double v : values) ss += (v - shift - offset) * (v - shift - offset);
  const double s = std::sqrt(ss / (n - 1.0));
  return {mean, 1.96 * s / std::sqrt(n)};
}

std::pair<double, double> calibrate_fixed_threshold(
    const MethodSpec& prototype, const std::vector<SpeakerSetTrial>& trials,
    const std::vector<double>& grid) {
  if (grid.empty())
    throw Error(ErrorCode::EmptyGrid, "threshold grid is empty");
  if (prototype.kind != MethodSpec::Kind::FixedCosine &&
      prototype.kind != MethodSpec::Kind::FixedRelNet &&
      prototype.kind != MethodSpec::Kind::ScoreNorm)
    throw Error(ErrorCode::InvalidConfig,
                "fixed-threshold calibration needs a fixed-threshold or "
                "score-norm method");

  struct Scored {
    double score;
    bool match;     // argmax equals the true speaker (enrolled queries)
    bool imposter;
  };
  std::vector<Scored> scored;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    MethodContext ctx = prepare(prototype, trials[t],
                                derive_seed(prototype.seed, static_cast<std::uint64_t>(t)));
    for (const LabeledQuery& q : trials[t].enrolled_queries) {
      Decision d = decide_in_context(ctx, q.embedding);
      scored.push_back({d.raw_score, d.speaker == q.label, false});
    }
    for (const Vector& q : trials[t].imposter_queries) {
      Decision d = decide_in_context(ctx, q);
      scored.push_back({d.raw_score, false, true});
    }
  }
  if (scored.empty())
    throw Error(ErrorCode::TooFewSets, "no calibration queries");

  std::vector<double> sorted_grid = grid;
  std::sort(sorted_grid.begin(), sorted_grid.end());
  double best_tau = sorted_grid.front(), best_acc = -1.0;
  for (double tau : sorted_grid) {
    double correct = 0.0;
    for (const Scored& s : scored) {
      const bool accepted = s.score > tau;
      if (s.imposter ? !accepted : (accepted && s.match)) correct += 1.0;
    }
    const double acc = correct / static_cast<double>(scored.size());
    if (acc > best_acc) {
      best_acc = acc;
      best_tau = tau;
    }
  }
  return {best_tau, best_acc};
}

std::vector<TrialPair> verification_trials(
    const MethodSpec& prototype, const std::vector<SpeakerSetTrial>& trials) {
  std::vector<TrialPair> pairs;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    MethodContext ctx = prepare(prototype, trials[t],
                                derive_seed(prototype.seed, static_cast<std::uint64_t>(t)));
    const EnrollmentSet& enrollment = *ctx.enrollment;
    auto score_against_all = [&](const Vector& raw_query, Index target_label) {
      const Vector q = ctx.adapt_query
                           ? nnet::adapt(prototype.checkpoint->adapter, raw_query)
                           : raw_query;
      for (Index j = 0; j < enrollment.speaker_count(); ++j)
        pairs.push_back({ctx.id_scorer(q, enrollment.speaker_centroid(j)),
                         j == target_label});
    };
    for (const LabeledQuery& q : trials[t].enrolled_queries)
      score_against_all(q.embedding, q.label);
    for (const Vector& q : trials[t].imposter_queries)
      score_against_all(q, kImposterLabel);
  }
  return pairs;
}

}  // namespace osid
