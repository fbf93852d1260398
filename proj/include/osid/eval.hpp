// include/osid/eval.hpp

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

#ifndef OSID_EVAL_HPP
#define OSID_EVAL_HPP

#include <memory>
#include <string>
#include <vector>

#include "osid/corpus.hpp"
#include "osid/nnet.hpp"
#include "osid/rng.hpp"
#include "osid/thresholding.hpp"

namespace osid {

struct TrialConfig {
  Index m = 5;                    // enrolled speakers per set
  Index n_enroll = 5;             // enrollment clips per speaker
  Index queries_per_speaker = 10; // enrolled queries per speaker
  Index imposters_per_speaker = 10;  // imposter queries per enrolled speaker
  Index cohort_size = 10;         // cohort utterances for score normalization
};

struct SpeakerSetTrial {
  EnrollmentSet enrollment;
  std::vector<LabeledQuery> enrolled_queries;  // label = enrolled speaker index
  std::vector<Vector> imposter_queries;
  std::vector<Vector> cohort;
  std::vector<std::string> imposter_speaker_ids;  // one per imposter query
  std::vector<std::string> cohort_speaker_ids;    // one per cohort utterance

  SpeakerSetTrial() : enrollment(0) {}
};

// Enrollment, enrolled-query, imposter and cohort speaker pools are pairwise
// disjoint; all sampling is without replacement within a speaker and
// deterministic given the rng.
SpeakerSetTrial build_speaker_set(const Corpus& corpus,
                                  const TrialConfig& config, Rng& rng);

struct MethodSpec {
  enum class Kind {
    FixedCosine,
    FixedRelNet,
    ScoreNorm,   // cosine scores, symmetric adaptive s-norm, fixed tau on max
    SstCosine,
    SstRelNet,
    IdnRelNet,
  };

  Kind kind = Kind::FixedCosine;
  double tau = 0.0;            // fixed / score-norm threshold
  double idn_threshold = 0.5;  // imposter score gate
  Index cohort_top_k = 0;      // 0 = use the whole cohort
  std::shared_ptr<const nnet::ModelStack> checkpoint;  // relnet/idn variants
  std::uint64_t seed = 0;      // product-slot sampling stream (idn)
};

const char* method_kind_name(MethodSpec::Kind kind);
MethodSpec::Kind parse_method_kind(const std::string& name);

/**
   Single-query decision under a method.  Threshold variants accept when the
   (possibly normalized) best score strictly exceeds their threshold.  For
   IdnRelNet the decision gate is the imposter score: imposter iff
   I > idn_threshold, and Decision.raw_score carries I itself (low accepts),
   with the identified speaker taken from the relation-score argmax.
*/
Decision decide(const MethodSpec& method, const Vector& query,
                const SpeakerSetTrial& trial);

struct EvalRecord {
  double overall_acc = 0.0;
  double imposter_acc = 0.0;
};

struct EvalResult {
  double overall_mean = 0.0, overall_ci95 = 0.0;
  double imposter_mean = 0.0, imposter_ci95 = 0.0;
  Index n_sets = 0;
  std::vector<EvalRecord> per_set;
};

// Overall accuracy counts an enrolled query as correct only when it is both
// accepted and attributed to the right speaker; imposter accuracy is the
// imposter-query rejection rate.
EvalResult evaluate_method(const MethodSpec& method,
                           const std::vector<SpeakerSetTrial>& trials);

// (mean, 1.96 * s / sqrt(n)) with the n-1 sample standard deviation.
std::pair<double, double> confidence_interval(const std::vector<double>& values);

// Grid threshold maximizing pooled accuracy over many calibration trials for
// a fixed-threshold or score-norm method (tau in the prototype is ignored;
// score-norm sweeps the grid over normalized scores).  Ties break to the
// smallest threshold.  Returns (tau, accuracy at tau).
std::pair<double, double> calibrate_fixed_threshold(
    const MethodSpec& prototype, const std::vector<SpeakerSetTrial>& trials,
    const std::vector<double>& grid);

// Verification-style trial pairs pooled over speaker sets: every enrolled
// query scored against every centroid (target for its own speaker), every
// imposter query scored against all centroids as non-targets.
std::vector<TrialPair> verification_trials(
    const MethodSpec& prototype, const std::vector<SpeakerSetTrial>& trials);

}  // namespace osid

#endif  // OSID_EVAL_HPP
