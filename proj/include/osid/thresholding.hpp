// include/osid/thresholding.hpp

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

#ifndef OSID_THRESHOLDING_HPP
#define OSID_THRESHOLDING_HPP

#include <string>
#include <utility>
#include <vector>

#include "osid/core.hpp"

namespace osid {

// Acceptance is strict everywhere: a score exactly equal to the threshold is
// rejected as an imposter.
struct Decision {
  bool accepted = false;
  Index speaker = 0;  // identified speaker index (argmax), whether accepted or not
  double raw_score = 0.0;
  double threshold_used = 0.0;
};

struct ThresholdTable {
  enum class Mode { Fixed, PerSpeaker };

  Mode mode = Mode::Fixed;
  double tau = 0.0;           // Fixed
  Vector per_speaker;         // PerSpeaker, length M
  std::vector<std::string> speakers;  // optional ids alongside per_speaker

  static ThresholdTable fixed(double tau) {
    ThresholdTable t;
    t.mode = Mode::Fixed;
    t.tau = tau;
    return t;
  }
};

struct TrialPair {
  double score = 0.0;
  bool is_target = false;
};

struct EerResult {
  double eer = 0.0;
  double threshold = 0.0;
  // Swept operating points, one (threshold, rate) pair per distinct score.
  std::vector<std::pair<double, double>> far_curve;
  std::vector<std::pair<double, double>> frr_curve;
};

Decision identify_fixed(const Vector& query, const EnrollmentSet& enrollment,
                        const Scorer& scorer, double tau);

// Scores of speaker j's raw enrollment utterances against every other
// speaker's raw enrollment utterances: N * N * (M-1) values.
std::vector<double> inter_speaker_similarities(const EnrollmentSet& enrollment,
                                               Index j, const Scorer& scorer);

// Scores over unordered distinct utterance pairs within speaker j:
// N*(N-1)/2 values.
std::vector<double> intra_speaker_similarities(const EnrollmentSet& enrollment,
                                               Index j, const Scorer& scorer);

// Per-speaker thresholds: tau_j = max inter-speaker similarity of speaker j.
// Identification still scores against centroids; the thresholds deliberately
// come from the raw utterance pairs.
ThresholdTable speaker_specific_thresholds(const EnrollmentSet& enrollment,
                                           const Scorer& scorer);

Decision identify_sst(const Vector& query, const EnrollmentSet& enrollment,
                      const Scorer& scorer, const ThresholdTable& table);

/**
   Symmetric adaptive s-norm.  For enrolled speaker j with raw score
   s = scorer(query, C_j):

     normalized_j = 0.5 * ((s - mu_e) / sigma_e + (s - mu_q) / sigma_q)

   where (mu_e, sigma_e) are the mean and sample standard deviation of
   scorer(C_j, cohort_i) over the cohort and (mu_q, sigma_q) likewise for
   scorer(query, cohort_i).  top_k > 0 restricts each side to its top-k
   highest cohort scores before computing the statistics; top_k == 0 uses the
   whole cohort.
*/
Vector adaptive_score_norm(const Vector& query, const EnrollmentSet& enrollment,
                           const std::vector<Vector>& cohort,
                           const Scorer& scorer, Index top_k = 0);

/**
   Equal error rate with the decision rule "accept iff score > tau".  FAR and
   FRR are step functions of tau; the result is the linear interpolation of
   their crossing.  When the crossing sits on a flat segment (FAR == FRR over
   an interval of thresholds) the midpoint of that segment is reported.
*/
EerResult compute_eer(const std::vector<TrialPair>& trials);

// Area under the ROC curve by rank statistic; ties count one half.
double roc_auc(const std::vector<TrialPair>& trials);

// Grid threshold maximizing overall accuracy (right speaker for enrolled
// queries, rejection for imposters); ties break to the smallest threshold.
double optimal_fixed_threshold(const std::vector<LabeledQuery>& calibration,
                               const EnrollmentSet& enrollment,
                               const Scorer& scorer,
                               const std::vector<double>& grid);

}  // namespace osid

#endif  // OSID_THRESHOLDING_HPP
