// src/thresholding.cpp

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

#include "osid/thresholding.hpp"

#include <algorithm>
#include <cmath>

namespace osid {

namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, n-1 denominator
};

MeanStd mean_and_std(const std::vector<double>& xs) {
  MeanStd r;
  const double n = static_cast<double>(xs.size());
  // Shifted summation so constant scores give exactly zero deviation.
  const double shift = xs.front();
  double offset = 0.0;
  for (double x : xs) offset += x - shift;
  offset /= n;
  r.mean = shift + offset;
  double ss = 0.0;
  for (double x : xs) ss += (x - shift - offset) * (x - shift - offset);
  r.std = std::sqrt(ss / (n - 1.0));
  return r;
}

// Keep the k largest values (used by top-k cohort selection).
std::vector<double> top_k_values(std::vector<double> xs, Index k) {
  if (k <= 0 || static_cast<std::size_t>(k) >= xs.size()) return xs;
  std::sort(xs.begin(), xs.end(), std::greater<double>());
  xs.resize(static_cast<std::size_t>(k));
  return xs;
}

}  // namespace

Decision identify_fixed(const Vector& query, const EnrollmentSet& enrollment,
                        const Scorer& scorer, double tau) {
  ScoredIdentification id = identify(query, enrollment, scorer);
  Decision d;
  d.speaker = id.best_index;
  d.raw_score = id.best_score;
  d.threshold_used = tau;
  d.accepted = id.best_score > tau;
  return d;
}

std::vector<double> inter_speaker_similarities(const EnrollmentSet& enrollment,
                                               Index j, const Scorer& scorer) {
  const Index m = enrollment.speaker_count();
  if (m < 2)
    throw Error(ErrorCode::SingleSpeaker,
                "inter-speaker similarities need at least two speakers");
  std::vector<double> scores;
  for (const Vector& own : enrollment.utterances(j)) {
    for (Index u = 0; u < m; ++u) {
      if (u == j) continue;
      for (const Vector& other : enrollment.utterances(u))
        scores.push_back(scorer(own, other));
    }
  }
  return scores;
}

std::vector<double> intra_speaker_similarities(const EnrollmentSet& enrollment,
                                               Index j, const Scorer& scorer) {
  const std::vector<Vector>& utts = enrollment.utterances(j);
  const std::size_t n = utts.size();
  if (n < 2)
    throw Error(ErrorCode::SingleUtterance,
                "intra-speaker similarities need at least two utterances");
  std::vector<double> scores;
  scores.reserve(n * (n - 1) / 2);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l)
      scores.push_back(scorer(utts[k], utts[l]));
  return scores;
}

ThresholdTable speaker_specific_thresholds(const EnrollmentSet& enrollment,
                                           const Scorer& scorer) {
  const Index m = enrollment.speaker_count();
  if (m < 2)
    throw Error(ErrorCode::SingleSpeaker,
                "speaker-specific thresholds need at least two speakers");
  ThresholdTable table;
  table.mode = ThresholdTable::Mode::PerSpeaker;
  table.per_speaker.resize(m);
  table.speakers.reserve(m);
  for (Index j = 0; j < m; ++j) {
    std::vector<double> inter = inter_speaker_similarities(enrollment, j, scorer);
    table.per_speaker[j] = *std::max_element(inter.begin(), inter.end());
    table.speakers.push_back(enrollment.speaker_id(j));
  }
  return table;
}

Decision identify_sst(const Vector& query, const EnrollmentSet& enrollment,
                      const Scorer& scorer, const ThresholdTable& table) {
  if (table.mode != ThresholdTable::Mode::PerSpeaker ||
      table.per_speaker.size() != enrollment.speaker_count())
    throw Error(ErrorCode::TableLengthMismatch,
                "per-speaker table of length " +
                    std::to_string(table.per_speaker.size()) +
                    " against enrollment of " +
                    std::to_string(enrollment.speaker_count()) + " speakers");
  ScoredIdentification id = identify(query, enrollment, scorer);
  Decision d;
  d.speaker = id.best_index;
  d.raw_score = id.best_score;
  d.threshold_used = table.per_speaker[id.best_index];
  d.accepted = id.best_score > d.threshold_used;
  return d;
}

Vector adaptive_score_norm(const Vector& query, const EnrollmentSet& enrollment,
                           const std::vector<Vector>& cohort,
                           const Scorer& scorer, Index top_k) {
  if (cohort.empty())
    throw Error(ErrorCode::EmptyCohort, "adaptive score norm needs a cohort");

  std::vector<double> query_side;
  query_side.reserve(cohort.size());
  for (const Vector& c : cohort) query_side.push_back(scorer(query, c));
  query_side = top_k_values(std::move(query_side), top_k);
  if (query_side.size() < 2)
    throw Error(ErrorCode::DegenerateCohort,
                "cohort too small for a standard deviation");
  const MeanStd q = mean_and_std(query_side);
  if (q.std < 1e-9)
    throw Error(ErrorCode::DegenerateCohort, "query-side cohort scores are constant");

  const Index m = enrollment.speaker_count();
  Vector normalized(m);
  for (Index j = 0; j < m; ++j) {
    const Vector& center = enrollment.speaker_centroid(j);
    std::vector<double> enroll_side;
    enroll_side.reserve(cohort.size());
    for (const Vector& c : cohort) enroll_side.push_back(scorer(center, c));
    enroll_side = top_k_values(std::move(enroll_side), top_k);
    const MeanStd e = mean_and_std(enroll_side);
    if (e.std < 1e-9)
      throw Error(ErrorCode::DegenerateCohort,
                  "enrollment-side cohort scores are constant for speaker " +
                      enrollment.speaker_id(j));
    const double s = scorer(query, center);
    normalized[j] = 0.5 * ((s - e.mean) / e.std + (s - q.mean) / q.std);
  }
  return normalized;
}

EerResult compute_eer(const std::vector<TrialPair>& trials) {
  std::vector<double> targets, nontargets;
  for (const TrialPair& t : trials)
    (t.is_target ? targets : nontargets).push_back(t.score);
  if (targets.empty() || nontargets.empty())
    throw Error(ErrorCode::MissingClass,
                targets.empty() ? "no target trials" : "no non-target trials");
  std::sort(targets.begin(), targets.end());
  std::sort(nontargets.begin(), nontargets.end());

  std::vector<double> thresholds;
  thresholds.reserve(trials.size());
  for (const TrialPair& t : trials) thresholds.push_back(t.score);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  const double n_tar = static_cast<double>(targets.size());
  const double n_non = static_cast<double>(nontargets.size());
  auto far_at = [&](double tau) {
    // accepted non-targets: scores strictly above tau
    auto it = std::upper_bound(nontargets.begin(), nontargets.end(), tau);
    return static_cast<double>(nontargets.end() - it) / n_non;
  };
  auto frr_at = [&](double tau) {
    // rejected targets: scores at or below tau
    auto it = std::upper_bound(targets.begin(), targets.end(), tau);
    return static_cast<double>(it - targets.begin()) / n_tar;
  };

  EerResult result;
  result.far_curve.reserve(thresholds.size());
  result.frr_curve.reserve(thresholds.size());
  for (double tau : thresholds) {
    result.far_curve.emplace_back(tau, far_at(tau));
    result.frr_curve.emplace_back(tau, frr_at(tau));
  }

  // FAR - FRR is non-increasing in tau, from +1 below the smallest score to
  // -1 at the largest.  Locate the first swept point where it is <= 0 and
  // interpolate the crossing; a flat zero segment reports its midpoint.
  std::size_t j = 0;
  while (j < thresholds.size() &&
         result.far_curve[j].second - result.frr_curve[j].second > 0.0)
    ++j;

  const double far_j = result.far_curve[j].second;
  const double frr_j = result.frr_curve[j].second;
  if (far_j == frr_j) {
    result.eer = far_j;
    result.threshold = (j + 1 < thresholds.size())
                           ? 0.5 * (thresholds[j] + thresholds[j + 1])
                           : thresholds[j];
  } else {
    double tau_prev, far_prev, frr_prev;
    if (j == 0) {
      tau_prev = thresholds.front() - 1.0;  // below every score
      far_prev = 1.0;
      frr_prev = 0.0;
    } else {
      tau_prev = thresholds[j - 1];
      far_prev = result.far_curve[j - 1].second;
      frr_prev = result.frr_curve[j - 1].second;
    }
    const double d_prev = far_prev - frr_prev;
    const double d_j = far_j - frr_j;
    const double t = d_prev / (d_prev - d_j);
    result.eer = far_prev + t * (far_j - far_prev);
    result.threshold = tau_prev + t * (thresholds[j] - tau_prev);
  }
  return result;
}

double roc_auc(const std::vector<TrialPair>& trials) {
  std::vector<TrialPair> sorted = trials;
  std::sort(sorted.begin(), sorted.end(),
            [](const TrialPair& a, const TrialPair& b) { return a.score < b.score; });
  double n_pos = 0, n_neg = 0, rank_sum = 0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t k = i;
    while (k < sorted.size() && sorted[k].score == sorted[i].score) ++k;
    const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(k));
    for (std::size_t t = i; t < k; ++t) {
      if (sorted[t].is_target) {
        n_pos += 1;
        rank_sum += avg_rank;
      } else {
        n_neg += 1;
      }
    }
    i = k;
  }
  if (n_pos == 0 || n_neg == 0)
    throw Error(ErrorCode::MissingClass, "roc_auc needs both classes");
  return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg);
}

double optimal_fixed_threshold(const std::vector<LabeledQuery>& calibration,
                               const EnrollmentSet& enrollment,
                               const Scorer& scorer,
                               const std::vector<double>& grid) {
  if (grid.empty())
    throw Error(ErrorCode::EmptyGrid, "threshold grid is empty");

  // Scores do not depend on tau; identify once per query, then sweep.
  struct Scored {
    Index best;
    double score;
    Index label;
  };
  std::vector<Scored> scored;
  scored.reserve(calibration.size());
  for (const LabeledQuery& q : calibration) {
    ScoredIdentification id = identify(q.embedding, enrollment, scorer);
    scored.push_back({id.best_index, id.best_score, q.label});
  }

  std::vector<double> sorted_grid = grid;
  std::sort(sorted_grid.begin(), sorted_grid.end());

  double best_tau = sorted_grid.front();
  double best_acc = -1.0;
  for (double tau : sorted_grid) {
    double correct = 0;
    for (const Scored& s : scored) {
      const bool accepted = s.score > tau;
      if (s.label == kImposterLabel) {
        if (!accepted) correct += 1;
      } else if (accepted && s.best == s.label) {
        correct += 1;
      }
    }
    const double acc = correct / static_cast<double>(scored.size());
    if (acc > best_acc) {
      best_acc = acc;
      best_tau = tau;
    }
  }
  return best_tau;
}

}  // namespace osid
