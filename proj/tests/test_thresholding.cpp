// tests/test_thresholding.cpp

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

#include <algorithm>
#include <cmath>
#include <limits>

#include "osid/rng.hpp"
#include "osid/thresholding.hpp"

using namespace osid;

namespace {

Vector random_unit(Index dim, Rng& rng) {
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = rng.gaussian();
  return v / v.norm();
}

EnrollmentSet random_enrollment(Index m, Index n, Index dim, Rng& rng) {
  EnrollmentSet e(dim);
  for (Index j = 0; j < m; ++j) {
    std::vector<Vector> utts;
    for (Index k = 0; k < n; ++k) utts.push_back(random_unit(dim, rng));
    e.add_speaker("s" + std::to_string(j), std::move(utts));
  }
  return e;
}

// Independent of compute_eer: scan every distinct score as a threshold and
// minimize |FAR - FRR| directly.
double brute_force_eer(const std::vector<TrialPair>& trials) {
  std::vector<double> thresholds;
  for (const TrialPair& t : trials) thresholds.push_back(t.score);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  double n_tar = 0, n_non = 0;
  for (const TrialPair& t : trials) (t.is_target ? n_tar : n_non) += 1;

  double best_gap = 1e9, best_eer = 0.0;
  for (double tau : thresholds) {
    double fa = 0, fr = 0;
    for (const TrialPair& t : trials) {
      if (!t.is_target && t.score > tau) fa += 1;
      if (t.is_target && t.score <= tau) fr += 1;
    }
    const double far = fa / n_non, frr = fr / n_tar;
    if (std::abs(far - frr) < best_gap) {
      best_gap = std::abs(far - frr);
      best_eer = 0.5 * (far + frr);
    }
  }
  return best_eer;
}

}  // namespace

TEST_CASE("identify_fixed boundary and sweep oracle") {
  Rng rng(21);
  EnrollmentSet enrollment = random_enrollment(5, 3, 16, rng);
  Vector query = random_unit(16, rng);
  ScoredIdentification id = identify(query, enrollment, cosine_scorer());

  Decision clearly = identify_fixed(query, enrollment, cosine_scorer(),
                                    id.best_score - 0.4);
  CHECK(clearly.accepted);
  CHECK(clearly.speaker == id.best_index);

  Decision boundary =
      identify_fixed(query, enrollment, cosine_scorer(), id.best_score);
  CHECK_FALSE(boundary.accepted);  // strict inequality

  // exhaustive sweep oracle over a grid
  for (int g = 0; g <= 20; ++g) {
    const double tau = -1.0 + 2.0 * g / 20.0;
    Decision d = identify_fixed(query, enrollment, cosine_scorer(), tau);
    CHECK(d.accepted == (id.best_score > tau));
  }

  const double inf = std::numeric_limits<double>::infinity();
  CHECK(identify_fixed(query, enrollment, cosine_scorer(), -inf).accepted);
  CHECK_FALSE(identify_fixed(query, enrollment, cosine_scorer(), inf).accepted);
}

TEST_CASE("inter and intra similarity counts") {
  Rng rng(22);
  EnrollmentSet e21 = random_enrollment(2, 1, 8, rng);
  CHECK(inter_speaker_similarities(e21, 0, cosine_scorer()).size() == 1);

  EnrollmentSet e32 = random_enrollment(3, 2, 8, rng);
  for (Index j = 0; j < 3; ++j)
    CHECK(inter_speaker_similarities(e32, j, cosine_scorer()).size() == 8);

  EnrollmentSet e12 = random_enrollment(1, 2, 8, rng);
  CHECK_THROWS_AS(inter_speaker_similarities(e12, 0, cosine_scorer()), Error);

  EnrollmentSet e_n2 = random_enrollment(2, 2, 8, rng);
  CHECK(intra_speaker_similarities(e_n2, 0, cosine_scorer()).size() == 1);
  EnrollmentSet e_n5 = random_enrollment(2, 5, 8, rng);
  CHECK(intra_speaker_similarities(e_n5, 0, cosine_scorer()).size() == 10);

  EnrollmentSet e_n1 = random_enrollment(2, 1, 8, rng);
  CHECK_THROWS_AS(intra_speaker_similarities(e_n1, 0, cosine_scorer()), Error);
}

TEST_CASE("inter similarities equal brute-force triple loop as a multiset") {
  Rng rng(23);
  EnrollmentSet e = random_enrollment(4, 3, 10, rng);
  for (Index j = 0; j < 4; ++j) {
    std::vector<double> got = inter_speaker_similarities(e, j, cosine_scorer());
    std::vector<double> expected;
    for (Index u = 0; u < 4; ++u) {
      if (u == j) continue;
      for (const Vector& a : e.utterances(j))
        for (const Vector& b : e.utterances(u))
          expected.push_back(cosine_similarity(a, b));
    }
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == expected[i]);
  }
}

TEST_CASE("intra similarities of duplicated utterances are all 1") {
  EnrollmentSet e(4);
  Vector v(4);
  v << 0.5, 0.5, 0.5, 0.5;
  e.add_speaker("dup", {v, v, v});
  e.add_speaker("other", {Vector::Ones(4)});
  for (double s : intra_speaker_similarities(e, 0, cosine_scorer()))
    CHECK(s == doctest::Approx(1.0));
}

TEST_CASE("speaker_specific_thresholds direct cases") {
  EnrollmentSet ortho(2);
  ortho.add_speaker("x", {Vector::Unit(2, 0)});
  ortho.add_speaker("y", {Vector::Unit(2, 1)});
  ThresholdTable t = speaker_specific_thresholds(ortho, cosine_scorer());
  CHECK(t.mode == ThresholdTable::Mode::PerSpeaker);
  CHECK(t.per_speaker[0] == doctest::Approx(0.0));
  CHECK(t.per_speaker[1] == doctest::Approx(0.0));

  // a speaker duplicated across two identities rejects everything
  EnrollmentSet dup(3);
  Vector v = l2_normalize(Vector::Ones(3));
  dup.add_speaker("a", {v});
  dup.add_speaker("b", {v});
  ThresholdTable td = speaker_specific_thresholds(dup, cosine_scorer());
  CHECK(td.per_speaker[0] == doctest::Approx(1.0));

  EnrollmentSet single(2);
  single.add_speaker("only", {Vector::Unit(2, 0)});
  CHECK_THROWS_AS(speaker_specific_thresholds(single, cosine_scorer()), Error);
}

TEST_CASE("SST equals exhaustive max over cross pairs (property)") {
  Rng rng(24);
  for (int trial = 0; trial < 60; ++trial) {
    const Index m = 2 + static_cast<Index>(rng.uniform_index(9));   // [2,10]
    const Index n = 1 + static_cast<Index>(rng.uniform_index(8));   // [1,8]
    const Index dim = 4 + static_cast<Index>(rng.uniform_index(61));  // [4,64]
    EnrollmentSet e = random_enrollment(m, n, dim, rng);
    ThresholdTable table = speaker_specific_thresholds(e, cosine_scorer());
    for (Index j = 0; j < m; ++j) {
      double expected = -2.0;
      for (Index u = 0; u < m; ++u) {
        if (u == j) continue;
        for (const Vector& a : e.utterances(j))
          for (const Vector& b : e.utterances(u))
            expected = std::max(expected, cosine_similarity(a, b));
      }
      CHECK(table.per_speaker[j] == expected);  // exact
    }
  }
}

TEST_CASE("identify_sst consults only the identified speaker's threshold") {
  EnrollmentSet e(6);
  for (int j = 0; j < 3; ++j) {
    Vector c = Vector::Zero(6);
    c[j] = 1.0;
    e.add_speaker("s" + std::to_string(j), {c});
  }
  ThresholdTable table;
  table.mode = ThresholdTable::Mode::PerSpeaker;
  table.per_speaker.resize(3);
  table.per_speaker << 0.9, 0.9, 0.7;

  Vector query = Vector::Zero(6);
  query[2] = 1.0;
  query[0] = 0.3;  // best is speaker 2 with score ~0.96
  Decision d = identify_sst(query, e, cosine_scorer(), table);
  CHECK(d.accepted);
  CHECK(d.speaker == 2);

  // boundary: score exactly equal to its threshold rejects
  ScoredIdentification id = identify(query, e, cosine_scorer());
  table.per_speaker[2] = id.best_score;
  CHECK_FALSE(identify_sst(query, e, cosine_scorer(), table).accepted);

  ThresholdTable wrong;
  wrong.mode = ThresholdTable::Mode::PerSpeaker;
  wrong.per_speaker.resize(2);
  CHECK_THROWS_AS(identify_sst(query, e, cosine_scorer(), wrong), Error);
}

TEST_CASE("identify_sst agrees with argmax-then-lookup oracle on 1000 queries") {
  Rng rng(25);
  EnrollmentSet e = random_enrollment(6, 4, 16, rng);
  ThresholdTable table = speaker_specific_thresholds(e, cosine_scorer());
  for (int q = 0; q < 1000; ++q) {
    Vector query = random_unit(16, rng);
    Decision d = identify_sst(query, e, cosine_scorer(), table);
    ScoredIdentification id = identify(query, e, cosine_scorer());
    CHECK(d.speaker == id.best_index);
    CHECK(d.accepted == (id.best_score > table.per_speaker[id.best_index]));
  }
}

TEST_CASE("SST monotonicity: raising one threshold only flips toward rejection") {
  Rng rng(26);
  EnrollmentSet e = random_enrollment(5, 3, 12, rng);
  ThresholdTable table = speaker_specific_thresholds(e, cosine_scorer());
  for (int q = 0; q < 200; ++q) {
    Vector query = random_unit(12, rng);
    Decision before = identify_sst(query, e, cosine_scorer(), table);
    const Index j = static_cast<Index>(rng.uniform_index(5));
    ThresholdTable raised = table;
    raised.per_speaker[j] += 0.25;
    Decision after = identify_sst(query, e, cosine_scorer(), raised);
    CHECK(after.speaker == before.speaker);
    if (before.speaker != j) {
      CHECK(after.accepted == before.accepted);
    } else if (!before.accepted) {
      CHECK_FALSE(after.accepted);
    }
  }
}

TEST_CASE("adaptive_score_norm centered and degenerate cases") {
  Rng rng(27);
  EnrollmentSet e = random_enrollment(3, 2, 8, rng);

  // constant cohort scores have zero variance
  Vector c = random_unit(8, rng);
  CHECK_THROWS_AS(adaptive_score_norm(random_unit(8, rng), e, {c, c, c, c},
                                      cosine_scorer()),
                  Error);

  CHECK_THROWS_AS(adaptive_score_norm(random_unit(8, rng), e, {},
                                      cosine_scorer()),
                  Error);
}

TEST_CASE("adaptive_score_norm matches a two-pass spreadsheet recomputation") {
  Rng rng(28);
  EnrollmentSet e = random_enrollment(3, 2, 8, rng);
  std::vector<Vector> cohort;
  for (int i = 0; i < 4; ++i) cohort.push_back(random_unit(8, rng));
  Vector query = random_unit(8, rng);

  Vector got = adaptive_score_norm(query, e, cohort, cosine_scorer());

  // independent two-pass mean/std oracle
  auto stats = [](const std::vector<double>& xs) {
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::pair<double, double>{
        mean, std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0))};
  };
  std::vector<double> qs;
  for (const Vector& c : cohort) qs.push_back(cosine_similarity(query, c));
  const auto [mu_q, sd_q] = stats(qs);
  for (Index j = 0; j < 3; ++j) {
    std::vector<double> es;
    for (const Vector& c : cohort)
      es.push_back(cosine_similarity(e.speaker_centroid(j), c));
    const auto [mu_e, sd_e] = stats(es);
    const double s = cosine_similarity(query, e.speaker_centroid(j));
    const double expected = 0.5 * ((s - mu_e) / sd_e + (s - mu_q) / sd_q);
    CHECK(got[j] == doctest::Approx(expected).epsilon(1e-12));
  }

  // a raw score equal to both cohort means normalizes to zero
  {
    std::vector<double> es;
    for (const Vector& c : cohort)
      es.push_back(cosine_similarity(e.speaker_centroid(0), c));
    const auto [mu_e, sd_e] = stats(es);
    const double zero_norm =
        0.5 * ((mu_e - mu_e) / sd_e + (mu_q - mu_q) / sd_q);
    CHECK(zero_norm == 0.0);
  }
}

TEST_CASE("adaptive_score_norm top-k restriction matches a manual oracle") {
  Rng rng(29);
  EnrollmentSet e = random_enrollment(2, 2, 8, rng);
  std::vector<Vector> cohort;
  for (int i = 0; i < 8; ++i) cohort.push_back(random_unit(8, rng));
  Vector query = random_unit(8, rng);
  const Index k = 4;
  Vector topk = adaptive_score_norm(query, e, cohort, cosine_scorer(), k);

  auto stats_of_top = [&](std::vector<double> xs) {
    std::sort(xs.begin(), xs.end(), std::greater<double>());
    xs.resize(k);
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= k;
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::pair<double, double>{mean, std::sqrt(ss / (k - 1.0))};
  };
  std::vector<double> qs;
  for (const Vector& c : cohort) qs.push_back(cosine_similarity(query, c));
  const auto [mu_q, sd_q] = stats_of_top(qs);
  for (Index j = 0; j < 2; ++j) {
    std::vector<double> es;
    for (const Vector& c : cohort)
      es.push_back(cosine_similarity(e.speaker_centroid(j), c));
    const auto [mu_e, sd_e] = stats_of_top(es);
    const double s = cosine_similarity(query, e.speaker_centroid(j));
    CHECK(topk[j] == doctest::Approx(0.5 * ((s - mu_e) / sd_e +
                                            (s - mu_q) / sd_q))
                         .epsilon(1e-12));
  }
}

TEST_CASE("compute_eer separable and inverted cases") {
  std::vector<TrialPair> separable = {
      {0.9, true}, {0.8, true}, {0.1, false}, {0.2, false}};
  EerResult r = compute_eer(separable);
  CHECK(r.eer == doctest::Approx(0.0));
  CHECK(r.threshold > 0.2);
  CHECK(r.threshold <= 0.8);

  std::vector<TrialPair> inverted = {{0.2, true}, {0.8, false}};
  CHECK(compute_eer(inverted).eer == doctest::Approx(1.0));

  CHECK_THROWS_AS(compute_eer({{0.5, true}}), Error);
  CHECK_THROWS_AS(compute_eer({{0.5, false}}), Error);
}

TEST_CASE("compute_eer matches the brute-force minimizer on random sets") {
  Rng rng(30);
  for (int t = 0; t < 40; ++t) {
    std::vector<TrialPair> trials;
    const int n_tar = 30 + static_cast<int>(rng.uniform_index(30));
    const int n_non = 30 + static_cast<int>(rng.uniform_index(30));
    for (int i = 0; i < n_tar; ++i)
      trials.push_back({0.5 + 0.3 * rng.gaussian(), true});
    for (int i = 0; i < n_non; ++i)
      trials.push_back({-0.1 + 0.3 * rng.gaussian(), false});
    const double tolerance = 1.0 / static_cast<double>(trials.size());
    CHECK(std::abs(compute_eer(trials).eer - brute_force_eer(trials)) <=
          tolerance);
  }
}

TEST_CASE("compute_eer invariant under strictly increasing transforms") {
  Rng rng(31);
  std::vector<TrialPair> trials;
  for (int i = 0; i < 50; ++i) trials.push_back({rng.gaussian(), true});
  for (int i = 0; i < 50; ++i) trials.push_back({rng.gaussian() - 0.8, false});
  EerResult base = compute_eer(trials);

  std::vector<TrialPair> mapped = trials;
  for (TrialPair& t : mapped) t.score = 2.0 * t.score + 1.0;
  EerResult transformed = compute_eer(mapped);
  CHECK(transformed.eer == doctest::Approx(base.eer).epsilon(1e-12));
  CHECK(transformed.threshold ==
        doctest::Approx(2.0 * base.threshold + 1.0).epsilon(1e-9));
}

TEST_CASE("eer curves sweep every distinct score") {
  std::vector<TrialPair> trials = {
      {0.1, false}, {0.4, true}, {0.4, false}, {0.7, true}};
  EerResult r = compute_eer(trials);
  CHECK(r.far_curve.size() == 3);  // distinct scores only
  CHECK(r.frr_curve.size() == 3);
  // FAR falls and FRR rises along the sweep
  CHECK(r.far_curve.front().second >= r.far_curve.back().second);
  CHECK(r.frr_curve.front().second <= r.frr_curve.back().second);
}

TEST_CASE("roc_auc basics and pair-count oracle") {
  CHECK(roc_auc({{0.9, true}, {0.8, true}, {0.2, false}}) == doctest::Approx(1.0));
  CHECK(roc_auc({{0.1, true}, {0.9, false}}) == doctest::Approx(0.0));

  Rng rng(32);
  std::vector<TrialPair> trials;
  for (int i = 0; i < 40; ++i) trials.push_back({rng.gaussian() + 0.5, true});
  for (int i = 0; i < 60; ++i) trials.push_back({rng.gaussian(), false});
  double expected = 0.0;
  for (const TrialPair& a : trials) {
    if (!a.is_target) continue;
    for (const TrialPair& b : trials) {
      if (b.is_target) continue;
      if (a.score > b.score) expected += 1.0;
      else if (a.score == b.score) expected += 0.5;
    }
  }
  expected /= 40.0 * 60.0;
  CHECK(roc_auc(trials) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("optimal_fixed_threshold grid behavior") {
  Rng rng(33);
  EnrollmentSet e(8);
  for (int j = 0; j < 3; ++j) {
    Vector c = Vector::Zero(8);
    c[j] = 1.0;
    e.add_speaker("s" + std::to_string(j), {c});
  }

  // separable: enrolled queries score 1 on their speaker, imposters ~0.15
  std::vector<LabeledQuery> calibration;
  for (Index j = 0; j < 3; ++j) {
    LabeledQuery q;
    q.embedding = e.speaker_centroid(j);
    q.label = j;
    calibration.push_back(q);
  }
  for (int i = 0; i < 3; ++i) {
    LabeledQuery q;
    Vector v = Vector::Zero(8);
    v[5 + i % 3] = 1.0;
    v[i % 3] = 0.15;  // slight overlap with an enrolled axis
    q.embedding = v / v.norm();
    q.label = kImposterLabel;
    calibration.push_back(q);
  }
  std::vector<double> grid;
  for (int g = 0; g <= 10; ++g) grid.push_back(g / 10.0);
  const double tau = optimal_fixed_threshold(calibration, e, cosine_scorer(), grid);
  // imposters score ~0.148, enrolled queries 1.0; the smallest grid point in
  // the gap wins
  CHECK(tau == 0.2);

  // all-imposter calibration: rejecting everything wins, and the smallest
  // grid point achieving it is at or above every score
  std::vector<LabeledQuery> imposters_only(calibration.begin() + 3,
                                           calibration.end());
  const double tau_imp =
      optimal_fixed_threshold(imposters_only, e, cosine_scorer(), {0.5, -0.5, 1.0});
  CHECK(tau_imp == 0.5);

  CHECK_THROWS_AS(optimal_fixed_threshold(calibration, e, cosine_scorer(), {}),
                  Error);
}

TEST_CASE("optimal_fixed_threshold matches brute-force grid evaluation") {
  Rng rng(34);
  EnrollmentSet e = random_enrollment(4, 3, 12, rng);
  std::vector<LabeledQuery> calibration;
  for (int q = 0; q < 60; ++q) {
    LabeledQuery lq;
    lq.embedding = random_unit(12, rng);
    lq.label = (q % 2 == 0) ? static_cast<Index>(rng.uniform_index(4))
                            : kImposterLabel;
    calibration.push_back(lq);
  }
  std::vector<double> grid;
  for (int g = 0; g <= 100; ++g) grid.push_back(-1.0 + 2.0 * g / 100.0);

  const double tau = optimal_fixed_threshold(calibration, e, cosine_scorer(), grid);

  // brute force: accuracy at every grid point from first principles
  double best_acc = -1.0, best_tau = 0.0;
  for (double g : grid) {
    double correct = 0;
    for (const LabeledQuery& q : calibration) {
      ScoredIdentification id = identify(q.embedding, e, cosine_scorer());
      const bool accepted = id.best_score > g;
      if (q.label == kImposterLabel ? !accepted
                                    : (accepted && id.best_index == q.label))
        correct += 1;
    }
    const double acc = correct / static_cast<double>(calibration.size());
    if (acc > best_acc) {
      best_acc = acc;
      best_tau = g;
    }
  }
  CHECK(tau == best_tau);
}
