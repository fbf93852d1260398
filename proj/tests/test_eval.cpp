// tests/test_eval.cpp

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

#include <set>

#include "osid/eval.hpp"
#include "osid/synthdata.hpp"

using namespace osid;

namespace {

Corpus test_corpus(Index dim, Index speakers, Index utterances, double spread,
                   std::uint64_t seed) {
  return generate_corpus({dim, speakers, utterances, spread, seed},
                         Partition::Test, "test_");
}

// A separable trial: enrolled speakers on distinct axes, imposters on other
// axes, queries equal to enrollment clips.
SpeakerSetTrial axis_trial(Index m, Index dim) {
  SpeakerSetTrial trial;
  trial.enrollment = EnrollmentSet(dim);
  for (Index j = 0; j < m; ++j) {
    Vector c = Vector::Unit(dim, j);
    trial.enrollment.add_speaker("s" + std::to_string(j), {c, c});
    for (int q = 0; q < 2; ++q) {
      LabeledQuery lq;
      lq.embedding = c;
      lq.label = j;
      trial.enrolled_queries.push_back(lq);
    }
  }
  for (Index q = 0; q < 2 * m; ++q) {
    trial.imposter_queries.push_back(Vector::Unit(dim, m + (q % m)));
    trial.imposter_speaker_ids.push_back("imp" + std::to_string(q % m));
  }
  for (Index c = 0; c < 4; ++c) {
    Vector v = Vector::Unit(dim, 2 * m + (c % 2));
    v[dim - 1] = 0.3 * (c + 1);
    trial.cohort.push_back(v / v.norm());
    trial.cohort_speaker_ids.push_back("coh" + std::to_string(c % 2));
  }
  return trial;
}

}  // namespace

TEST_CASE("build_speaker_set counts and disjointness") {
  Corpus corpus = test_corpus(16, 40, 25, 0.3, 200);
  TrialConfig config;  // defaults: m=5, 5 enroll, 10 queries, 10M imposters
  Rng rng(1);
  SpeakerSetTrial trial = build_speaker_set(corpus, config, rng);

  CHECK(trial.enrollment.speaker_count() == 5);
  for (Index j = 0; j < 5; ++j)
    CHECK(trial.enrollment.utterances(j).size() == 5);
  CHECK(trial.enrolled_queries.size() == 50);
  CHECK(trial.imposter_queries.size() == 50);
  CHECK(trial.cohort.size() == 10);

  std::set<std::string> enrolled_ids, imposter_ids, cohort_ids;
  for (Index j = 0; j < 5; ++j) enrolled_ids.insert(trial.enrollment.speaker_id(j));
  imposter_ids.insert(trial.imposter_speaker_ids.begin(),
                      trial.imposter_speaker_ids.end());
  cohort_ids.insert(trial.cohort_speaker_ids.begin(),
                    trial.cohort_speaker_ids.end());
  for (const std::string& id : imposter_ids) {
    CHECK(enrolled_ids.count(id) == 0);
    CHECK(cohort_ids.count(id) == 0);
  }
  for (const std::string& id : cohort_ids) CHECK(enrolled_ids.count(id) == 0);

  Rng rng_a(9), rng_b(9);
  SpeakerSetTrial a = build_speaker_set(corpus, config, rng_a);
  SpeakerSetTrial b = build_speaker_set(corpus, config, rng_b);
  CHECK(a.enrollment.speaker_id(0) == b.enrollment.speaker_id(0));
  CHECK((a.enrolled_queries[0].embedding - b.enrolled_queries[0].embedding)
            .norm() == 0.0);
}

TEST_CASE("build_speaker_set error paths") {
  Corpus small = test_corpus(8, 4, 25, 0.3, 201);
  TrialConfig config;
  Rng rng(1);
  CHECK_THROWS_AS(build_speaker_set(small, config, rng), Error);

  Corpus short_utts = test_corpus(8, 40, 10, 0.3, 202);
  CHECK_THROWS_AS(build_speaker_set(short_utts, config, rng), Error);
}

TEST_CASE("disjointness invariants hold across many trials") {
  Corpus corpus = test_corpus(8, 30, 20, 0.3, 203);
  TrialConfig config;
  config.m = 4;
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    SpeakerSetTrial trial = build_speaker_set(corpus, config, rng);
    std::set<std::string> enrolled;
    for (Index j = 0; j < 4; ++j) enrolled.insert(trial.enrollment.speaker_id(j));
    for (const std::string& id : trial.imposter_speaker_ids)
      CHECK(enrolled.count(id) == 0);
    for (const std::string& id : trial.cohort_speaker_ids) {
      CHECK(enrolled.count(id) == 0);
      for (const std::string& imp : trial.imposter_speaker_ids)
        CHECK(id != imp);
    }
  }
}

TEST_CASE("confidence_interval values") {
  auto [m0, h0] = confidence_interval({0.7, 0.7, 0.7});
  CHECK(m0 == doctest::Approx(0.7));
  CHECK(h0 == 0.0);

  auto [m1, h1] = confidence_interval({0.0, 1.0});
  CHECK(m1 == doctest::Approx(0.5));
  CHECK(h1 == doctest::Approx(0.98).epsilon(1e-9));

  std::vector<double> xs = {0.1, 0.9, 0.4, 0.6, 0.5};
  auto [ma, ha] = confidence_interval(xs);
  std::vector<double> permuted = {0.5, 0.4, 0.9, 0.1, 0.6};
  auto [mb, hb] = confidence_interval(permuted);
  CHECK(ma == doctest::Approx(mb).epsilon(1e-15));
  CHECK(ha == doctest::Approx(hb).epsilon(1e-15));

  CHECK_THROWS_AS(confidence_interval({0.5}), Error);
}

TEST_CASE("perfect and reject-all methods hit the closed-form accuracies") {
  std::vector<SpeakerSetTrial> trials;
  for (int t = 0; t < 3; ++t) trials.push_back(axis_trial(3, 16));

  // tau 0.5 separates perfectly on this geometry
  MethodSpec perfect;
  perfect.kind = MethodSpec::Kind::FixedCosine;
  perfect.tau = 0.5;
  EvalResult p = evaluate_method(perfect, trials);
  CHECK(p.overall_mean == doctest::Approx(1.0));
  CHECK(p.imposter_mean == doctest::Approx(1.0));
  CHECK(p.overall_ci95 == 0.0);

  // rejecting everything: imposter accuracy 1, overall accuracy 1/2 under
  // balanced queries
  MethodSpec reject;
  reject.kind = MethodSpec::Kind::FixedCosine;
  reject.tau = 2.0;
  EvalResult r = evaluate_method(reject, trials);
  CHECK(r.imposter_mean == doctest::Approx(1.0));
  CHECK(r.overall_mean == doctest::Approx(0.5));
}

TEST_CASE("fixed cosine accuracy matches a hand-counted confusion") {
  Corpus corpus = test_corpus(8, 12, 20, 0.4, 204);
  TrialConfig config;
  config.m = 2;
  config.queries_per_speaker = 5;
  config.imposters_per_speaker = 5;
  Rng rng(3);
  SpeakerSetTrial trial = build_speaker_set(corpus, config, rng);

  const double tau = 0.4;
  MethodSpec method;
  method.kind = MethodSpec::Kind::FixedCosine;
  method.tau = tau;
  EvalResult result = evaluate_method(method, {trial, trial});

  // manual confusion over the 20 decisions of one trial
  double correct = 0, rejected = 0;
  for (const LabeledQuery& q : trial.enrolled_queries) {
    ScoredIdentification id = identify(q.embedding, trial.enrollment,
                                       cosine_scorer());
    if (id.best_score > tau && id.best_index == q.label) correct += 1;
  }
  for (const Vector& q : trial.imposter_queries) {
    ScoredIdentification id = identify(q, trial.enrollment, cosine_scorer());
    if (!(id.best_score > tau)) {
      correct += 1;
      rejected += 1;
    }
  }
  CHECK(result.overall_mean == doctest::Approx(correct / 20.0));
  CHECK(result.imposter_mean == doctest::Approx(rejected / 10.0));
}

TEST_CASE("decide(SstCosine) equals the thresholding-module composition") {
  Corpus corpus = test_corpus(12, 20, 20, 0.35, 205);
  TrialConfig config;
  config.m = 4;
  Rng rng(4);
  SpeakerSetTrial trial = build_speaker_set(corpus, config, rng);

  MethodSpec method;
  method.kind = MethodSpec::Kind::SstCosine;
  ThresholdTable table =
      speaker_specific_thresholds(trial.enrollment, cosine_scorer());

  for (const LabeledQuery& q : trial.enrolled_queries) {
    Decision a = decide(method, q.embedding, trial);
    Decision b = identify_sst(q.embedding, trial.enrollment, cosine_scorer(),
                              table);
    CHECK(a.accepted == b.accepted);
    CHECK(a.speaker == b.speaker);
    CHECK(a.raw_score == b.raw_score);
    CHECK(a.threshold_used == b.threshold_used);
  }
}

TEST_CASE("SST table of -1 never rejects under cosine") {
  SpeakerSetTrial trial = axis_trial(3, 16);
  ThresholdTable table;
  table.mode = ThresholdTable::Mode::PerSpeaker;
  table.per_speaker = Vector::Constant(3, -1.0);
  for (const Vector& q : trial.imposter_queries)
    CHECK(identify_sst(q, trial.enrollment, cosine_scorer(), table).accepted);
}

TEST_CASE("score-norm decision matches a manual normalization") {
  Corpus corpus = test_corpus(10, 20, 20, 0.3, 206);
  TrialConfig config;
  config.m = 3;
  Rng rng(5);
  SpeakerSetTrial trial = build_speaker_set(corpus, config, rng);

  MethodSpec method;
  method.kind = MethodSpec::Kind::ScoreNorm;
  method.tau = 0.8;

  const Vector& q = trial.enrolled_queries.front().embedding;
  Decision d = decide(method, q, trial);

  Vector normalized =
      adaptive_score_norm(q, trial.enrollment, trial.cohort, cosine_scorer());
  Index best = 0;
  normalized.maxCoeff(&best);
  CHECK(d.speaker == best);
  CHECK(d.raw_score == doctest::Approx(normalized[best]).epsilon(1e-15));
  CHECK(d.accepted == (normalized[best] > 0.8));
}

TEST_CASE("IDN gate rejects above the threshold regardless of relation scores") {
  // an imposter detection network hard-wired to output sigmoid(4) ~ 0.98
  const Index dim = 8, m_train = 2;
  auto stack = std::make_shared<nnet::ModelStack>();
  stack->dim = dim;
  stack->m_train = m_train;
  Rng rng(6);
  nnet::StackArchitecture arch;
  arch.dim = dim;
  arch.m_train = m_train;
  arch.relnet_hidden = {8};
  arch.idn_hidden = {8};
  arch.dropout_rate = 0.0;
  *stack = nnet::make_model_stack(arch, rng);
  for (auto& layer : stack->idn.layers) {
    layer.weight.setZero();
    layer.bias.setZero();
  }
  stack->idn.layers.back().bias[0] = 4.0;
  // zero the adapter so adaptation is the identity
  for (auto& layer : stack->adapter.layers) {
    layer.weight.setZero();
    layer.bias.setZero();
  }

  SpeakerSetTrial trial = axis_trial(2, dim);
  MethodSpec method;
  method.kind = MethodSpec::Kind::IdnRelNet;
  method.checkpoint = stack;
  method.idn_threshold = 0.5;

  Decision d = decide(method, trial.enrolled_queries[0].embedding, trial);
  CHECK_FALSE(d.accepted);
  CHECK(d.raw_score > 0.9);

  // lowering the gate below the constant score accepts everything
  method.idn_threshold = 0.99;
  Decision d2 = decide(method, trial.enrolled_queries[0].embedding, trial);
  CHECK(d2.accepted);
}

TEST_CASE("raising a fixed threshold trades enrolled accuracy for rejection") {
  Corpus corpus = test_corpus(12, 25, 20, 0.5, 207);
  TrialConfig config;
  config.m = 4;
  Rng rng(7);
  std::vector<SpeakerSetTrial> trials;
  for (int t = 0; t < 5; ++t) trials.push_back(build_speaker_set(corpus, config, rng));

  double last_imposter = -1.0, last_enrolled = 2.0;
  for (double tau : {0.0, 0.3, 0.6, 0.9}) {
    MethodSpec method;
    method.kind = MethodSpec::Kind::FixedCosine;
    method.tau = tau;
    EvalResult r = evaluate_method(method, trials);
    // enrolled-query accuracy = 2 * overall - imposter under balanced counts
    const double enrolled = 2.0 * r.overall_mean - r.imposter_mean;
    CHECK(r.imposter_mean >= last_imposter);
    CHECK(enrolled <= last_enrolled + 1e-12);
    last_imposter = r.imposter_mean;
    last_enrolled = enrolled;
  }
}

TEST_CASE("evaluate_method is deterministic") {
  Corpus corpus = test_corpus(8, 20, 20, 0.4, 208);
  TrialConfig config;
  config.m = 3;
  Rng rng(8);
  std::vector<SpeakerSetTrial> trials;
  for (int t = 0; t < 4; ++t) trials.push_back(build_speaker_set(corpus, config, rng));
  MethodSpec method;
  method.kind = MethodSpec::Kind::SstCosine;
  EvalResult a = evaluate_method(method, trials);
  EvalResult b = evaluate_method(method, trials);
  CHECK(a.overall_mean == b.overall_mean);
  CHECK(a.imposter_mean == b.imposter_mean);
  CHECK(a.overall_ci95 == b.overall_ci95);
}

TEST_CASE("calibrate_fixed_threshold finds the separable gap") {
  std::vector<SpeakerSetTrial> trials = {axis_trial(3, 16), axis_trial(3, 16)};
  MethodSpec prototype;
  prototype.kind = MethodSpec::Kind::FixedCosine;
  std::vector<double> grid;
  for (int g = 0; g <= 20; ++g) grid.push_back(-1.0 + 0.1 * g);
  auto [tau, acc] = calibrate_fixed_threshold(prototype, trials, grid);
  CHECK(acc == doctest::Approx(1.0));
  // imposters score exactly 0 against the enrolled axes and the decision is
  // strict, so the gap of perfect thresholds is [0, 1); ties break low
  CHECK(tau == 0.0);
}

TEST_CASE("verification_trials shape and labels") {
  SpeakerSetTrial trial = axis_trial(3, 16);
  MethodSpec prototype;
  prototype.kind = MethodSpec::Kind::FixedCosine;
  std::vector<TrialPair> pairs = verification_trials(prototype, {trial});
  // (6 enrolled + 6 imposters) x 3 centroids
  REQUIRE(pairs.size() == 36);
  std::size_t targets = 0;
  for (const TrialPair& p : pairs) targets += p.is_target ? 1 : 0;
  CHECK(targets == 6);  // one per enrolled query
  CHECK(compute_eer(pairs).eer == doctest::Approx(0.0));
}
