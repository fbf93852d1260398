// src/synthdata.cpp

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

#include "osid/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace osid {

namespace {

Vector gaussian_vector(Index dim, Rng& rng) {
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = rng.gaussian();
  return v;
}

// Isotropic gaussian scaled so the expected squared norm is 1; noise scales
// are then a fraction of the unit signal independent of the dimension.
Vector unit_scale_gaussian(Index dim, Rng& rng) {
  return gaussian_vector(dim, rng) / std::sqrt(static_cast<double>(dim));
}

std::string zero_padded(Index i) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%04lld", static_cast<long long>(i));
  return buf;
}

}  // namespace

Corpus generate_corpus(const SynthConfig& config, Partition partition,
                       const std::string& id_prefix) {
  if (config.dim < 2 || config.n_speakers < 1 ||
      config.utterances_per_speaker < 1 || config.intra_spread < 0.0)
    throw Error(ErrorCode::InvalidConfig, "invalid synthetic corpus config");

  Corpus corpus(config.dim);
  for (Index s = 0; s < config.n_speakers; ++s) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(s)));
    const Vector mean = l2_normalize(gaussian_vector(config.dim, rng));
    SpeakerRecord record;
    record.id = id_prefix + zero_padded(s);
    record.partition = partition;
    for (Index u = 0; u < config.utterances_per_speaker; ++u) {
      Vector e = mean + config.intra_spread * unit_scale_gaussian(config.dim, rng);
      record.utterance_ids.push_back("u" + zero_padded(u));
      record.utterances.push_back(l2_normalize(e));
    }
    corpus.add_speaker(std::move(record));
  }
  corpus.validate();
  return corpus;
}

Corpus apply_domain_shift(const Corpus& corpus, const ShiftConfig& shift) {
  if (shift.bias_scale < 0.0 || shift.extra_noise < 0.0)
    throw Error(ErrorCode::InvalidConfig, "shift scales must be >= 0");

  Rng dir_rng(derive_seed(shift.seed, "shift/direction"));
  const Vector shared_dir = l2_normalize(gaussian_vector(corpus.dim(), dir_rng));

  // The shared room/channel direction grows with bias_scale while the
  // speaker-discriminative component attenuates, so similarity
  // distributions compress the way far-field recordings do.
  const double keep = std::max(0.0, 1.0 - shift.bias_scale);

  Corpus shifted(corpus.dim());
  for (Index s = 0; s < corpus.speaker_count(); ++s) {
    const SpeakerRecord& src = corpus.speaker(s);
    Rng rng(derive_seed(shift.seed, static_cast<std::uint64_t>(s)));
    SpeakerRecord record;
    record.id = src.id;
    record.partition = src.partition;
    record.utterance_ids = src.utterance_ids;
    for (const Vector& e : src.utterances) {
      Vector v = keep * e + shift.bias_scale * shared_dir +
                 shift.extra_noise * unit_scale_gaussian(corpus.dim(), rng);
      record.utterances.push_back(l2_normalize(v));
    }
    shifted.add_speaker(std::move(record));
  }
  shifted.validate();
  return shifted;
}

Separability measure_separability(const Corpus& corpus) {
  Separability sep;
  double intra_sum = 0.0, inter_sum = 0.0;
  long intra_n = 0, inter_n = 0;
  for (Index a = 0; a < corpus.speaker_count(); ++a) {
    const auto& ua = corpus.speaker(a).utterances;
    for (std::size_t i = 0; i < ua.size(); ++i)
      for (std::size_t j = i + 1; j < ua.size(); ++j) {
        intra_sum += cosine_similarity(ua[i], ua[j]);
        ++intra_n;
      }
    for (Index b = a + 1; b < corpus.speaker_count(); ++b) {
      const auto& ub = corpus.speaker(b).utterances;
      for (const Vector& x : ua)
        for (const Vector& y : ub) {
          inter_sum += cosine_similarity(x, y);
          ++inter_n;
        }
    }
  }
  if (intra_n > 0) sep.intra_mean = intra_sum / static_cast<double>(intra_n);
  if (inter_n > 0) sep.inter_mean = inter_sum / static_cast<double>(inter_n);
  sep.gap = sep.intra_mean - sep.inter_mean;
  return sep;
}

}  // namespace osid
