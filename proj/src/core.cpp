// src/core.cpp

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

#include "osid/core.hpp"

#include <algorithm>

namespace osid {

Vector centroid(const std::vector<Vector>& utterances) {
  if (utterances.empty())
    throw Error(ErrorCode::EmptyList, "centroid of an empty utterance list");
  const Index dim = utterances.front().size();
  for (const Vector& u : utterances) {
    if (u.size() != dim)
      throw Error(ErrorCode::DimensionMismatch,
                  "centroid: utterance dimensions disagree");
  }
  // Summing in a canonical order makes the mean exactly permutation
  // invariant, not just up to rounding.
  std::vector<const Vector*> ordered;
  ordered.reserve(utterances.size());
  for (const Vector& u : utterances) ordered.push_back(&u);
  std::sort(ordered.begin(), ordered.end(),
            [dim](const Vector* a, const Vector* b) {
              for (Index i = 0; i < dim; ++i) {
                if ((*a)[i] != (*b)[i]) return (*a)[i] < (*b)[i];
              }
              return false;
            });
  Vector sum = Vector::Zero(dim);
  for (const Vector* u : ordered) sum += *u;
  return sum / static_cast<double>(utterances.size());
}

void EnrollmentSet::add_speaker(std::string id, std::vector<Vector> utterances) {
  if (utterances.empty())
    throw Error(ErrorCode::EmptyList,
                "speaker '" + id + "' has no enrollment utterances");
  for (const Vector& u : utterances) {
    if (u.size() != dim_)
      throw Error(ErrorCode::DimensionMismatch,
                  "speaker '" + id + "': embedding dimension " +
                      std::to_string(u.size()) + ", corpus dimension " +
                      std::to_string(dim_));
  }
  Speaker s;
  s.id = std::move(id);
  s.utterances = std::move(utterances);
  s.center = centroid(s.utterances);
  speakers_.push_back(std::move(s));
}

ScoredIdentification identify(const Vector& query,
                              const EnrollmentSet& enrollment,
                              const Scorer& scorer) {
  if (query.size() != enrollment.dim())
    throw Error(ErrorCode::DimensionMismatch,
                "identify: query dimension " + std::to_string(query.size()) +
                    ", enrollment dimension " +
                    std::to_string(enrollment.dim()));
  const Index m = enrollment.speaker_count();
  ScoredIdentification result;
  result.all_scores.resize(m);
  for (Index j = 0; j < m; ++j) {
    double s = scorer(query, enrollment.speaker_centroid(j));
    result.all_scores[j] = s;
    if (j == 0 || s > result.best_score) {
      result.best_score = s;
      result.best_index = j;
    }
  }
  return result;
}

}  // namespace osid
