// include/osid/core.hpp

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

#ifndef OSID_CORE_HPP
#define OSID_CORE_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "osid/error.hpp"

namespace osid {

// Embeddings are stored as 32-bit floats on disk but all scoring and loss
// arithmetic happens in 64-bit; vectors are widened on load.
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

using Scorer = std::function<double(const Vector&, const Vector&)>;

// Query label: an enrolled speaker index, or kImposterLabel.
inline constexpr Index kImposterLabel = -1;

struct LabeledQuery {
  Vector embedding;
  Index label = kImposterLabel;

  bool is_imposter() const { return label == kImposterLabel; }
};

template <typename Derived>
Eigen::Vector<typename Derived::Scalar, Eigen::Dynamic> l2_normalize(
    const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  Scalar norm = v.norm();
  if (norm < Scalar(1e-12))
    throw Error(ErrorCode::ZeroVector, "cannot normalize a zero vector");
  return v / norm;
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_similarity(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size())
    throw Error(ErrorCode::DimensionMismatch,
                "cosine_similarity: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  Scalar na = a.norm(), nb = b.norm();
  if (na < Scalar(1e-12) || nb < Scalar(1e-12))
    throw Error(ErrorCode::ZeroVector, "cosine_similarity of a zero vector");
  return a.dot(b) / (na * nb);
}

template <typename DerivedA, typename DerivedB>
Eigen::Vector<typename DerivedA::Scalar, Eigen::Dynamic> elementwise_product(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::DimensionMismatch,
                "elementwise_product: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
  return a.cwiseProduct(b);
}

// Plain arithmetic mean, never re-normalized; scorers that need unit vectors
// normalize internally.
Vector centroid(const std::vector<Vector>& utterances);

/**
   One speaker's enrollment material plus the derived centroid.  The centroid
   is recomputed whenever utterances change, so it is always the arithmetic
   mean of the stored embeddings.
*/
class EnrollmentSet {
 public:
  explicit EnrollmentSet(Index dim) : dim_(dim) {}

  void add_speaker(std::string id, std::vector<Vector> utterances);

  Index dim() const { return dim_; }
  Index speaker_count() const { return static_cast<Index>(speakers_.size()); }
  const std::string& speaker_id(Index j) const { return speakers_[j].id; }
  const std::vector<Vector>& utterances(Index j) const {
    return speakers_[j].utterances;
  }
  const Vector& speaker_centroid(Index j) const {
    return speakers_[j].center;
  }

 private:
  struct Speaker {
    std::string id;
    std::vector<Vector> utterances;
    Vector center;
  };

  Index dim_;
  std::vector<Speaker> speakers_;
};

struct ScoredIdentification {
  Index best_index = 0;
  double best_score = 0.0;
  Vector all_scores;
};

// Scores the query against every speaker centroid; argmax ties break to the
// lowest speaker index.
ScoredIdentification identify(const Vector& query,
                              const EnrollmentSet& enrollment,
                              const Scorer& scorer);

inline Scorer cosine_scorer() {
  return [](const Vector& a, const Vector& b) { return cosine_similarity(a, b); };
}

}  // namespace osid

#endif  // OSID_CORE_HPP
