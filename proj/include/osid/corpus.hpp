// include/osid/corpus.hpp

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

#ifndef OSID_CORPUS_HPP
#define OSID_CORPUS_HPP

#include <string>
#include <vector>

#include "osid/core.hpp"

namespace osid {

enum class Partition : std::uint8_t { Train = 0, Test = 1 };

inline const char* partition_name(Partition p) {
  return p == Partition::Train ? "train" : "test";
}

struct SpeakerRecord {
  std::string id;
  Partition partition = Partition::Train;
  std::vector<std::string> utterance_ids;
  std::vector<Vector> utterances;
};

/**
   A corpus of speaker embeddings.  The embedding dimension is a corpus-level
   constant; every speaker id is unique, and a speaker never straddles the
   train/test boundary (the unseen-speaker constraint).  Record and utterance
   order is insertion order throughout, which keeps every downstream
   computation reproducible.
*/
class Corpus {
 public:
  explicit Corpus(Index dim) : dim_(dim) {}

  Index dim() const { return dim_; }

  void add_speaker(SpeakerRecord record);

  Index speaker_count() const { return static_cast<Index>(records_.size()); }
  const SpeakerRecord& speaker(Index i) const { return records_[i]; }
  SpeakerRecord& speaker(Index i) { return records_[i]; }

  std::vector<Index> partition_indices(Partition p) const;
  Index utterance_count() const;

  // Every embedding finite and of dimension dim; ids unique; no id in both
  // partitions.  Throws on violation; called by every loader.
  void validate() const;

 private:
  Index dim_;
  std::vector<SpeakerRecord> records_;
};

}  // namespace osid

#endif  // OSID_CORPUS_HPP
