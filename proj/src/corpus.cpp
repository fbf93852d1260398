// src/corpus.cpp

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

#include "osid/corpus.hpp"

#include <cmath>
#include <set>

namespace osid {

void Corpus::add_speaker(SpeakerRecord record) {
  if (record.id.empty())
    throw Error(ErrorCode::InvalidConfig, "speaker id must be non-empty");
  if (record.utterance_ids.size() != record.utterances.size())
    throw Error(ErrorCode::InvalidConfig,
                "speaker '" + record.id + "': utterance ids and vectors differ");
  records_.push_back(std::move(record));
}

std::vector<Index> Corpus::partition_indices(Partition p) const {
  std::vector<Index> indices;
  for (Index i = 0; i < speaker_count(); ++i)
    if (records_[i].partition == p) indices.push_back(i);
  return indices;
}

Index Corpus::utterance_count() const {
  Index n = 0;
  for (const SpeakerRecord& r : records_)
    n += static_cast<Index>(r.utterances.size());
  return n;
}

void Corpus::validate() const {
  std::set<std::string> train_ids, test_ids;
  for (const SpeakerRecord& r : records_) {
    auto& ids = (r.partition == Partition::Train) ? train_ids : test_ids;
    if (!ids.insert(r.id).second)
      throw Error(ErrorCode::FormatError,
                  "duplicate speaker id '" + r.id + "' in " +
                      partition_name(r.partition) + " partition");
    if (r.utterances.empty())
      throw Error(ErrorCode::FormatError,
                  "speaker '" + r.id + "' has no utterances");
    for (const Vector& u : r.utterances) {
      if (u.size() != dim_)
        throw Error(ErrorCode::FormatError,
                    "speaker '" + r.id + "': embedding of dimension " +
                        std::to_string(u.size()) + " in a corpus of dimension " +
                        std::to_string(dim_));
      if (!u.allFinite())
        throw Error(ErrorCode::FormatError,
                    "speaker '" + r.id + "': non-finite embedding component");
    }
  }
  for (const std::string& id : train_ids)
    if (test_ids.count(id))
      throw Error(ErrorCode::FormatError,
                  "speaker '" + id + "' appears in both train and test "
                  "partitions (unseen-speaker constraint)");
}

}  // namespace osid
