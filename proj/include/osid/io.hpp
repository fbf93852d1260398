// include/osid/io.hpp

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

#ifndef OSID_IO_HPP
#define OSID_IO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "osid/corpus.hpp"
#include "osid/eval.hpp"
#include "osid/nnet.hpp"
#include "osid/thresholding.hpp"
#include "osid/training.hpp"

namespace osid::io {

// All writers go through a temp file plus atomic rename, so a failed write
// never leaves a partial output behind.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& bytes);
std::string read_file(const std::filesystem::path& path);

/**
   Corpus container, one partition per file.

     magic   "SPKEMB1"                  7 bytes
     dim     uint32 little-endian
     count   uint64 little-endian       number of utterance records
     tag     uint8                      0 = train, 1 = test
     records speaker id (uint32 length + UTF-8 bytes),
             utterance id (uint32 length + UTF-8 bytes),
             dim float32 little-endian

   Files whose first bytes are not the magic are parsed as JSON lines of
   {"speaker": ..., "utt": ..., "vec": [...]}; those take their partition
   from the caller since they have no header.
*/
void write_corpus(const std::filesystem::path& path, const Corpus& corpus,
                  Partition which);
Corpus read_corpus(const std::filesystem::path& path, Partition expected);

// Reads train and test files and merges them into one validated corpus.
Corpus load_corpus(const std::filesystem::path& train_path,
                   const std::filesystem::path& test_path);

/**
   Checkpoint container: uint64 little-endian header length, a JSON header
   (architecture, dimensions, m_train, seed, stage), then all parameters as
   float32 little-endian in declared order: adapter, relnet, idn; per layer
   the weight matrix in column-major element order, then the bias.
*/
struct Checkpoint {
  nnet::ModelStack stack;
  std::uint64_t seed = 0;
  std::string stage;  // "init", "a", "b", or "c"
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

// One record per line: score<TAB>target|nontarget
void write_trial_pairs(const std::filesystem::path& path,
                       const std::vector<TrialPair>& pairs);
std::vector<TrialPair> read_trial_pairs(const std::filesystem::path& path);

std::string threshold_table_to_json(const ThresholdTable& table);
ThresholdTable threshold_table_from_json(const std::string& text);
void write_threshold_table(const std::filesystem::path& path,
                           const ThresholdTable& table);
ThresholdTable read_threshold_table(const std::filesystem::path& path);

// episode<TAB>stage<TAB>l_relation<TAB>l_imposter<TAB>l_total
void write_train_report(const std::filesystem::path& path,
                        const TrainReport& report);

std::string eer_to_json(const EerResult& result);

// JSON report plus a TSV comparison table, one row per method.
void write_eval_reports(const std::filesystem::path& json_path,
                        const std::filesystem::path& tsv_path,
                        const std::vector<std::pair<std::string, EvalResult>>&
                            method_results,
                        Index n_sets);

}  // namespace osid::io

#endif  // OSID_IO_HPP
