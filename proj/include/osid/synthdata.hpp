// include/osid/synthdata.hpp

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

#ifndef OSID_SYNTHDATA_HPP
#define OSID_SYNTHDATA_HPP

#include <string>

#include "osid/corpus.hpp"
#include "osid/rng.hpp"

namespace osid {

struct SynthConfig {
  Index dim = 32;
  Index n_speakers = 50;
  Index utterances_per_speaker = 20;
  // Within-speaker noise magnitude relative to the unit mean direction
  // (expected noise norm, independent of dim).
  double intra_spread = 0.3;
  std::uint64_t seed = 1;
};

struct ShiftConfig {
  double bias_scale = 0.0;   // shared random direction added to everything
  double extra_noise = 0.0;  // extra per-utterance gaussian noise
  std::uint64_t seed = 1;
};

/**
   Unit-norm embeddings with one mean direction per speaker, drawn uniformly
   on the sphere, and gaussian within-speaker spread.  Each speaker generates
   from its own derived sub-seed, so the corpus is independent of generation
   order.  Speaker ids are "<prefix><index>".
*/
Corpus generate_corpus(const SynthConfig& config, Partition partition,
                       const std::string& id_prefix);

// Every embedding mixes toward a shared random direction (the speaker
// component attenuates as the bias grows) and picks up extra noise, then is
// re-normalized.  Labels, counts and ordering are preserved.
Corpus apply_domain_shift(const Corpus& corpus, const ShiftConfig& shift);

struct Separability {
  double intra_mean = 0.0;  // mean within-speaker cosine over distinct pairs
  double inter_mean = 0.0;  // mean cross-speaker cosine
  double gap = 0.0;         // intra - inter
};

Separability measure_separability(const Corpus& corpus);

}  // namespace osid

#endif  // OSID_SYNTHDATA_HPP
