// include/osid/nnet.hpp

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

#ifndef OSID_NNET_HPP
#define OSID_NNET_HPP

#include <cstdint>
#include <vector>

#include "osid/core.hpp"
#include "osid/rng.hpp"

namespace osid::nnet {

enum class Activation : std::uint8_t { ReLU = 0, Identity = 1, Sigmoid = 2 };

struct Layer {
  Matrix weight;  // out x in
  Vector bias;    // out
  Activation activation = Activation::ReLU;
};

struct MlpModel {
  std::vector<Layer> layers;
  double dropout_rate = 0.0;  // inverted dropout after hidden activations

  Index input_dim() const { return layers.front().weight.cols(); }
  Index output_dim() const { return layers.back().weight.rows(); }
  std::size_t parameter_count() const;
};

// He-uniform fan-in initialization, biases zero.
MlpModel make_mlp(Index input, const std::vector<Index>& hidden, Index output,
                  Activation output_activation, double dropout_rate, Rng& rng);

struct ForwardTape {
  std::vector<Vector> inputs;    // input to each layer
  std::vector<Vector> preacts;   // affine outputs z_l
  std::vector<Vector> postacts;  // activation outputs
  std::vector<Vector> masks;     // dropout masks (empty vector where none)
};

// Eval-mode forward: no dropout, no scaling.  Deterministic.
Vector mlp_forward(const MlpModel& model, const Vector& input,
                   ForwardTape* tape = nullptr);

// Train-mode forward: inverted dropout after each hidden activation, masks
// recorded in the tape so backward sees exactly what forward computed.
Vector mlp_forward_train(const MlpModel& model, const Vector& input, Rng& rng,
                         ForwardTape& tape);

struct MlpGradients {
  std::vector<Matrix> weight;
  std::vector<Vector> bias;

  void set_zero();
  void scale(double s);
};

MlpGradients make_gradients(const MlpModel& model);

// Accumulates parameter gradients into grads and returns the gradient with
// respect to the input.
Vector mlp_backward(const MlpModel& model, const ForwardTape& tape,
                    const Vector& grad_output, MlpGradients& grads);

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.99;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 2e-5;  // decoupled: lr * wd * param subtracted directly
};

struct AdamState {
  AdamConfig config;
  std::vector<Matrix> m_weight, v_weight;
  std::vector<Vector> m_bias, v_bias;
  long step = 0;
};

AdamState make_adam(const MlpModel& model, const AdamConfig& config);
void adam_step(MlpModel& model, const MlpGradients& grads, AdamState& state);

// Canonical parameter order: per layer, weight elements in Eigen storage
// order (column-major), then bias.  Shared by the optimizer-independent
// flatten/unflatten, checkpoint blobs, and the finite-difference harness.
Vector flatten_parameters(const MlpModel& model);
void unflatten_parameters(const Vector& flat, MlpModel& model);
Vector flatten_gradients(const MlpGradients& grads);

// ---------------------------------------------------------------------------
// Relation network and imposter detection network heads.

Vector relation_input(const Vector& query, const Vector& center);

// Relation score for one query-centroid pair, eval mode.
double relation_forward(const MlpModel& relnet, const Vector& query,
                        const Vector& center);

// Mean squared error against the one-hot label matrix, normalized by M * |Q|.
double relation_loss(const Matrix& scores, const std::vector<Index>& labels);

/**
   Product-slot selection for the imposter detection network.

   Conceptually there are M_now cyclic centroid products, slot j pairing
   centroids (j, (j+1) mod M_now), and M_now query-centroid products.  The
   network consumes exactly m_train of each.  If M_now < m_train the slots
   repeat cyclically ([0, 1, ..., M_now-1, 0, 1, ...]); if M_now > m_train,
   m_train distinct slots are drawn without replacement (kept in draw order).
   One index list is drawn and shared by both product channels.
*/
std::vector<Index> idn_product_indices(Index m_now, Index m_train, Rng& rng);

Vector idn_input_with_indices(const std::vector<Vector>& centroids,
                              const Vector& query,
                              const std::vector<Index>& indices);

// Full input assembly [Pss | Pqs] of length 2 * m_train * D.
Vector idn_input(const std::vector<Vector>& centroids, const Vector& query,
                 Index m_train, Rng& rng);

double idn_forward(const MlpModel& idn, const Vector& input);

// Mean squared error against the imposter indicator over the whole query set.
double imposter_loss(const std::vector<double>& scores,
                     const std::vector<bool>& is_imposter);

inline double total_loss(double relation, double imposter, double lambda) {
  return relation + lambda * imposter;
}

// ---------------------------------------------------------------------------
// The three-network assembly used by episodic training and evaluation.

struct ModelStack {
  MlpModel adapter;  // residual refiner: adapted = x + adapter(x)
  MlpModel relnet;   // [q, C, q*C] -> (0,1)
  MlpModel idn;      // [Pss | Pqs] -> (0,1)
  Index dim = 0;
  Index m_train = 0;
};

struct StackArchitecture {
  Index dim = 16;
  Index m_train = 10;
  std::vector<Index> relnet_hidden = {256, 64};
  std::vector<Index> idn_hidden = {256, 64};
  Index adapter_hidden_multiple = 2;  // hidden width = multiple * dim
  double dropout_rate = 0.1;
};

ModelStack make_model_stack(const StackArchitecture& arch, Rng& rng);

// The adapter emits unit-norm embeddings, like the speaker encoders it
// stands in for: adapted = l2_normalize(x + adapter(x)).
Vector adapt(const MlpModel& adapter, const Vector& x);

struct AdapterTrace {
  Vector adapted;       // unit norm
  double prenorm = 0.0;  // ||x + f(x)|| before normalization
  ForwardTape tape;
};

AdapterTrace adapt_traced(const MlpModel& adapter, const Vector& x,
                          Rng* dropout_rng = nullptr);

// Backpropagates dL/d(adapted) through the normalization and the residual
// branch, accumulating the adapter's parameter gradients.
void adapt_backward(const MlpModel& adapter, const AdapterTrace& trace,
                    const Vector& grad_adapted, MlpGradients& grads);

struct EpisodeBatch {
  std::vector<std::vector<Vector>> support;  // M_now speakers x N utterances
  std::vector<Vector> queries;
  std::vector<Index> labels;  // support row index or kImposterLabel
};

struct EpisodeLoss {
  double relation = 0.0;
  double imposter = 0.0;
  double total = 0.0;
};

struct StackGradients {
  MlpGradients adapter, relnet, idn;
};

StackGradients make_stack_gradients(const ModelStack& stack);

struct EpisodeOptions {
  double lambda = 1.0;
  bool use_imposter_loss = true;   // false: relation-only (stage B)
  bool train_adapter = true;
  bool train_relnet = true;
  bool train_idn = true;
  Rng* dropout_rng = nullptr;      // null: no dropout anywhere
};

/**
   Joint forward (and optional backward) over one episode.

   Support and query embeddings pass through the residual adapter, centroids
   are the means of adapted support rows, the relation loss runs over enrolled
   queries against every centroid, and the imposter loss runs over the whole
   query set through the product-channel input.  Gradients, when requested,
   flow through all three networks and the centroid averaging, accumulated in
   fixed index order so results are bit-reproducible.
*/
EpisodeLoss episode_run(const ModelStack& stack, const EpisodeBatch& batch,
                        const EpisodeOptions& options, Rng& product_rng,
                        StackGradients* grads);

struct EpisodeScores {
  Matrix relation;               // |Q| x M, eval mode
  std::vector<double> imposter;  // |Q|
};

// Eval-mode relation and imposter scores for every query in the batch.
EpisodeScores score_episode(const ModelStack& stack, const EpisodeBatch& batch,
                            Rng& product_rng);

// Worst relative error between analytic gradients of the total episode loss
// and central finite differences, over every parameter of all three networks.
// Dropout must be disabled (64-bit arithmetic assumed throughout).
double gradient_check(const ModelStack& stack, const EpisodeBatch& batch,
                      double lambda, double epsilon);

}  // namespace osid::nnet

#endif  // OSID_NNET_HPP
