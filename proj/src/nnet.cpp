// src/nnet.cpp

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

#include "osid/nnet.hpp"

#include <cmath>

namespace osid::nnet {

namespace {

double apply_activation(Activation act, double z) {
  switch (act) {
    case Activation::ReLU: return z > 0.0 ? z : 0.0;
    case Activation::Identity: return z;
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
  }
  return z;
}

// Derivative in terms of preactivation z and postactivation h.
double activation_derivative(Activation act, double z, double h) {
  switch (act) {
    case Activation::ReLU: return z > 0.0 ? 1.0 : 0.0;
    case Activation::Identity: return 1.0;
    case Activation::Sigmoid: return h * (1.0 - h);
  }
  return 1.0;
}

Vector forward_impl(const MlpModel& model, const Vector& input, bool training,
                    Rng* rng, ForwardTape* tape) {
  if (input.size() != model.input_dim())
    throw Error(ErrorCode::DimensionMismatch,
                "mlp forward: input dimension " + std::to_string(input.size()) +
                    ", expected " + std::to_string(model.input_dim()));
  if (tape) {
    tape->inputs.clear();
    tape->preacts.clear();
    tape->postacts.clear();
    tape->masks.clear();
  }
  const std::size_t n_layers = model.layers.size();
  Vector a = input;
  for (std::size_t l = 0; l < n_layers; ++l) {
    const Layer& layer = model.layers[l];
    if (tape) tape->inputs.push_back(a);
    Vector z = layer.weight * a + layer.bias;
    Vector h(z.size());
    for (Index i = 0; i < z.size(); ++i)
      h[i] = apply_activation(layer.activation, z[i]);
    if (tape) {
      tape->preacts.push_back(z);
      tape->postacts.push_back(h);
    }
    const bool hidden = l + 1 < n_layers;
    if (training && hidden && model.dropout_rate > 0.0) {
      const double keep = 1.0 - model.dropout_rate;
      Vector mask(h.size());
      for (Index i = 0; i < h.size(); ++i)
        mask[i] = (rng->uniform() >= model.dropout_rate) ? 1.0 / keep : 0.0;
      if (tape) tape->masks.push_back(mask);
      a = h.cwiseProduct(mask);
    } else {
      if (tape) tape->masks.push_back(Vector());
      a = h;
    }
  }
  return a;
}

}  // namespace

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers)
    n += static_cast<std::size_t>(l.weight.size() + l.bias.size());
  return n;
}

MlpModel make_mlp(Index input, const std::vector<Index>& hidden, Index output,
                  Activation output_activation, double dropout_rate, Rng& rng) {
  MlpModel model;
  model.dropout_rate = dropout_rate;
  std::vector<Index> dims;
  dims.push_back(input);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(output);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    Layer layer;
    const Index fan_in = dims[l], fan_out = dims[l + 1];
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in));
    layer.weight.resize(fan_out, fan_in);
    for (Index c = 0; c < fan_in; ++c)
      for (Index r = 0; r < fan_out; ++r)
        layer.weight(r, c) = (2.0 * rng.uniform() - 1.0) * limit;
    layer.bias = Vector::Zero(fan_out);
    layer.activation =
        (l + 2 < dims.size()) ? Activation::ReLU : output_activation;
    model.layers.push_back(std::move(layer));
  }
  return model;
}

Vector mlp_forward(const MlpModel& model, const Vector& input,
                   ForwardTape* tape) {
  return forward_impl(model, input, /*training=*/false, nullptr, tape);
}

Vector mlp_forward_train(const MlpModel& model, const Vector& input, Rng& rng,
                         ForwardTape& tape) {
  return forward_impl(model, input, /*training=*/true, &rng, &tape);
}

void MlpGradients::set_zero() {
  for (Matrix& w : weight) w.setZero();
  for (Vector& b : bias) b.setZero();
}

void MlpGradients::scale(double s) {
  for (Matrix& w : weight) w *= s;
  for (Vector& b : bias) b *= s;
}

MlpGradients make_gradients(const MlpModel& model) {
  MlpGradients g;
  for (const Layer& l : model.layers) {
    g.weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    g.bias.push_back(Vector::Zero(l.bias.size()));
  }
  return g;
}

Vector mlp_backward(const MlpModel& model, const ForwardTape& tape,
                    const Vector& grad_output, MlpGradients& grads) {
  const std::size_t n_layers = model.layers.size();
  if (tape.inputs.size() != n_layers || tape.preacts.size() != n_layers ||
      tape.masks.size() != n_layers)
    throw Error(ErrorCode::StaleTape,
                "tape records " + std::to_string(tape.inputs.size()) +
                    " layers, model has " + std::to_string(n_layers));
  if (grad_output.size() != model.output_dim())
    throw Error(ErrorCode::StaleTape, "grad_output dimension mismatch");

  Vector g = grad_output;
  for (std::size_t li = n_layers; li-- > 0;) {
    const Layer& layer = model.layers[li];
    if (tape.inputs[li].size() != layer.weight.cols())
      throw Error(ErrorCode::StaleTape, "tape does not match model shapes");
    if (tape.masks[li].size() != 0)  // dropout recorded on this layer
      g = g.cwiseProduct(tape.masks[li]);
    Vector gz(g.size());
    for (Index i = 0; i < g.size(); ++i)
      gz[i] = g[i] * activation_derivative(layer.activation,
                                           tape.preacts[li][i],
                                           tape.postacts[li][i]);
    grads.weight[li].noalias() += gz * tape.inputs[li].transpose();
    grads.bias[li] += gz;
    g = layer.weight.transpose() * gz;
  }
  return g;
}

AdamState make_adam(const MlpModel& model, const AdamConfig& config) {
  AdamState s;
  s.config = config;
  for (const Layer& l : model.layers) {
    s.m_weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    s.v_weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    s.m_bias.push_back(Vector::Zero(l.bias.size()));
    s.v_bias.push_back(Vector::Zero(l.bias.size()));
  }
  return s;
}

void adam_step(MlpModel& model, const MlpGradients& grads, AdamState& state) {
  const std::size_t n_layers = model.layers.size();
  if (grads.weight.size() != n_layers || state.m_weight.size() != n_layers)
    throw Error(ErrorCode::ShapeMismatch, "adam_step: layer count mismatch");
  const AdamConfig& c = state.config;
  state.step += 1;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (std::size_t l = 0; l < n_layers; ++l) {
    Layer& layer = model.layers[l];
    if (grads.weight[l].rows() != layer.weight.rows() ||
        grads.weight[l].cols() != layer.weight.cols() ||
        grads.bias[l].size() != layer.bias.size())
      throw Error(ErrorCode::ShapeMismatch, "adam_step: gradient shape mismatch");

    auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
      m = c.beta1 * m + (1.0 - c.beta1) * g;
      v = c.beta2 * v + (1.0 - c.beta2) * g.cwiseProduct(g);
      auto m_hat = m / bc1;
      auto v_hat = v / bc2;
      param -=
          c.lr * (m_hat.array() / (v_hat.array().sqrt() + c.epsilon)).matrix() +
          (c.lr * c.weight_decay) * param;
    };
    update(layer.weight, state.m_weight[l], state.v_weight[l], grads.weight[l]);
    update(layer.bias, state.m_bias[l], state.v_bias[l], grads.bias[l]);
  }
}

Vector flatten_parameters(const MlpModel& model) {
  Vector flat(static_cast<Index>(model.parameter_count()));
  Index at = 0;
  for (const Layer& l : model.layers) {
    for (Index i = 0; i < l.weight.size(); ++i) flat[at++] = l.weight.data()[i];
    for (Index i = 0; i < l.bias.size(); ++i) flat[at++] = l.bias[i];
  }
  return flat;
}

void unflatten_parameters(const Vector& flat, MlpModel& model) {
  if (flat.size() != static_cast<Index>(model.parameter_count()))
    throw Error(ErrorCode::ShapeMismatch,
                "parameter vector of length " + std::to_string(flat.size()) +
                    " for a model of " + std::to_string(model.parameter_count()));
  Index at = 0;
  for (Layer& l : model.layers) {
    for (Index i = 0; i < l.weight.size(); ++i) l.weight.data()[i] = flat[at++];
    for (Index i = 0; i < l.bias.size(); ++i) l.bias[i] = flat[at++];
  }
}

Vector flatten_gradients(const MlpGradients& grads) {
  Index n = 0;
  for (const Matrix& w : grads.weight) n += w.size();
  for (const Vector& b : grads.bias) n += b.size();
  Vector flat(n);
  Index at = 0;
  for (std::size_t l = 0; l < grads.weight.size(); ++l) {
    for (Index i = 0; i < grads.weight[l].size(); ++i)
      flat[at++] = grads.weight[l].data()[i];
    for (Index i = 0; i < grads.bias[l].size(); ++i)
      flat[at++] = grads.bias[l][i];
  }
  return flat;
}

// ---------------------------------------------------------------------------

Vector relation_input(const Vector& query, const Vector& center) {
  if (query.size() != center.size())
    throw Error(ErrorCode::DimensionMismatch,
                "relation input: query and centroid dimensions disagree");
  const Index d = query.size();
  Vector input(3 * d);
  input.segment(0, d) = query;
  input.segment(d, d) = center;
  input.segment(2 * d, d) = query.cwiseProduct(center);
  return input;
}

double relation_forward(const MlpModel& relnet, const Vector& query,
                        const Vector& center) {
  Vector input = relation_input(query, center);
  if (input.size() != relnet.input_dim())
    throw Error(ErrorCode::DimensionMismatch,
                "relation network expects input of dimension " +
                    std::to_string(relnet.input_dim()));
  return mlp_forward(relnet, input)[0];
}

double relation_loss(const Matrix& scores, const std::vector<Index>& labels) {
  if (static_cast<std::size_t>(scores.rows()) != labels.size())
    throw Error(ErrorCode::ShapeMismatch,
                "relation_loss: one label per score row required");
  const Index m = scores.cols();
  double sum = 0.0;
  for (Index i = 0; i < scores.rows(); ++i) {
    if (labels[i] < 0 || labels[i] >= m)
      throw Error(ErrorCode::ShapeMismatch,
                  "relation_loss: label out of range");
    for (Index j = 0; j < m; ++j) {
      const double target = (labels[i] == j) ? 1.0 : 0.0;
      const double r = scores(i, j) - target;
      sum += r * r;
    }
  }
  return sum / (static_cast<double>(m) * static_cast<double>(scores.rows()));
}

std::vector<Index> idn_product_indices(Index m_now, Index m_train, Rng& rng) {
  std::vector<Index> indices;
  indices.reserve(static_cast<std::size_t>(m_train));
  if (m_now <= m_train) {
    for (Index t = 0; t < m_train; ++t) indices.push_back(t % m_now);
  } else {
    for (std::size_t i : rng.sample_without_replacement(
             static_cast<std::size_t>(m_now), static_cast<std::size_t>(m_train)))
      indices.push_back(static_cast<Index>(i));
  }
  return indices;
}

Vector idn_input_with_indices(const std::vector<Vector>& centroids,
                              const Vector& query,
                              const std::vector<Index>& indices) {
  const Index m_now = static_cast<Index>(centroids.size());
  const Index d = query.size();
  const Index m_train = static_cast<Index>(indices.size());
  Vector input(2 * m_train * d);
  for (Index t = 0; t < m_train; ++t) {
    const Index j = indices[t];
    const Index next = (j + 1) % m_now;
    input.segment(t * d, d) = centroids[j].cwiseProduct(centroids[next]);
    input.segment((m_train + t) * d, d) = query.cwiseProduct(centroids[j]);
  }
  return input;
}

Vector idn_input(const std::vector<Vector>& centroids, const Vector& query,
                 Index m_train, Rng& rng) {
  if (centroids.empty())
    throw Error(ErrorCode::EmptyList, "idn_input needs at least one centroid");
  std::vector<Index> indices =
      idn_product_indices(static_cast<Index>(centroids.size()), m_train, rng);
  return idn_input_with_indices(centroids, query, indices);
}

double idn_forward(const MlpModel& idn, const Vector& input) {
  if (input.size() != idn.input_dim())
    throw Error(ErrorCode::DimensionMismatch,
                "imposter detection network expects input of dimension " +
                    std::to_string(idn.input_dim()) + ", got " +
                    std::to_string(input.size()));
  return mlp_forward(idn, input)[0];
}

double imposter_loss(const std::vector<double>& scores,
                     const std::vector<bool>& is_imposter) {
  if (scores.size() != is_imposter.size())
    throw Error(ErrorCode::ShapeMismatch,
                "imposter_loss: scores and flags differ in length");
  if (scores.empty())
    throw Error(ErrorCode::ShapeMismatch, "imposter_loss: empty query set");
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double r = scores[i] - (is_imposter[i] ? 1.0 : 0.0);
    sum += r * r;
  }
  return sum / static_cast<double>(scores.size());
}

// ---------------------------------------------------------------------------

ModelStack make_model_stack(const StackArchitecture& arch, Rng& rng) {
  ModelStack stack;
  stack.dim = arch.dim;
  stack.m_train = arch.m_train;
  Rng adapter_rng = rng.fork("init/adapter");
  Rng relnet_rng = rng.fork("init/relnet");
  Rng idn_rng = rng.fork("init/idn");
  stack.adapter =
      make_mlp(arch.dim, {arch.adapter_hidden_multiple * arch.dim}, arch.dim,
               Activation::Identity, 0.0, adapter_rng);
  // Residual branch starts small so the adapter begins near the identity and
  // keeps the stored-embedding geometry until trained away from it.
  stack.adapter.layers.back().weight *= 0.1;
  stack.relnet = make_mlp(3 * arch.dim, arch.relnet_hidden, 1,
                          Activation::Sigmoid, arch.dropout_rate, relnet_rng);
  stack.idn = make_mlp(2 * arch.m_train * arch.dim, arch.idn_hidden, 1,
                       Activation::Sigmoid, arch.dropout_rate, idn_rng);
  return stack;
}

Vector adapt(const MlpModel& adapter, const Vector& x) {
  Vector v = x + mlp_forward(adapter, x);
  const double norm = v.norm();
  if (norm < 1e-12)
    throw Error(ErrorCode::ZeroVector, "adapter produced a zero embedding");
  return v / norm;
}

AdapterTrace adapt_traced(const MlpModel& adapter, const Vector& x,
                          Rng* dropout_rng) {
  AdapterTrace trace;
  Vector v = x + forward_impl(adapter, x, dropout_rng != nullptr, dropout_rng,
                              &trace.tape);
  trace.prenorm = v.norm();
  if (trace.prenorm < 1e-12)
    throw Error(ErrorCode::ZeroVector, "adapter produced a zero embedding");
  trace.adapted = v / trace.prenorm;
  return trace;
}

void adapt_backward(const MlpModel& adapter, const AdapterTrace& trace,
                    const Vector& grad_adapted, MlpGradients& grads) {
  // y = v / ||v||  =>  dL/dv = (g - y (y . g)) / ||v||; the residual passes
  // dL/dv straight onto the branch output.
  Vector grad_v =
      (grad_adapted -
       trace.adapted * trace.adapted.dot(grad_adapted)) /
      trace.prenorm;
  mlp_backward(adapter, trace.tape, grad_v, grads);
}

StackGradients make_stack_gradients(const ModelStack& stack) {
  return {make_gradients(stack.adapter), make_gradients(stack.relnet),
          make_gradients(stack.idn)};
}

EpisodeLoss episode_run(const ModelStack& stack, const EpisodeBatch& batch,
                        const EpisodeOptions& options, Rng& product_rng,
                        StackGradients* grads) {
  const Index m_now = static_cast<Index>(batch.support.size());
  if (m_now == 0)
    throw Error(ErrorCode::EmptyList, "episode has no support speakers");
  if (batch.queries.size() != batch.labels.size())
    throw Error(ErrorCode::ShapeMismatch,
                "episode queries and labels differ in length");
  const Index d = stack.dim;

  const bool backward = grads != nullptr;
  const bool adapter_grads = backward && options.train_adapter;
  Rng* drop = options.dropout_rng;
  Rng* adapter_drop = (options.train_adapter && drop) ? drop : nullptr;

  // Unit-norm residual adapter over every embedding in the episode.
  std::vector<std::vector<AdapterTrace>> support(batch.support.size());
  for (std::size_t j = 0; j < batch.support.size(); ++j) {
    if (batch.support[j].empty())
      throw Error(ErrorCode::EmptyList, "support speaker with no utterances");
    for (const Vector& x : batch.support[j]) {
      if (x.size() != d)
        throw Error(ErrorCode::DimensionMismatch, "support embedding dimension");
      support[j].push_back(adapt_traced(stack.adapter, x, adapter_drop));
    }
  }
  std::vector<AdapterTrace> queries;
  queries.reserve(batch.queries.size());
  for (const Vector& x : batch.queries) {
    if (x.size() != d)
      throw Error(ErrorCode::DimensionMismatch, "query embedding dimension");
    queries.push_back(adapt_traced(stack.adapter, x, adapter_drop));
  }

  std::vector<Vector> centers(m_now);
  for (Index j = 0; j < m_now; ++j) {
    Vector sum = Vector::Zero(d);
    for (const AdapterTrace& a : support[j]) sum += a.adapted;
    centers[j] = sum / static_cast<double>(support[j].size());
  }

  Index n_enrolled = 0;
  for (Index label : batch.labels)
    if (label != kImposterLabel) {
      if (label < 0 || label >= m_now)
        throw Error(ErrorCode::ShapeMismatch, "query label out of range");
      ++n_enrolled;
    }

  // Gradient sinks for the embedding space.
  std::vector<Vector> d_center, d_query;
  const bool need_embedding_grads = adapter_grads;
  if (backward) {
    d_center.assign(m_now, Vector::Zero(d));
    d_query.assign(queries.size(), Vector::Zero(d));
  }

  // Scratch gradient buffers let us reuse mlp_backward for frozen networks
  // whose input gradients are still needed.
  MlpGradients relnet_scratch, idn_scratch;
  MlpGradients* relnet_sink = nullptr;
  MlpGradients* idn_sink = nullptr;
  if (backward) {
    if (options.train_relnet) {
      relnet_sink = &grads->relnet;
    } else if (need_embedding_grads) {
      relnet_scratch = make_gradients(stack.relnet);
      relnet_sink = &relnet_scratch;
    }
    if (options.train_idn) {
      idn_sink = &grads->idn;
    } else if (need_embedding_grads) {
      idn_scratch = make_gradients(stack.idn);
      idn_sink = &idn_scratch;
    }
  }

  EpisodeLoss loss;

  // Relation loss over enrolled queries, backpropagated pair by pair.
  if (n_enrolled > 0) {
    const double norm =
        1.0 / (static_cast<double>(m_now) * static_cast<double>(n_enrolled));
    ForwardTape tape;
    const bool relnet_dropout = options.train_relnet && drop;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      if (batch.labels[i] == kImposterLabel) continue;
      for (Index j = 0; j < m_now; ++j) {
        Vector input = relation_input(queries[i].adapted, centers[j]);
        const double r =
            relnet_dropout
                ? mlp_forward_train(stack.relnet, input, *drop, tape)[0]
                : mlp_forward(stack.relnet, input, backward ? &tape : nullptr)[0];
        const double target = (batch.labels[i] == j) ? 1.0 : 0.0;
        loss.relation += (r - target) * (r - target) * norm;
        if (backward && relnet_sink) {
          Vector dr(1);
          dr[0] = 2.0 * (r - target) * norm;
          Vector din = mlp_backward(stack.relnet, tape, dr, *relnet_sink);
          if (need_embedding_grads) {
            d_query[i] += din.segment(0, d) +
                          din.segment(2 * d, d).cwiseProduct(centers[j]);
            d_center[j] += din.segment(d, d) +
                           din.segment(2 * d, d).cwiseProduct(queries[i].adapted);
          }
        }
      }
    }
  }

  // Imposter loss over the whole query set through the product channels.
  if (options.use_imposter_loss && !queries.empty()) {
    std::vector<Index> indices =
        idn_product_indices(m_now, stack.m_train, product_rng);
    const Index m_train = static_cast<Index>(indices.size());
    const double norm = 1.0 / static_cast<double>(queries.size());
    ForwardTape tape;
    const bool idn_dropout = options.train_idn && drop;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      Vector input = idn_input_with_indices(centers, queries[i].adapted, indices);
      if (input.size() != stack.idn.input_dim())
        throw Error(ErrorCode::ShapeMismatch,
                    "idn input does not match network (m_train mismatch?)");
      const double score =
          idn_dropout
              ? mlp_forward_train(stack.idn, input, *drop, tape)[0]
              : mlp_forward(stack.idn, input, backward ? &tape : nullptr)[0];
      const double target = (batch.labels[i] == kImposterLabel) ? 1.0 : 0.0;
      loss.imposter += (score - target) * (score - target) * norm;
      if (backward && idn_sink) {
        Vector ds(1);
        ds[0] = options.lambda * 2.0 * (score - target) * norm;
        Vector din = mlp_backward(stack.idn, tape, ds, *idn_sink);
        if (need_embedding_grads) {
          for (Index t = 0; t < m_train; ++t) {
            const Index a = indices[t];
            const Index b = (a + 1) % m_now;
            auto g_ss = din.segment(t * d, d);
            d_center[a] += g_ss.cwiseProduct(centers[b]);
            d_center[b] += g_ss.cwiseProduct(centers[a]);
            auto g_qs = din.segment((m_train + t) * d, d);
            d_center[a] += g_qs.cwiseProduct(queries[i].adapted);
            d_query[i] += g_qs.cwiseProduct(centers[a]);
          }
        }
      }
    }
  }

  loss.total = total_loss(loss.relation, loss.imposter, options.lambda);

  // Centroid averaging and the normalized residual adapter close the graph.
  if (adapter_grads) {
    for (Index j = 0; j < m_now; ++j) {
      const Vector per_utterance =
          d_center[j] / static_cast<double>(support[j].size());
      for (const AdapterTrace& a : support[j])
        adapt_backward(stack.adapter, a, per_utterance, grads->adapter);
    }
    for (std::size_t i = 0; i < queries.size(); ++i)
      adapt_backward(stack.adapter, queries[i], d_query[i], grads->adapter);
  }

  return loss;
}

EpisodeScores score_episode(const ModelStack& stack, const EpisodeBatch& batch,
                            Rng& product_rng) {
  const Index m_now = static_cast<Index>(batch.support.size());
  if (m_now == 0)
    throw Error(ErrorCode::EmptyList, "episode has no support speakers");
  std::vector<Vector> centers(m_now);
  for (Index j = 0; j < m_now; ++j) {
    std::vector<Vector> adapted;
    adapted.reserve(batch.support[j].size());
    for (const Vector& x : batch.support[j])
      adapted.push_back(adapt(stack.adapter, x));
    centers[j] = centroid(adapted);
  }
  std::vector<Index> indices =
      idn_product_indices(m_now, stack.m_train, product_rng);

  EpisodeScores scores;
  scores.relation.resize(static_cast<Index>(batch.queries.size()), m_now);
  scores.imposter.reserve(batch.queries.size());
  for (std::size_t i = 0; i < batch.queries.size(); ++i) {
    const Vector q = adapt(stack.adapter, batch.queries[i]);
    for (Index j = 0; j < m_now; ++j)
      scores.relation(static_cast<Index>(i), j) =
          relation_forward(stack.relnet, q, centers[j]);
    scores.imposter.push_back(
        idn_forward(stack.idn, idn_input_with_indices(centers, q, indices)));
  }
  return scores;
}

double gradient_check(const ModelStack& stack, const EpisodeBatch& batch,
                      double lambda, double epsilon) {
  EpisodeOptions options;
  options.lambda = lambda;
  options.use_imposter_loss = true;
  options.dropout_rng = nullptr;

  // Product-slot sampling must be identical across every evaluation, so each
  // one gets a fresh rng with the same fixed seed.
  const std::uint64_t product_seed = 0x705eed;

  ModelStack work = stack;
  StackGradients analytic = make_stack_gradients(work);
  {
    Rng r(product_seed);
    episode_run(work, batch, options, r, &analytic);
  }

  auto loss_at = [&]() {
    Rng r(product_seed);
    return episode_run(work, batch, options, r, nullptr).total;
  };

  MlpModel* nets[3] = {&work.adapter, &work.relnet, &work.idn};
  MlpGradients* net_grads[3] = {&analytic.adapter, &analytic.relnet,
                                &analytic.idn};
  double worst = 0.0;
  for (int n = 0; n < 3; ++n) {
    for (std::size_t l = 0; l < nets[n]->layers.size(); ++l) {
      Layer& layer = nets[n]->layers[l];
      auto check_scalar = [&](double& param, double analytic_grad) {
        const double saved = param;
        param = saved + epsilon;
        const double plus = loss_at();
        param = saved - epsilon;
        const double minus = loss_at();
        param = saved;
        const double numeric = (plus - minus) / (2.0 * epsilon);
        const double denom =
            std::max({std::abs(analytic_grad), std::abs(numeric), 1e-6});
        worst = std::max(worst, std::abs(analytic_grad - numeric) / denom);
      };
      for (Index i = 0; i < layer.weight.size(); ++i)
        check_scalar(layer.weight.data()[i], net_grads[n]->weight[l].data()[i]);
      for (Index i = 0; i < layer.bias.size(); ++i)
        check_scalar(layer.bias[i], net_grads[n]->bias[l][i]);
    }
  }
  return worst;
}

}  // namespace osid::nnet
