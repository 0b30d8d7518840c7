#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "graphguard/dense.hpp"
#include "graphguard/sampler.hpp"
#include "graphguard/txgraph.hpp"

namespace graphguard {

enum class GnnKind { kGcn, kRgcn };

// Trainable tensors. A GCN model uses gcn_weight; an R-GCN model uses one
// weight per relation plus a self-loop weight. Both share the bilinear
// discriminator matrix. No bias terms.
struct ModelParams {
  GnnKind kind = GnnKind::kGcn;
  DenseMatrix gcn_weight;                     // |F| x d
  std::vector<DenseMatrix> relation_weights;  // |R| x (|F| x d)
  DenseMatrix self_weight;                    // |F| x d
  DenseMatrix bilinear;                       // d x d

  // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  static ModelParams init(GnnKind kind, std::size_t n_features, std::size_t n_relations, std::size_t dim,
                          std::uint64_t seed);

  ModelParams zeros_like() const;

  // Fixed order: GCN {gcn_weight, bilinear}; R-GCN {W_1..W_R, self_weight, bilinear}.
  std::vector<DenseMatrix*> tensors();
  std::vector<const DenseMatrix*> tensors() const;

  std::size_t n_features() const;
  std::size_t n_relations() const { return kind == GnnKind::kGcn ? 0 : relation_weights.size(); }
  std::size_t embedding_dim() const { return bilinear.rows(); }

  bool all_finite() const;
  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

struct TrainConfig {
  int epochs = 40;
  double learning_rate = 1e-4;
  int batch_size = 1024;  // target nodes per batch; each yields one positive and one negative pair
  int embedding_dim = 8;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const;
};

// relu(D^-1/2 (A + I) D^-1/2 X W)
DenseMatrix gcn_forward(const Adjacency& adjacency, const DenseMatrix& features, const DenseMatrix& weight);

// relu(sum_r mean_{j in N_r(i)} x_j W_r + x_i W_self); empty neighborhoods contribute nothing.
DenseMatrix rgcn_forward(std::span<const Adjacency> relations, const DenseMatrix& features,
                         std::span<const DenseMatrix> relation_weights, const DenseMatrix& self_weight);

std::vector<double> readout_avg(const DenseMatrix& embeddings);

double logistic(double z);

// logistic(e^T W_b h)
double discriminate(std::span<const double> subgraph_embedding, std::span<const double> target_embedding,
                    const DenseMatrix& bilinear);

inline constexpr double kScoreClamp = 1e-12;

// Mean binary cross-entropy with scores clamped to [1e-12, 1 - 1e-12].
double bce_loss(std::span<const double> scores, std::span<const int> labels);

// Discriminator score of one instance pair. The target embedding comes from
// the same GNN run on the isolated target node with its true features.
double pair_score(const ModelParams& params, const InstancePair& pair);

double batch_loss(const ModelParams& params, std::span<const InstancePair> pairs);

// Mean BCE over the batch; writes d(loss)/d(param) for every tensor into grads.
double loss_and_gradients(const ModelParams& params, std::span<const InstancePair> pairs, ModelParams& grads);

struct AdamState {
  std::vector<DenseMatrix> m;
  std::vector<DenseMatrix> v;
  long step = 0;

  static AdamState for_params(const ModelParams& params);
};

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, const TrainConfig& config);

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_loss;  // mean pair loss per epoch
};

GnnKind gnn_kind_for(const SamplerConfig& sampler);

// Contrastive training over day graphs: per epoch and day a fresh target
// permutation, one positive and one negative pair per target, one Adam step
// per batch.
TrainResult train(std::span<const TransactionGraph> graphs, const SamplerConfig& sampler,
                  const TrainConfig& config);
TrainResult train(std::span<const TransactionGraph> graphs, const SamplerConfig& sampler,
                  const TrainConfig& config, ModelParams initial);

}  // namespace graphguard
