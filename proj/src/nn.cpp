#include "graphguard/nn.hpp"

#include <algorithm>
#include <cmath>

#include "graphguard/error.hpp"
#include "graphguard/rng.hpp"

namespace graphguard {

namespace {

constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kTrainStream = 0x7a41;

void fill_uniform(DenseMatrix& m, double bound, Rng& rng) {
  for (double& v : m.data()) v = (2.0 * rng.uniform01() - 1.0) * bound;
}

// Inputs of each weight matrix for one GNN evaluation; pre = sum_k inputs[k] * W_k.
struct GnnTrace {
  std::vector<DenseMatrix> inputs;
  DenseMatrix pre;
  DenseMatrix out;
};

DenseMatrix gcn_propagate(const Adjacency& adj, const DenseMatrix& x) {
  const std::size_t n = x.rows();
  if (adj.size() != n) throw ShapeError("gcn: adjacency size differs from feature rows");
  std::vector<double> inv_sqrt_deg(n);
  for (std::size_t i = 0; i < n; ++i)
    inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(adj.neighbors[i].size() + 1));
  DenseMatrix out(n, x.cols());
  for (std::size_t i = 0; i < n; ++i) {
    auto row = out.row(i);
    const double self = inv_sqrt_deg[i] * inv_sqrt_deg[i];
    for (std::size_t f = 0; f < x.cols(); ++f) row[f] = self * x(i, f);
    for (auto j : adj.neighbors[i]) {
      const double c = inv_sqrt_deg[i] * inv_sqrt_deg[j];
      for (std::size_t f = 0; f < x.cols(); ++f) row[f] += c * x(j, f);
    }
  }
  return out;
}

DenseMatrix relation_mean(const Adjacency& adj, const DenseMatrix& x) {
  if (adj.size() != x.rows()) throw ShapeError("rgcn: adjacency size differs from feature rows");
  DenseMatrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto& nb = adj.neighbors[i];
    if (nb.empty()) continue;
    const double c = 1.0 / static_cast<double>(nb.size());
    auto row = out.row(i);
    for (auto j : nb)
      for (std::size_t f = 0; f < x.cols(); ++f) row[f] += c * x(j, f);
  }
  return out;
}

std::vector<const DenseMatrix*> gnn_weights(const ModelParams& p) {
  if (p.kind == GnnKind::kGcn) return {&p.gcn_weight};
  std::vector<const DenseMatrix*> w;
  for (const auto& m : p.relation_weights) w.push_back(&m);
  w.push_back(&p.self_weight);
  return w;
}

std::vector<DenseMatrix*> gnn_weights(ModelParams& p) {
  if (p.kind == GnnKind::kGcn) return {&p.gcn_weight};
  std::vector<DenseMatrix*> w;
  for (auto& m : p.relation_weights) w.push_back(&m);
  w.push_back(&p.self_weight);
  return w;
}

GnnTrace run_gnn(const ModelParams& p, std::span<const Adjacency> relations, const DenseMatrix& x) {
  GnnTrace t;
  if (p.kind == GnnKind::kGcn) {
    if (relations.size() != 1) throw ShapeError("gcn: expected exactly one adjacency");
    t.inputs.push_back(gcn_propagate(relations[0], x));
  } else {
    if (relations.size() != p.relation_weights.size())
      throw ShapeError("rgcn: relation count differs from relation weights");
    for (const auto& adj : relations) t.inputs.push_back(relation_mean(adj, x));
    t.inputs.push_back(x);
  }
  const auto weights = gnn_weights(p);
  t.pre = DenseMatrix(x.rows(), p.embedding_dim());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (t.inputs[k].cols() != weights[k]->rows()) throw ShapeError("gnn: feature width differs from weight rows");
    const DenseMatrix part = matmul(t.inputs[k], *weights[k]);
    for (std::size_t e = 0; e < part.size(); ++e) t.pre.data()[e] += part.data()[e];
  }
  t.out = t.pre;
  for (double& v : t.out.data()) v = std::max(v, 0.0);
  return t;
}

void backprop_gnn(const GnnTrace& t, const DenseMatrix& d_out, std::vector<DenseMatrix*>& d_weights) {
  DenseMatrix d_pre = d_out;
  for (std::size_t e = 0; e < d_pre.size(); ++e)
    if (!(t.pre.data()[e] > 0.0)) d_pre.data()[e] = 0.0;
  for (std::size_t k = 0; k < d_weights.size(); ++k) add_matmul_tn(t.inputs[k], d_pre, *d_weights[k]);
}

std::vector<Adjacency> isolated(std::size_t n_relations) {
  Adjacency lone;
  lone.neighbors.resize(1);
  return std::vector<Adjacency>(n_relations, lone);
}

struct PairTrace {
  GnnTrace subgraph;
  GnnTrace target;
  std::vector<double> e;  // readout
  double z = 0;
  double s = 0;
};

PairTrace forward_pair(const ModelParams& p, const InstancePair& pair) {
  PairTrace t;
  t.subgraph = run_gnn(p, pair.subgraph.relations, pair.subgraph.features);
  DenseMatrix x_target(1, pair.target_features.size());
  std::copy(pair.target_features.begin(), pair.target_features.end(), x_target.row(0).begin());
  const auto lone = isolated(p.kind == GnnKind::kGcn ? 1 : p.relation_weights.size());
  t.target = run_gnn(p, lone, x_target);
  t.e = readout_avg(t.subgraph.out);
  const auto h = t.target.out.row(0);
  double z = 0;
  for (std::size_t a = 0; a < t.e.size(); ++a)
    for (std::size_t b = 0; b < h.size(); ++b) z += t.e[a] * p.bilinear(a, b) * h[b];
  t.z = z;
  t.s = logistic(z);
  return t;
}

double clamp_score(double s) { return std::clamp(s, kScoreClamp, 1.0 - kScoreClamp); }

double pair_loss(double s, int label) {
  const double c = clamp_score(s);
  return label ? -std::log(c) : -std::log(1.0 - c);
}

}  // namespace

ModelParams ModelParams::init(GnnKind kind, std::size_t n_features, std::size_t n_relations, std::size_t dim,
                              std::uint64_t seed) {
  if (n_features == 0 || dim == 0) throw ShapeError("model: features and embedding size must be >= 1");
  if (kind == GnnKind::kRgcn && n_relations == 0) throw ShapeError("model: R-GCN needs >= 1 relation");
  Rng rng(derive_seed(seed, {kInitStream}));
  ModelParams p;
  p.kind = kind;
  const double gnn_bound = 1.0 / std::sqrt(static_cast<double>(n_features));
  if (kind == GnnKind::kGcn) {
    p.gcn_weight = DenseMatrix(n_features, dim);
    fill_uniform(p.gcn_weight, gnn_bound, rng);
  } else {
    for (std::size_t r = 0; r < n_relations; ++r) {
      p.relation_weights.emplace_back(n_features, dim);
      fill_uniform(p.relation_weights.back(), gnn_bound, rng);
    }
    p.self_weight = DenseMatrix(n_features, dim);
    fill_uniform(p.self_weight, gnn_bound, rng);
  }
  p.bilinear = DenseMatrix(dim, dim);
  fill_uniform(p.bilinear, 1.0 / std::sqrt(static_cast<double>(dim)), rng);
  return p;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  for (DenseMatrix* m : z.tensors()) m->fill(0.0);
  return z;
}

std::vector<DenseMatrix*> ModelParams::tensors() {
  auto w = gnn_weights(*this);
  w.push_back(&bilinear);
  return w;
}

std::vector<const DenseMatrix*> ModelParams::tensors() const {
  auto w = gnn_weights(*this);
  w.push_back(&bilinear);
  return w;
}

std::size_t ModelParams::n_features() const {
  return kind == GnnKind::kGcn ? gcn_weight.rows() : self_weight.rows();
}

bool ModelParams::all_finite() const {
  for (const DenseMatrix* m : tensors())
    if (!m->all_finite()) return false;
  return true;
}

void TrainConfig::validate() const {
  if (epochs < 0) throw Error("train: epochs must be >= 0");
  if (learning_rate < 0) throw Error("train: learning_rate must be >= 0");
  if (batch_size < 1 || embedding_dim < 1) throw Error("train: batch_size and embedding_dim must be >= 1");
  if (!(beta1 >= 0 && beta1 < 1) || !(beta2 >= 0 && beta2 < 1) || !(adam_epsilon > 0))
    throw Error("train: invalid Adam hyperparameters");
}

DenseMatrix gcn_forward(const Adjacency& adjacency, const DenseMatrix& features, const DenseMatrix& weight) {
  if (features.cols() != weight.rows()) throw ShapeError("gcn_forward: feature width differs from weight rows");
  DenseMatrix h = matmul(gcn_propagate(adjacency, features), weight);
  for (double& v : h.data()) v = std::max(v, 0.0);
  return h;
}

DenseMatrix rgcn_forward(std::span<const Adjacency> relations, const DenseMatrix& features,
                         std::span<const DenseMatrix> relation_weights, const DenseMatrix& self_weight) {
  if (relations.size() != relation_weights.size())
    throw ShapeError("rgcn_forward: relation count differs from relation weights");
  if (features.cols() != self_weight.rows()) throw ShapeError("rgcn_forward: feature width differs from weight rows");
  DenseMatrix pre = matmul(features, self_weight);
  for (std::size_t r = 0; r < relations.size(); ++r) {
    if (!relation_weights[r].same_shape(self_weight)) throw ShapeError("rgcn_forward: relation weight shape");
    const DenseMatrix part = matmul(relation_mean(relations[r], features), relation_weights[r]);
    for (std::size_t e = 0; e < part.size(); ++e) pre.data()[e] += part.data()[e];
  }
  for (double& v : pre.data()) v = std::max(v, 0.0);
  return pre;
}

std::vector<double> readout_avg(const DenseMatrix& embeddings) {
  if (embeddings.rows() == 0) throw ShapeError("readout_avg: no rows");
  std::vector<double> mean(embeddings.cols(), 0.0);
  for (std::size_t i = 0; i < embeddings.rows(); ++i)
    for (std::size_t j = 0; j < embeddings.cols(); ++j) mean[j] += embeddings(i, j);
  for (double& v : mean) v /= static_cast<double>(embeddings.rows());
  return mean;
}

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double ez = std::exp(z);
  return ez / (1.0 + ez);
}

double discriminate(std::span<const double> subgraph_embedding, std::span<const double> target_embedding,
                    const DenseMatrix& bilinear) {
  if (bilinear.rows() != subgraph_embedding.size() || bilinear.cols() != target_embedding.size())
    throw ShapeError("discriminate: bilinear shape mismatch");
  double z = 0;
  for (std::size_t a = 0; a < subgraph_embedding.size(); ++a) {
    double inner = 0;
    for (std::size_t b = 0; b < target_embedding.size(); ++b) inner += bilinear(a, b) * target_embedding[b];
    z += subgraph_embedding[a] * inner;
  }
  return logistic(z);
}

double bce_loss(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size() || scores.empty()) throw ShapeError("bce_loss: size mismatch or empty");
  double total = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) total += pair_loss(scores[i], labels[i]);
  return total / static_cast<double>(scores.size());
}

double pair_score(const ModelParams& params, const InstancePair& pair) { return forward_pair(params, pair).s; }

double batch_loss(const ModelParams& params, std::span<const InstancePair> pairs) {
  if (pairs.empty()) throw Error("batch_loss: empty batch");
  double total = 0;
  for (const auto& pair : pairs) total += pair_loss(pair_score(params, pair), pair.label);
  return total / static_cast<double>(pairs.size());
}

double loss_and_gradients(const ModelParams& params, std::span<const InstancePair> pairs, ModelParams& grads) {
  if (pairs.empty()) throw Error("loss_and_gradients: empty batch");
  grads = params.zeros_like();
  auto d_gnn = gnn_weights(grads);
  const double inv_n = 1.0 / static_cast<double>(pairs.size());
  const std::size_t d = params.embedding_dim();
  double total = 0;
  for (const auto& pair : pairs) {
    const PairTrace t = forward_pair(params, pair);
    total += pair_loss(t.s, pair.label);
    // d(loss)/dz = s - y, zero where the clamp is active.
    const bool clamped = t.s < kScoreClamp || t.s > 1.0 - kScoreClamp;
    const double g = clamped ? 0.0 : (t.s - pair.label) * inv_n;
    if (g == 0.0) continue;
    const auto h = t.target.out.row(0);
    DenseMatrix d_h(1, d);
    std::vector<double> d_e(d, 0.0);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) {
        grads.bilinear(a, b) += g * t.e[a] * h[b];
        d_e[a] += g * params.bilinear(a, b) * h[b];
        d_h(0, b) += g * params.bilinear(a, b) * t.e[a];
      }
    const std::size_t n = t.subgraph.out.rows();
    DenseMatrix d_sub(n, d);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t a = 0; a < d; ++a) d_sub(i, a) = d_e[a] / static_cast<double>(n);
    backprop_gnn(t.subgraph, d_sub, d_gnn);
    backprop_gnn(t.target, d_h, d_gnn);
  }
  return total * inv_n;
}

AdamState AdamState::for_params(const ModelParams& params) {
  AdamState s;
  for (const DenseMatrix* m : params.tensors()) {
    s.m.emplace_back(m->rows(), m->cols());
    s.v.emplace_back(m->rows(), m->cols());
  }
  return s;
}

void adam_step(ModelParams& params, const ModelParams& grads, AdamState& state, const TrainConfig& config) {
  auto p = params.tensors();
  const auto g = grads.tensors();
  if (p.size() != g.size() || p.size() != state.m.size()) throw ShapeError("adam_step: tensor count mismatch");
  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!p[k]->same_shape(*g[k]) || !p[k]->same_shape(state.m[k])) throw ShapeError("adam_step: shape mismatch");
    auto pd = p[k]->data();
    const auto gd = g[k]->data();
    auto md = state.m[k].data();
    auto vd = state.v[k].data();
    for (std::size_t e = 0; e < pd.size(); ++e) {
      md[e] = config.beta1 * md[e] + (1.0 - config.beta1) * gd[e];
      vd[e] = config.beta2 * vd[e] + (1.0 - config.beta2) * gd[e] * gd[e];
      const double m_hat = md[e] / c1;
      const double v_hat = vd[e] / c2;
      pd[e] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.adam_epsilon);
    }
  }
}

GnnKind gnn_kind_for(const SamplerConfig& sampler) {
  return sampler.multi_relational ? GnnKind::kRgcn : GnnKind::kGcn;
}

TrainResult train(std::span<const TransactionGraph> graphs, const SamplerConfig& sampler, const TrainConfig& config) {
  if (graphs.empty()) throw Error("train: no training graphs");
  const auto& first = graphs.front();
  return train(graphs, sampler, config,
               ModelParams::init(gnn_kind_for(sampler), first.num_features(), first.num_relations(),
                                 static_cast<std::size_t>(config.embedding_dim), config.seed));
}

TrainResult train(std::span<const TransactionGraph> graphs, const SamplerConfig& sampler, const TrainConfig& config,
                  ModelParams initial) {
  sampler.validate();
  config.validate();
  if (graphs.empty()) throw Error("train: no training graphs");
  for (const auto& g : graphs) {
    if (g.num_features() != initial.n_features()) throw ShapeError("train: graph feature width differs from model");
    if (initial.kind == GnnKind::kRgcn && g.num_relations() != initial.n_relations())
      throw ShapeError("train: graph relation count differs from model");
  }

  TrainResult result;
  result.params = std::move(initial);
  AdamState adam = AdamState::for_params(result.params);
  Rng rng(derive_seed(config.seed, {kTrainStream}));
  ModelParams grads;
  std::vector<InstancePair> batch;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_total = 0;
    std::size_t epoch_pairs = 0;
    for (const auto& graph : graphs) {
      const auto targets = epoch_targets(graph, rng);
      for (std::size_t begin = 0; begin < targets.size(); begin += config.batch_size) {
        const std::size_t end = std::min(targets.size(), begin + static_cast<std::size_t>(config.batch_size));
        batch.clear();
        for (std::size_t i = begin; i < end; ++i) {
          batch.push_back(make_pair(graph, targets[i], Polarity::kPositive, sampler, rng));
          batch.push_back(make_pair(graph, targets[i], Polarity::kNegative, sampler, rng));
        }
        const double loss = loss_and_gradients(result.params, batch, grads);
        if (!std::isfinite(loss)) throw Error("train: non-finite loss");
        epoch_total += loss * static_cast<double>(batch.size());
        epoch_pairs += batch.size();
        adam_step(result.params, grads, adam, config);
      }
    }
    result.epoch_loss.push_back(epoch_total / static_cast<double>(epoch_pairs));
    info("epoch " + std::to_string(epoch + 1) + " loss " + std::to_string(result.epoch_loss.back()));
  }
  return result;
}

}  // namespace graphguard
