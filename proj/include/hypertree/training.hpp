#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "hypertree/embedding.hpp"
#include "hypertree/graph.hpp"
#include "hypertree/sampling.hpp"

namespace hypertree {

/// Hyperparameters for the geometry-aware training loop. Defaults reproduce the
/// synthetic balanced-tree preset.
struct TrainConfig {
  int dim = 2;
  double lr = 0.5;
  int epochs = 3000;
  int batch_size = 50;
  int negatives = 50;
  // Train every relation in both directions, so each endpoint is the source
  // of one positive pair. Off gives the directed child -> ancestor objective.
  bool symmetric = true;

  // Closure-edge regularization: closure edges carry weight eta_tc during
  // epochs 1..n_tc. eta_tc = 0 disables it.
  double eta_tc = 0.2;
  int n_tc = 300;

  int burn_in_epochs = 20;
  double burn_in_lr_divisor = 10.0;

  bool dilation_enabled = true;
  double dilation_k = 1.1;
  int dilation_start_epoch = 300;
  int dilation_cooldown = 50;

  double init_radius = 1e-3;
  double eps = 1e-5;
  std::uint64_t seed = 0;

  // 1 = deterministic. More workers apply lock-free concurrent updates and
  // give up reproducibility.
  int workers = 1;

  /// Throws InputError when a field is out of range.
  void validate() const;
  bool uses_closure() const { return eta_tc > 0.0 && n_tc > 0; }
};

struct EpochRecord {
  int epoch;
  double mean_loss;
  bool dilation_applied;
  std::size_t offenders;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

using TrainTrace = std::vector<EpochRecord>;

struct TrainResult {
  EmbeddingTable table;
  TrainTrace trace;
};

/// -log softmax of -d(i, j) against {j} U negatives, stabilized by max-shift.
/// Zero when `negatives` is empty.
double edge_loss(const EmbeddingTable& theta, NodeId i, NodeId j,
                 std::span<const NodeId> negatives);

/// Sum over batch edges of weight * edge_loss.
double total_loss(const EmbeddingTable& theta, std::span<const Batch> batches);

/// Euclidean gradient of total_loss, dense, same layout as the table.
std::vector<double> total_loss_gradient(const EmbeddingTable& theta,
                                        std::span<const Batch> batches);

/// One Riemannian SGD step on the batch-mean weighted loss. Gradients are all
/// taken at the pre-step table. Returns the weighted loss sum of the batch
/// (pre-step). Throws TrainingError naming the edge on a non-finite value.
double sgd_step(EmbeddingTable& theta, const Batch& batch, double lr, double eps,
                const HierarchyGraph* labels = nullptr);

/// Replaces every point by its k-dilation.
void apply_dilation(EmbeddingTable& theta, double k, double eps);

/// Each coordinate uniform in [-init_radius, init_radius].
EmbeddingTable initial_embedding(std::size_t num_nodes, const TrainConfig& cfg, Rng& rng);

/// Positive pairs used in `epoch` (1-based): tree edges with weight 1, plus
/// closure edges with weight eta_tc while epoch <= n_tc. Each edge also
/// appears reversed when cfg.symmetric is set.
std::vector<WeightedEdge> epoch_edges(const HierarchyGraph& g, const TrainConfig& cfg,
                                      int epoch);

using EpochObserver = std::function<void(const EpochRecord&, const EmbeddingTable&)>;

/// Runs the full loop. Per epoch: optional capacity check and dilation, then
/// one pass of Riemannian SGD over shuffled batches. Closure edges are derived
/// from `g` when the config uses them, which requires `g` to be a tree.
TrainResult train(const HierarchyGraph& g, const TrainConfig& cfg,
                  const EpochObserver& observer = {});

}  // namespace hypertree
