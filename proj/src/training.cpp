#include "hypertree/training.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "hypertree/capacity.hpp"
#include "hypertree/errors.hpp"
#include "hypertree/geometry.hpp"

namespace hypertree {

void TrainConfig::validate() const {
  const auto fail = [](const std::string& what) { throw InputError("invalid config: " + what); };
  if (dim < 2) fail("dim must be >= 2");
  if (!(lr > 0.0)) fail("lr must be positive");
  if (epochs < 0) fail("epochs must be >= 0");
  if (batch_size < 1) fail("batch_size must be >= 1");
  if (negatives < 1) fail("negatives must be >= 1");
  if (!(eta_tc >= 0.0 && eta_tc <= 1.0)) fail("eta_tc must lie in [0, 1]");
  if (n_tc < 0) fail("n_tc must be >= 0");
  if (burn_in_epochs < 0) fail("burn_in_epochs must be >= 0");
  if (!(burn_in_lr_divisor > 0.0)) fail("burn_in_lr_divisor must be positive");
  if (!(dilation_k > 1.0)) fail("dilation_k must exceed 1");
  if (dilation_start_epoch < 0) fail("dilation_start_epoch must be >= 0");
  if (dilation_cooldown < 1) fail("dilation_cooldown must be >= 1");
  if (!(init_radius > 0.0 && init_radius < 0.1)) fail("init_radius must lie in (0, 0.1)");
  if (!(eps > 0.0 && eps < 0.1)) fail("eps must lie in (0, 0.1)");
  if (workers < 1) fail("workers must be >= 1");
}

namespace {

// Sparse accumulator: only rows touched by the current batch are reset.
class GradientBuffer {
 public:
  GradientBuffer(std::size_t num_nodes, std::size_t dim)
      : dim_(dim), data_(num_nodes * dim, 0.0), touched_(num_nodes, 0) {}

  std::span<double> row(NodeId n) {
    if (!touched_[n]) {
      touched_[n] = 1;
      rows_.push_back(n);
    }
    return {data_.data() + n * dim_, dim_};
  }

  const std::vector<NodeId>& rows() const { return rows_; }

  void clear() {
    for (NodeId n : rows_) {
      std::fill_n(data_.begin() + static_cast<std::ptrdiff_t>(n * dim_), dim_, 0.0);
      touched_[n] = 0;
    }
    rows_.clear();
  }

  std::vector<double>& dense() { return data_; }

 private:
  std::size_t dim_;
  std::vector<double> data_;
  std::vector<char> touched_;
  std::vector<NodeId> rows_;
};

std::string edge_name(const HierarchyGraph* g, NodeId i, NodeId j) {
  if (g != nullptr) {
    return "(" + g->label(i) + ", " + g->label(j) + ")";
  }
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

// Adds scale * d(edge_loss)/d(theta) into `grad` and returns edge_loss.
double accumulate_edge(const EmbeddingTable& theta, NodeId i, NodeId j,
                       std::span<const NodeId> negatives, double scale, GradientBuffer& grad,
                       std::vector<double>& dist) {
  if (negatives.empty()) {
    return 0.0;
  }
  const auto ti = theta.row(i);
  dist.resize(negatives.size() + 1);
  dist[0] = poincare_distance(ti, theta.row(j));
  double dmin = dist[0];
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    dist[k + 1] = poincare_distance(ti, theta.row(negatives[k]));
    dmin = std::min(dmin, dist[k + 1]);
  }
  double z = 0.0;
  for (double d : dist) {
    z += std::exp(dmin - d);
  }
  const double loss = dist[0] - dmin + std::log(z);
  if (scale == 0.0) {
    return loss;
  }

  // dL/dd_j = 1 - p_j, dL/dd_x = -p_x for negatives.
  const double pj = std::exp(dmin - dist[0]) / z;
  accumulate_distance_gradient(ti, theta.row(j), scale * (1.0 - pj), grad.row(i), grad.row(j));
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    const double px = std::exp(dmin - dist[k + 1]) / z;
    const NodeId x = negatives[k];
    accumulate_distance_gradient(ti, theta.row(x), -scale * px, grad.row(i), grad.row(x));
  }
  return loss;
}

bool rows_finite(GradientBuffer& grad) {
  for (NodeId n : grad.rows()) {
    for (double g : grad.row(n)) {
      if (!std::isfinite(g)) {
        return false;
      }
    }
  }
  return true;
}

void riemannian_update(std::span<double> point, std::span<const double> grad, double lr,
                       double eps) {
  const double s = 1.0 - squared_norm(point);
  const double factor = lr * s * s / 4.0;
  for (std::size_t k = 0; k < point.size(); ++k) {
    point[k] -= factor * grad[k];
  }
  project_to_ball_inplace(point, eps);
}

// Computes the batch-mean gradient at the current table into `grad` and
// returns the weighted loss sum.
double batch_gradient(const EmbeddingTable& theta, const Batch& batch, GradientBuffer& grad,
                      std::vector<double>& dist, const HierarchyGraph* labels) {
  const double inv = 1.0 / static_cast<double>(batch.edges.size());
  double sum = 0.0;
  for (std::size_t e = 0; e < batch.edges.size(); ++e) {
    const auto& edge = batch.edges[e];
    const double loss = accumulate_edge(theta, edge.source, edge.target, batch.negatives[e],
                                        edge.weight * inv, grad, dist);
    if (!std::isfinite(loss)) {
      throw TrainingError("non-finite loss at edge " + edge_name(labels, edge.source, edge.target));
    }
    sum += edge.weight * loss;
  }
  if (!rows_finite(grad)) {
    // Replay edge by edge to name the culprit.
    for (std::size_t e = 0; e < batch.edges.size(); ++e) {
      const auto& edge = batch.edges[e];
      GradientBuffer single(theta.size(), theta.dim());
      accumulate_edge(theta, edge.source, edge.target, batch.negatives[e], edge.weight * inv,
                      single, dist);
      if (!rows_finite(single)) {
        throw TrainingError("non-finite gradient at edge " +
                            edge_name(labels, edge.source, edge.target));
      }
    }
    throw TrainingError("non-finite gradient in batch");
  }
  return sum;
}

}  // namespace

double edge_loss(const EmbeddingTable& theta, NodeId i, NodeId j,
                 std::span<const NodeId> negatives) {
  GradientBuffer unused(0, 0);
  std::vector<double> dist;
  return accumulate_edge(theta, i, j, negatives, 0.0, unused, dist);
}

double total_loss(const EmbeddingTable& theta, std::span<const Batch> batches) {
  double sum = 0.0;
  for (const Batch& b : batches) {
    for (std::size_t e = 0; e < b.edges.size(); ++e) {
      const auto& edge = b.edges[e];
      sum += edge.weight * edge_loss(theta, edge.source, edge.target, b.negatives[e]);
    }
  }
  return sum;
}

std::vector<double> total_loss_gradient(const EmbeddingTable& theta,
                                        std::span<const Batch> batches) {
  GradientBuffer grad(theta.size(), theta.dim());
  std::vector<double> dist;
  for (const Batch& b : batches) {
    for (std::size_t e = 0; e < b.edges.size(); ++e) {
      const auto& edge = b.edges[e];
      accumulate_edge(theta, edge.source, edge.target, b.negatives[e], edge.weight, grad, dist);
    }
  }
  return std::move(grad.dense());
}

double sgd_step(EmbeddingTable& theta, const Batch& batch, double lr, double eps,
                const HierarchyGraph* labels) {
  if (!(lr > 0.0)) {
    throw InputError("learning rate must be positive");
  }
  if (batch.edges.empty()) {
    return 0.0;
  }
  GradientBuffer grad(theta.size(), theta.dim());
  std::vector<double> dist;
  const double loss = batch_gradient(theta, batch, grad, dist, labels);
  for (NodeId n : grad.rows()) {
    riemannian_update(theta.row(n), grad.row(n), lr, eps);
  }
  return loss;
}

void apply_dilation(EmbeddingTable& theta, double k, double eps) {
  for (NodeId n = 0; n < theta.size(); ++n) {
    dilate_inplace(theta.row(n), k, eps);
  }
}

EmbeddingTable initial_embedding(std::size_t num_nodes, const TrainConfig& cfg, Rng& rng) {
  EmbeddingTable table(num_nodes, static_cast<std::size_t>(cfg.dim));
  std::uniform_real_distribution<double> coord(-cfg.init_radius, cfg.init_radius);
  for (double& x : table.data()) {
    x = coord(rng);
  }
  return table;
}

std::vector<WeightedEdge> epoch_edges(const HierarchyGraph& g, const TrainConfig& cfg,
                                      int epoch) {
  std::vector<WeightedEdge> out;
  const bool closure = cfg.uses_closure() && epoch <= cfg.n_tc;
  const auto add = [&](const std::vector<Edge>& edges, double weight) {
    for (const Edge& e : edges) {
      out.push_back({e.child, e.parent, weight});
      if (cfg.symmetric) {
        out.push_back({e.parent, e.child, weight});
      }
    }
  };
  const std::size_t copies = cfg.symmetric ? 2 : 1;
  out.reserve(copies * (g.edges().size() + (closure ? g.closure_edges().size() : 0)));
  add(g.edges(), 1.0);
  if (closure) {
    add(g.closure_edges(), cfg.eta_tc);
  }
  return out;
}

namespace {

// Lock-free concurrent pass: workers race on the table through relaxed
// atomics. Only convergence-level guarantees.
double concurrent_pass(EmbeddingTable& theta, const std::vector<Batch>& batches, double lr,
                       double eps, int workers, const HierarchyGraph& g) {
  std::atomic<std::size_t> next{0};
  std::vector<double> losses(static_cast<std::size_t>(workers), 0.0);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  const std::size_t dim = theta.dim();

  auto work = [&](std::size_t w) {
    try {
      GradientBuffer grad(theta.size(), dim);
      std::vector<double> dist;
      std::vector<double> point(dim);
      for (std::size_t b = next++; b < batches.size(); b = next++) {
        grad.clear();
        losses[w] += batch_gradient(theta, batches[b], grad, dist, &g);
        for (NodeId n : grad.rows()) {
          auto row = theta.row(n);
          for (std::size_t k = 0; k < dim; ++k) {
            point[k] = std::atomic_ref<double>(row[k]).load(std::memory_order_relaxed);
          }
          riemannian_update(point, grad.row(n), lr, eps);
          for (std::size_t k = 0; k < dim; ++k) {
            std::atomic_ref<double>(row[k]).store(point[k], std::memory_order_relaxed);
          }
        }
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };

  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back(work, static_cast<std::size_t>(w));
  }
  pool.clear();
  for (const auto& err : errors) {
    if (err) {
      std::rethrow_exception(err);
    }
  }
  double sum = 0.0;
  for (double l : losses) {
    sum += l;
  }
  return sum;
}

}  // namespace

TrainResult train(const HierarchyGraph& graph, const TrainConfig& cfg,
                  const EpochObserver& observer) {
  cfg.validate();
  if (graph.num_nodes() < 2 || graph.edges().empty()) {
    throw InputError("training needs at least one edge");
  }
  HierarchyGraph g = graph;
  if (cfg.uses_closure()) {
    if (!g.is_tree()) {
      g.validate_tree();
    }
    g.attach_closure();
  }

  Rng rng(cfg.seed);
  TrainResult result{initial_embedding(g.num_nodes(), cfg, rng), {}};
  EmbeddingTable& theta = result.table;
  result.trace.reserve(static_cast<std::size_t>(cfg.epochs));

  GradientBuffer grad(g.num_nodes(), theta.dim());
  std::vector<double> dist;
  int last_dilation = std::numeric_limits<int>::min() / 2;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    EpochRecord rec{epoch, 0.0, false, 0};

    if (cfg.dilation_enabled && epoch >= cfg.dilation_start_epoch &&
        epoch - last_dilation >= cfg.dilation_cooldown) {
      rec.offenders = capacity_check(theta, g, cfg.dim).size();
      if (rec.offenders > 0) {
        apply_dilation(theta, cfg.dilation_k, cfg.eps);
        rec.dilation_applied = true;
        last_dilation = epoch;
      }
    }

    const bool closure = cfg.uses_closure() && epoch <= cfg.n_tc;
    auto edges = epoch_edges(g, cfg, epoch);
    const double num_edges = static_cast<double>(edges.size());
    auto batches = make_batches(std::move(edges), cfg.batch_size, rng);
    for (Batch& b : batches) {
      fill_negatives(b, g, cfg.negatives, rng, closure);
    }

    const double lr = epoch <= cfg.burn_in_epochs ? cfg.lr / cfg.burn_in_lr_divisor : cfg.lr;
    double loss_sum = 0.0;
    if (cfg.workers > 1) {
      loss_sum = concurrent_pass(theta, batches, lr, cfg.eps, cfg.workers, g);
    } else {
      for (const Batch& b : batches) {
        grad.clear();
        loss_sum += batch_gradient(theta, b, grad, dist, &g);
        for (NodeId n : grad.rows()) {
          riemannian_update(theta.row(n), grad.row(n), lr, cfg.eps);
        }
      }
    }
    rec.mean_loss = loss_sum / num_edges;
    result.trace.push_back(rec);
    if (observer) {
      observer(rec, theta);
    }
  }
  return result;
}

}  // namespace hypertree
