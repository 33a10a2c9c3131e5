#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "hypertree/errors.hpp"
#include "hypertree/evaluation.hpp"
#include "hypertree/graph.hpp"
#include "hypertree/io.hpp"
#include "hypertree/training.hpp"
#include "json.hpp"

namespace hypertree::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// "dir/run.tsv" + ".trace.csv" -> "dir/run.trace.csv"
fs::path sibling(const fs::path& p, const std::string& suffix) {
  return p.parent_path() / (p.stem().string() + suffix);
}

fs::path with_seed(const fs::path& p, std::uint64_t seed) {
  return p.parent_path() / (p.stem().string() + ".seed" + std::to_string(seed) + p.extension().string());
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

json file_entry(const fs::path& p) { return {{"path", p.string()}, {"sha256", file_digest(p)}}; }

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("HYPERTREE_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  TrainConfig probe;
  apply_config_value(probe, "seed", raw);
  return probe.seed;
}

EmbeddingTable load_table(const fs::path& ckpt, const HierarchyGraph& g) {
  return align_to_graph(load_checkpoint(ckpt), g);
}

// Tree used for illness queries: the backbone if given, else the graph itself
// when it validates.
std::optional<HierarchyGraph> illness_tree(const HierarchyGraph& g, const std::string& backbone) {
  if (!backbone.empty()) {
    auto tree = load_edge_list(backbone);
    tree.validate_tree();
    return tree;
  }
  HierarchyGraph tree = g;
  try {
    tree.validate_tree();
  } catch (const ValidationError&) {
    return std::nullopt;
  }
  return tree;
}

// ---------------------------------------------------------------- gen-tree

struct GenTreeArgs {
  int branching = 5;
  int levels = 3;
  std::string out;
};

void add_gen_tree(CLI::App& app, GenTreeArgs& a) {
  auto* sub = app.add_subcommand("gen-tree", "Write a balanced tree as an edge list");
  sub->add_option("--branching,-b", a.branching, "Children per internal node")->capture_default_str();
  sub->add_option("--levels,-l", a.levels, "Levels below the root")->capture_default_str();
  sub->add_option("--out,-o", a.out, "Output edge list")->required();
}

int gen_tree(const GenTreeArgs& a, std::ostream& out) {
  const auto g = generate_balanced_tree(a.branching, a.levels);
  ensure_parent(a.out);
  write_edge_list(a.out, g, g.edges());
  out << "wrote " << g.edges().size() << " edges over " << g.num_nodes() << " nodes to " << a.out
      << '\n';
  return kOk;
}

// ------------------------------------------------------------------- train

struct TrainArgs {
  std::string edges, config, out, trace, manifest;
  std::vector<std::uint64_t> seeds;
  std::optional<int> dim, epochs, batch_size, negatives, n_tc, burn_in_epochs, dilation_start,
      dilation_cooldown, workers;
  std::optional<double> lr, eta_tc, burn_in_lr_divisor, dilation_k, init_radius, eps;
  std::optional<std::uint64_t> seed;
  std::optional<bool> dilation, symmetric;
  bool eval = false;
};

void add_train(CLI::App& app, TrainArgs& a) {
  auto* sub = app.add_subcommand("train", "Train an embedding");
  sub->add_option("edges", a.edges, "Edge list (child<TAB>parent)")->required()->check(CLI::ExistingFile);
  sub->add_option("--config,-c", a.config, "key = value config file")->check(CLI::ExistingFile);
  sub->add_option("--out,-o", a.out, "Checkpoint path")->required();
  sub->add_option("--trace", a.trace, "Trace CSV (default <out>.trace.csv)");
  sub->add_option("--manifest", a.manifest, "Run manifest (default <out>.manifest.json)");
  sub->add_option("--seeds", a.seeds, "Run once per seed, outputs suffixed .seed<N>")->delimiter(',');
  sub->add_option("--seed", a.seed, "Random seed (overrides HYPERTREE_SEED)");
  sub->add_option("--dim", a.dim);
  sub->add_option("--lr", a.lr);
  sub->add_option("--epochs", a.epochs);
  sub->add_option("--batch-size", a.batch_size);
  sub->add_option("--negatives,-m", a.negatives);
  sub->add_option("--eta-tc", a.eta_tc);
  sub->add_option("--n-tc", a.n_tc);
  sub->add_option("--burn-in-epochs", a.burn_in_epochs);
  sub->add_option("--burn-in-lr-divisor", a.burn_in_lr_divisor);
  sub->add_flag("--dilation,!--no-dilation", a.dilation, "Capacity-triggered dilation");
  sub->add_option("--dilation-k", a.dilation_k);
  sub->add_option("--dilation-start", a.dilation_start);
  sub->add_option("--dilation-cooldown", a.dilation_cooldown);
  sub->add_flag("--symmetric,!--directed", a.symmetric, "Train each relation in both directions");
  sub->add_option("--init-radius", a.init_radius);
  sub->add_option("--eps", a.eps);
  sub->add_option("--workers", a.workers, "Concurrent workers (>1 is not reproducible)");
  sub->add_flag("--eval", a.eval, "Print reconstruction metrics after training");
}

TrainConfig resolve_config(const TrainArgs& a) {
  TrainConfig cfg;
  if (!a.config.empty()) cfg = load_config(a.config);
  if (auto s = env_seed()) cfg.seed = *s;
  if (a.seed) cfg.seed = *a.seed;
  if (a.dim) cfg.dim = *a.dim;
  if (a.lr) cfg.lr = *a.lr;
  if (a.epochs) cfg.epochs = *a.epochs;
  if (a.batch_size) cfg.batch_size = *a.batch_size;
  if (a.negatives) cfg.negatives = *a.negatives;
  if (a.eta_tc) cfg.eta_tc = *a.eta_tc;
  if (a.n_tc) cfg.n_tc = *a.n_tc;
  if (a.burn_in_epochs) cfg.burn_in_epochs = *a.burn_in_epochs;
  if (a.burn_in_lr_divisor) cfg.burn_in_lr_divisor = *a.burn_in_lr_divisor;
  if (a.dilation) cfg.dilation_enabled = *a.dilation;
  if (a.dilation_k) cfg.dilation_k = *a.dilation_k;
  if (a.dilation_start) cfg.dilation_start_epoch = *a.dilation_start;
  if (a.dilation_cooldown) cfg.dilation_cooldown = *a.dilation_cooldown;
  if (a.symmetric) cfg.symmetric = *a.symmetric;
  if (a.init_radius) cfg.init_radius = *a.init_radius;
  if (a.eps) cfg.eps = *a.eps;
  if (a.workers) cfg.workers = *a.workers;
  cfg.validate();
  return cfg;
}

int train_once(const TrainArgs& a, const std::vector<std::string>& argv, const HierarchyGraph& g,
               TrainConfig cfg, std::optional<std::uint64_t> seed, std::ostream& out) {
  const auto seeded = [&](const fs::path& p) { return seed ? with_seed(p, *seed) : p; };
  if (seed) cfg.seed = *seed;
  const fs::path ckpt = seeded(a.out);
  const fs::path trace = a.trace.empty() ? sibling(ckpt, ".trace.csv") : seeded(a.trace);
  const fs::path manifest_path =
      a.manifest.empty() ? sibling(ckpt, ".manifest.json") : seeded(a.manifest);
  for (const auto& p : {ckpt, trace, manifest_path}) ensure_parent(p);

  json manifest;
  manifest["command"] = "train";
  manifest["args"] = argv;
  manifest["seed"] = cfg.seed;
  manifest["config"] = config_to_json(cfg);
  manifest["inputs"]["edges"] = file_entry(a.edges);
  if (!a.config.empty()) manifest["inputs"]["config"] = file_entry(a.config);
  manifest["outputs"] = {{"checkpoint", ckpt.string()},
                         {"metadata", metadata_path(ckpt).string()},
                         {"trace", trace.string()}};
  manifest["started_at"] = utc_now();
  manifest["finished_at"] = nullptr;
  manifest["status"] = "running";
  write_file_atomically(manifest_path, manifest.dump(2) + "\n");

  TrainResult result;
  try {
    result = train(g, cfg);
  } catch (const std::exception& e) {
    manifest["status"] = "failed";
    manifest["error"] = e.what();
    manifest["finished_at"] = utc_now();
    write_file_atomically(manifest_path, manifest.dump(2) + "\n");
    throw;
  }
  save_checkpoint(ckpt, g, result.table);
  save_metadata(ckpt, cfg, cfg.epochs);
  save_trace(trace, result.trace);

  manifest["status"] = "completed";
  manifest["finished_at"] = utc_now();
  manifest["output_digests"] = {{"checkpoint", file_digest(ckpt)},
                                {"metadata", file_digest(metadata_path(ckpt))},
                                {"trace", file_digest(trace)}};
  write_file_atomically(manifest_path, manifest.dump(2) + "\n");

  out << "seed " << cfg.seed << ": " << cfg.epochs << " epochs";
  if (!result.trace.empty()) out << ", final loss " << format_real(result.trace.back().mean_loss);
  out << ", checkpoint " << ckpt.string() << '\n';
  if (a.eval) {
    const auto tree = illness_tree(g, "");
    std::optional<IllnessReport> illness;
    if (tree) illness = classify_illness(result.table, *tree);
    out << metrics_to_json(evaluate_reconstruction(result.table, g), illness).dump() << '\n';
  }
  return kOk;
}

int train_cmd(const TrainArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
  if (a.seed && !a.seeds.empty()) throw InputError("use either --seed or --seeds, not both");
  const TrainConfig cfg = resolve_config(a);
  const auto g = load_edge_list(a.edges);
  if (a.seeds.empty()) return train_once(a, argv, g, cfg, std::nullopt, out);
  for (std::uint64_t s : a.seeds) train_once(a, argv, g, cfg, s, out);
  return kOk;
}

// -------------------------------------------------------- eval / diagnose

struct EvalArgs {
  std::string edges, checkpoint, backbone, out, cases;
};

CLI::App* add_eval_like(CLI::App& app, EvalArgs& a, const std::string& name, const std::string& help) {
  auto* sub = app.add_subcommand(name, help);
  sub->add_option("edges", a.edges, "Edge list")->required()->check(CLI::ExistingFile);
  sub->add_option("checkpoint", a.checkpoint, "Checkpoint TSV")->required()->check(CLI::ExistingFile);
  sub->add_option("--backbone", a.backbone, "Tree used for illness queries on non-tree graphs")
      ->check(CLI::ExistingFile);
  sub->add_option("--out,-o", a.out, "Also write the JSON report here");
  return sub;
}

void emit_json(const json& doc, const std::string& path, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (!path.empty()) {
    ensure_parent(path);
    write_file_atomically(path, text);
  }
  out << text;
}

int eval_cmd(const EvalArgs& a, std::ostream& out) {
  const auto g = load_edge_list(a.edges);
  const auto ckpt = load_checkpoint(a.checkpoint);
  const auto metrics = evaluate_reconstruction(align_to_graph(ckpt, g), g);
  std::optional<IllnessReport> illness;
  if (const auto tree = illness_tree(g, a.backbone)) {
    illness = classify_illness(align_to_graph(ckpt, *tree), *tree);
  }
  emit_json(metrics_to_json(metrics, illness), a.out, out);
  return kOk;
}

HierarchyGraph require_tree(const HierarchyGraph& g, const std::string& backbone) {
  try {
    if (auto tree = illness_tree(g, backbone)) return *tree;
  } catch (const ValidationError& e) {
    throw ValidationError(std::string("backbone: ") + e.what());
  }
  throw InputError("illness diagnostics need a tree; supply a backbone tree with --backbone");
}

int diagnose_cmd(const EvalArgs& a, std::ostream& out) {
  const auto g = load_edge_list(a.edges);
  const auto tree = require_tree(g, a.backbone);
  const auto report = classify_illness(load_table(a.checkpoint, tree), tree);
  const fs::path cases = a.cases.empty() ? sibling(a.checkpoint, ".illness.csv") : fs::path(a.cases);
  ensure_parent(cases);
  save_illness_cases(cases, tree, report);
  json doc = illness_to_json(report);
  doc["total"] = report.total();
  doc["cases_csv"] = cases.string();
  emit_json(doc, a.out, out);
  return kOk;
}

// -------------------------------------------------------------------- plot

struct PlotArgs {
  std::string edges, checkpoint, backbone, out;
};

void add_plot(CLI::App& app, PlotArgs& a) {
  auto* sub = app.add_subcommand("plot", "Render a 2-D embedding as SVG");
  sub->add_option("edges", a.edges, "Edge list")->required()->check(CLI::ExistingFile);
  sub->add_option("checkpoint", a.checkpoint, "Checkpoint TSV")->required()->check(CLI::ExistingFile);
  sub->add_option("--backbone", a.backbone, "Tree used to mark illness edges")->check(CLI::ExistingFile);
  sub->add_option("--out,-o", a.out, "Output SVG")->required();
}

int plot_cmd(const PlotArgs& a, std::ostream& out) {
  const auto g = load_edge_list(a.edges);
  const auto t = load_table(a.checkpoint, g);
  if (t.dim() != 2) {
    throw InputError("plot needs a 2-dimensional checkpoint, got dimension " + std::to_string(t.dim()));
  }
  std::vector<char> ill(g.num_nodes(), 0);
  if (const auto tree = illness_tree(g, a.backbone)) {
    for (const auto& c : classify_illness(align_to_graph(load_checkpoint(a.checkpoint), *tree), *tree).cases) {
      if (const auto id = g.find(tree->label(c.source))) ill[*id] = 1;
    }
  }

  const auto x = [&](NodeId n) { return format_real(t.row(n)[0]); };
  const auto y = [&](NodeId n) { return format_real(-t.row(n)[1]); };
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" "
         "viewBox=\"-1.05 -1.05 2.1 2.1\">\n"
      << "<circle class=\"boundary\" cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"black\" "
         "stroke-width=\"0.004\"/>\n";
  std::size_t red = 0;
  for (const Edge& e : g.edges()) {
    const bool bad = ill[e.child] != 0;
    red += bad;
    svg << "<line class=\"" << (bad ? "edge illness" : "edge") << "\" x1=\"" << x(e.child)
        << "\" y1=\"" << y(e.child) << "\" x2=\"" << x(e.parent) << "\" y2=\"" << y(e.parent)
        << "\" stroke=\"" << (bad ? "red" : "gray") << "\" stroke-width=\"0.003\"/>\n";
  }
  for (NodeId n = 0; n < g.num_nodes(); ++n) {
    svg << "<circle class=\"node\" cx=\"" << x(n) << "\" cy=\"" << y(n)
        << "\" r=\"0.006\" fill=\"steelblue\"><title>" << g.label(n) << "</title></circle>\n";
  }
  svg << "</svg>\n";
  ensure_parent(a.out);
  write_file_atomically(a.out, svg.str());
  out << "wrote " << g.edges().size() << " edges (" << red << " illness) to " << a.out << '\n';
  return kOk;
}

// ----------------------------------------------------------------- closure

struct ClosureArgs {
  std::string edges, out;
};

void add_closure(CLI::App& app, ClosureArgs& a) {
  auto* sub = app.add_subcommand("closure", "Write the node-to-non-parent-ancestor edges");
  sub->add_option("edges", a.edges, "Tree edge list")->required()->check(CLI::ExistingFile);
  sub->add_option("--out,-o", a.out, "Output edge list")->required();
}

int closure_cmd(const ClosureArgs& a, std::ostream& out) {
  auto g = load_edge_list(a.edges);
  g.validate_tree();
  const auto closure = g.transitive_closure();
  ensure_parent(a.out);
  write_edge_list(a.out, g, closure);
  out << "wrote " << closure.size() << " closure edges to " << a.out << '\n';
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Poincare-ball embeddings of hierarchies", "hypertree"};
  app.require_subcommand(1);

  GenTreeArgs gen;
  TrainArgs tr;
  EvalArgs ev, dg;
  PlotArgs pl;
  ClosureArgs cl;
  add_gen_tree(app, gen);
  add_train(app, tr);
  add_eval_like(app, ev, "eval", "Reconstruction metrics as JSON");
  add_eval_like(app, dg, "diagnose", "Illness counts as JSON plus a per-case CSV")
      ->add_option("--cases", dg.cases, "Per-case CSV (default <checkpoint>.illness.csv)");
  add_plot(app, pl);
  add_closure(app, cl);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "gen-tree") return gen_tree(gen, out);
    if (name == "train") return train_cmd(tr, args, out);
    if (name == "eval") return eval_cmd(ev, out);
    if (name == "diagnose") return diagnose_cmd(dg, out);
    if (name == "plot") return plot_cmd(pl, out);
    if (name == "closure") return closure_cmd(cl, out);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kValidationError;
  } catch (const TrainingError& e) {
    err << "training error: " << e.what() << '\n';
    return kTrainingError;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

}  // namespace hypertree::cli
