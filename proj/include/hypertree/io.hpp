#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypertree/embedding.hpp"
#include "hypertree/evaluation.hpp"
#include "hypertree/graph.hpp"
#include "hypertree/training.hpp"
#include "json.hpp"

namespace hypertree {

/// Labels plus coordinates as read from a checkpoint file, in file order.
struct Checkpoint {
  std::vector<std::string> labels;
  EmbeddingTable table;
};

/// Writes "label<TAB>c1<TAB>...<TAB>cd" per node with 17 significant digits.
void save_checkpoint(const std::filesystem::path& path, const HierarchyGraph& g,
                     const EmbeddingTable& table);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Reorders checkpoint rows to graph node ids. Throws InputError when a graph
/// node has no row or a row names an unknown node.
EmbeddingTable align_to_graph(const Checkpoint& ckpt, const HierarchyGraph& g);

/// Sidecar "<checkpoint>.meta" with the config snapshot and epoch count.
std::filesystem::path metadata_path(const std::filesystem::path& checkpoint);
void save_metadata(const std::filesystem::path& checkpoint, const TrainConfig& cfg, int epoch);

/// Flat "key = value" text; '#' starts a comment line.
std::map<std::string, std::string> parse_key_values(const std::filesystem::path& path);
void apply_config_value(TrainConfig& cfg, const std::string& key, const std::string& value);
TrainConfig load_config(const std::filesystem::path& path, TrainConfig base = {});
std::string config_to_text(const TrainConfig& cfg);
nlohmann::json config_to_json(const TrainConfig& cfg);

/// CSV with header "epoch,loss,dilation_applied,offenders".
void save_trace(const std::filesystem::path& path, const TrainTrace& trace);

/// {"map", "mr_paper", "mr_conventional", "illness": {...} or null}.
nlohmann::json metrics_to_json(const MetricsReport& metrics,
                               const std::optional<IllnessReport>& illness);
nlohmann::json illness_to_json(const IllnessReport& illness);

/// CSV "source,target,inferred,category" with labels.
void save_illness_cases(const std::filesystem::path& path, const HierarchyGraph& g,
                        const IllnessReport& illness);

/// SHA-256 of a file's bytes, lowercase hex.
std::string file_digest(const std::filesystem::path& path);

/// Writes to a temporary sibling and renames it into place.
void write_file_atomically(const std::filesystem::path& path, const std::string& contents);

/// "%.17g" rendering used by every text output.
std::string format_real(double x);

}  // namespace hypertree
