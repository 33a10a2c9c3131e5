#include "hypertree/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <unordered_map>

#include <openssl/evp.h>

#include "hypertree/errors.hpp"

namespace hypertree {

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw InputError("cannot write '" + path.string() + "'");
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) {
    return "";
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string& text, const std::string& where) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw InputError(where + ": cannot parse '" + text + "' as a number");
  }
  return value;
}

template <class Int>
Int parse_int(const std::string& text, const std::string& where) {
  Int value = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw InputError(where + ": cannot parse '" + text + "' as an integer");
  }
  return value;
}

bool parse_bool(const std::string& text, const std::string& where) {
  if (text == "true" || text == "1" || text == "on" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "off" || text == "no") return false;
  throw InputError(where + ": cannot parse '" + text + "' as a boolean");
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) {
      return out;
    }
    start = pos + 1;
  }
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const HierarchyGraph& g,
                     const EmbeddingTable& table) {
  if (table.size() != g.num_nodes()) {
    throw InputError("embedding table does not cover the graph");
  }
  std::string text;
  for (NodeId n = 0; n < table.size(); ++n) {
    text += g.label(n);
    for (double x : table.row(n)) {
      text += '\t';
      text += format_real(x);
    }
    text += '\n';
  }
  write_file_atomically(path, text);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open checkpoint '" + path.string() + "'");
  }
  Checkpoint ckpt;
  std::vector<double> coords;
  std::size_t dim = 0;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    const std::string where = path.string() + ":" + std::to_string(lineno);
    auto fields = split(line, '\t');
    if (fields.size() < 3) {
      throw InputError(where + ": expected a label and at least two coordinates");
    }
    if (dim == 0) {
      dim = fields.size() - 1;
    } else if (fields.size() - 1 != dim) {
      throw InputError(where + ": inconsistent dimension");
    }
    ckpt.labels.push_back(fields[0]);
    for (std::size_t k = 1; k < fields.size(); ++k) {
      coords.push_back(parse_real(fields[k], where));
    }
  }
  if (ckpt.labels.empty()) {
    throw InputError("checkpoint '" + path.string() + "' is empty");
  }
  ckpt.table = EmbeddingTable(ckpt.labels.size(), dim);
  std::copy(coords.begin(), coords.end(), ckpt.table.data().begin());
  return ckpt;
}

EmbeddingTable align_to_graph(const Checkpoint& ckpt, const HierarchyGraph& g) {
  EmbeddingTable out(g.num_nodes(), ckpt.table.dim());
  std::vector<char> seen(g.num_nodes(), 0);
  for (NodeId row = 0; row < ckpt.labels.size(); ++row) {
    const auto id = g.find(ckpt.labels[row]);
    if (!id) {
      throw InputError("checkpoint node '" + ckpt.labels[row] + "' is not in the graph");
    }
    std::copy_n(ckpt.table.row(row).begin(), ckpt.table.dim(), out.row(*id).begin());
    seen[*id] = 1;
  }
  for (NodeId n = 0; n < g.num_nodes(); ++n) {
    if (!seen[n]) {
      throw InputError("graph node '" + g.label(n) + "' has no checkpoint row");
    }
  }
  return out;
}

std::filesystem::path metadata_path(const std::filesystem::path& checkpoint) {
  auto p = checkpoint;
  p += ".meta";
  return p;
}

void save_metadata(const std::filesystem::path& checkpoint, const TrainConfig& cfg, int epoch) {
  write_file_atomically(metadata_path(checkpoint),
                        config_to_text(cfg) + "epoch = " + std::to_string(epoch) + "\n");
}

std::map<std::string, std::string> parse_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open config '" + path.string() + "'");
  }
  std::map<std::string, std::string> out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') {
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    out[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return out;
}

void apply_config_value(TrainConfig& cfg, const std::string& key, const std::string& value) {
  const std::string where = "config key '" + key + "'";
  if (key == "dim") cfg.dim = parse_int<int>(value, where);
  else if (key == "lr") cfg.lr = parse_real(value, where);
  else if (key == "epochs") cfg.epochs = parse_int<int>(value, where);
  else if (key == "batch_size") cfg.batch_size = parse_int<int>(value, where);
  else if (key == "negatives" || key == "m") cfg.negatives = parse_int<int>(value, where);
  else if (key == "symmetric") cfg.symmetric = parse_bool(value, where);
  else if (key == "eta_tc") cfg.eta_tc = parse_real(value, where);
  else if (key == "n_tc") cfg.n_tc = parse_int<int>(value, where);
  else if (key == "burn_in_epochs") cfg.burn_in_epochs = parse_int<int>(value, where);
  else if (key == "burn_in_lr_divisor") cfg.burn_in_lr_divisor = parse_real(value, where);
  else if (key == "dilation" || key == "dilation_enabled") cfg.dilation_enabled = parse_bool(value, where);
  else if (key == "dilation_k") cfg.dilation_k = parse_real(value, where);
  else if (key == "dilation_start_epoch") cfg.dilation_start_epoch = parse_int<int>(value, where);
  else if (key == "dilation_cooldown") cfg.dilation_cooldown = parse_int<int>(value, where);
  else if (key == "init_radius") cfg.init_radius = parse_real(value, where);
  else if (key == "eps") cfg.eps = parse_real(value, where);
  else if (key == "seed") cfg.seed = parse_int<std::uint64_t>(value, where);
  else if (key == "workers") cfg.workers = parse_int<int>(value, where);
  else throw InputError("unknown config key '" + key + "'");
}

TrainConfig load_config(const std::filesystem::path& path, TrainConfig base) {
  for (const auto& [key, value] : parse_key_values(path)) {
    apply_config_value(base, key, value);
  }
  return base;
}

std::string config_to_text(const TrainConfig& cfg) {
  std::ostringstream out;
  out << "dim = " << cfg.dim << '\n'
      << "lr = " << format_real(cfg.lr) << '\n'
      << "epochs = " << cfg.epochs << '\n'
      << "batch_size = " << cfg.batch_size << '\n'
      << "negatives = " << cfg.negatives << '\n'
      << "symmetric = " << (cfg.symmetric ? "true" : "false") << '\n'
      << "eta_tc = " << format_real(cfg.eta_tc) << '\n'
      << "n_tc = " << cfg.n_tc << '\n'
      << "burn_in_epochs = " << cfg.burn_in_epochs << '\n'
      << "burn_in_lr_divisor = " << format_real(cfg.burn_in_lr_divisor) << '\n'
      << "dilation = " << (cfg.dilation_enabled ? "true" : "false") << '\n'
      << "dilation_k = " << format_real(cfg.dilation_k) << '\n'
      << "dilation_start_epoch = " << cfg.dilation_start_epoch << '\n'
      << "dilation_cooldown = " << cfg.dilation_cooldown << '\n'
      << "init_radius = " << format_real(cfg.init_radius) << '\n'
      << "eps = " << format_real(cfg.eps) << '\n'
      << "seed = " << cfg.seed << '\n'
      << "workers = " << cfg.workers << '\n';
  return out.str();
}

nlohmann::json config_to_json(const TrainConfig& cfg) {
  return {{"dim", cfg.dim},
          {"lr", cfg.lr},
          {"epochs", cfg.epochs},
          {"batch_size", cfg.batch_size},
          {"negatives", cfg.negatives},
          {"symmetric", cfg.symmetric},
          {"eta_tc", cfg.eta_tc},
          {"n_tc", cfg.n_tc},
          {"burn_in_epochs", cfg.burn_in_epochs},
          {"burn_in_lr_divisor", cfg.burn_in_lr_divisor},
          {"dilation", cfg.dilation_enabled},
          {"dilation_k", cfg.dilation_k},
          {"dilation_start_epoch", cfg.dilation_start_epoch},
          {"dilation_cooldown", cfg.dilation_cooldown},
          {"init_radius", cfg.init_radius},
          {"eps", cfg.eps},
          {"seed", cfg.seed},
          {"workers", cfg.workers}};
}

void save_trace(const std::filesystem::path& path, const TrainTrace& trace) {
  std::string text = "epoch,loss,dilation_applied,offenders\n";
  for (const auto& rec : trace) {
    text += std::to_string(rec.epoch) + ',' + format_real(rec.mean_loss) + ',' +
            (rec.dilation_applied ? "1" : "0") + ',' + std::to_string(rec.offenders) + '\n';
  }
  write_file_atomically(path, text);
}

nlohmann::json illness_to_json(const IllnessReport& illness) {
  return {{"capacity", illness.capacity}, {"intra", illness.intra}, {"inter", illness.inter}};
}

nlohmann::json metrics_to_json(const MetricsReport& metrics,
                               const std::optional<IllnessReport>& illness) {
  nlohmann::json out;
  out["map"] = metrics.map;
  out["mr_paper"] = metrics.mr_paper;
  out["mr_conventional"] = metrics.mr_conventional;
  out["illness"] = illness ? illness_to_json(*illness) : nlohmann::json(nullptr);
  return out;
}

void save_illness_cases(const std::filesystem::path& path, const HierarchyGraph& g,
                        const IllnessReport& illness) {
  auto out = open_for_write(path);
  out << "source,target,inferred,category\n";
  for (const auto& c : illness.cases) {
    out << g.label(c.source) << ',' << g.label(c.target) << ',' << g.label(c.inferred) << ','
        << to_string(c.category) << '\n';
  }
}

std::string file_digest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open '" + path.string() + "'");
  }
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in.read(buf.data(), static_cast<std::streamsize>(buf.size())) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  for (unsigned int k = 0; k < len; ++k) {
    char pair[3];
    std::snprintf(pair, sizeof pair, "%02x", md[k]);
    hex += pair;
  }
  return hex;
}

void write_file_atomically(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    auto out = open_for_write(tmp);
    out << contents;
    if (!out.flush()) {
      throw InputError("write failed for '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw InputError("cannot move '" + tmp.string() + "' to '" + path.string() +
                     "': " + ec.message());
  }
}

}  // namespace hypertree
