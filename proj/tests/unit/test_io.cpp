#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "hypertree/errors.hpp"
#include "hypertree/io.hpp"
#include "support/oracles.hpp"
#include "support/temp_dir.hpp"

using namespace hypertree;
using hypertree::testing::read_file;
using hypertree::testing::TempDir;

TEST_CASE("checkpoint round trip is bit exact") {
  TempDir dir;
  const auto g = generate_balanced_tree(3, 2);
  std::mt19937_64 gen(41);
  const auto t = hypertree::testing::random_table(gen, g.num_nodes(), 3, 0.99999);
  save_checkpoint(dir.path() / "c.tsv", g, t);
  const auto ckpt = load_checkpoint(dir.path() / "c.tsv");
  CHECK(ckpt.labels == g.labels());
  CHECK(ckpt.table == t);
  CHECK(align_to_graph(ckpt, g) == t);
  CHECK_FALSE(std::filesystem::exists(dir.path() / "c.tsv.tmp"));

  const auto text = read_file(dir.path() / "c.tsv");
  CHECK(text.substr(0, 2) == "0\t");
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(g.num_nodes()));
}

TEST_CASE("checkpoint alignment and errors") {
  TempDir dir;
  HierarchyGraph g;
  const NodeId a = g.add_node("a");
  g.add_edge(a, g.add_node("b"));
  const auto p = dir.write("x.tsv", "b\t0.5\t0\na\t0.25\t-0.5\n");
  const auto t = align_to_graph(load_checkpoint(p), g);
  CHECK(t.row(0)[0] == 0.25);
  CHECK(t.row(0)[1] == -0.5);
  CHECK(t.row(1)[0] == 0.5);

  CHECK_THROWS_AS(load_checkpoint(dir.path() / "missing.tsv"), InputError);
  CHECK_THROWS_AS(load_checkpoint(dir.write("e.tsv", "")), InputError);
  CHECK_THROWS_AS(load_checkpoint(dir.write("f.tsv", "a\t0.1\n")), InputError);
  CHECK_THROWS_AS(load_checkpoint(dir.write("g.tsv", "a\t0.1\t0.2\nb\t0.1\n")), InputError);
  CHECK_THROWS_AS(load_checkpoint(dir.write("h.tsv", "a\t0.1\tzz\n")), InputError);
  CHECK_THROWS_AS(align_to_graph(load_checkpoint(dir.write("i.tsv", "a\t0\t0\n")), g), InputError);
  CHECK_THROWS_AS(align_to_graph(load_checkpoint(dir.write("j.tsv", "a\t0\t0\nb\t0\t0\nq\t0\t0\n")), g),
                  InputError);
}

TEST_CASE("config files") {
  TempDir dir;
  const auto p = dir.write("c.conf",
                           "# preset\n"
                           "dim = 5\n"
                           "  lr=1.0  \n"
                           "m = 20\n"
                           "dilation = off\n"
                           "symmetric = false\n"
                           "seed = 12345678901\n");
  const auto cfg = load_config(p);
  CHECK(cfg.dim == 5);
  CHECK(cfg.lr == 1.0);
  CHECK(cfg.negatives == 20);
  CHECK_FALSE(cfg.dilation_enabled);
  CHECK_FALSE(cfg.symmetric);
  CHECK(cfg.seed == 12345678901ULL);
  CHECK(cfg.epochs == TrainConfig{}.epochs);

  CHECK_THROWS_AS(load_config(dir.write("bad1.conf", "speed = 3\n")), InputError);
  CHECK_THROWS_AS(load_config(dir.write("bad2.conf", "dim = two\n")), InputError);
  CHECK_THROWS_AS(load_config(dir.write("bad3.conf", "dim 2\n")), InputError);
  CHECK_THROWS_AS(load_config(dir.write("bad4.conf", "dilation = maybe\n")), InputError);
  CHECK_THROWS_AS(load_config(dir.path() / "none.conf"), InputError);
}

TEST_CASE("config text round trips") {
  TempDir dir;
  TrainConfig cfg;
  cfg.dim = 7;
  cfg.lr = 0.1 + 0.2;  // not exactly representable in short form
  cfg.eta_tc = 0.35;
  cfg.dilation_enabled = false;
  cfg.seed = 99;
  cfg.workers = 3;
  const auto back = load_config(dir.write("r.conf", config_to_text(cfg)));
  CHECK(config_to_text(back) == config_to_text(cfg));
  CHECK(back.lr == cfg.lr);
  const auto j = config_to_json(cfg);
  CHECK(j["dim"] == 7);
  CHECK(j["dilation"] == false);
  CHECK(j["seed"] == 99);
}

TEST_CASE("metadata sidecar") {
  TempDir dir;
  TrainConfig cfg;
  cfg.epochs = 12;
  save_metadata(dir.path() / "m.tsv", cfg, 12);
  CHECK(metadata_path(dir.path() / "m.tsv") == dir.path() / "m.tsv.meta");
  const auto kv = parse_key_values(dir.path() / "m.tsv.meta");
  CHECK(kv.at("epoch") == "12");
  CHECK(kv.at("epochs") == "12");
}

TEST_CASE("trace csv") {
  TempDir dir;
  const TrainTrace trace{{1, 0.5, false, 0}, {2, 0.25, true, 3}};
  save_trace(dir.path() / "t.csv", trace);
  CHECK(read_file(dir.path() / "t.csv") ==
        "epoch,loss,dilation_applied,offenders\n1,0.5,0,0\n2,0.25,1,3\n");
}

TEST_CASE("metrics json schema") {
  const MetricsReport m{0.75, 1.5, 2.25};
  const auto without = metrics_to_json(m, std::nullopt);
  CHECK(without.size() == 4);
  CHECK(without["map"] == 0.75);
  CHECK(without["mr_paper"] == 1.5);
  CHECK(without["mr_conventional"] == 2.25);
  CHECK(without["illness"].is_null());

  IllnessReport r;
  r.capacity = 2;
  r.intra = 1;
  r.inter = 4;
  const auto with = metrics_to_json(m, r);
  CHECK(with["illness"] == nlohmann::json{{"capacity", 2}, {"intra", 1}, {"inter", 4}});
}

TEST_CASE("illness case csv") {
  TempDir dir;
  HierarchyGraph g;
  const NodeId a = g.add_node("a"), b = g.add_node("b"), c = g.add_node("c");
  IllnessReport r;
  r.cases.push_back({a, b, c, IllnessCategory::kInter});
  save_illness_cases(dir.path() / "i.csv", g, r);
  CHECK(read_file(dir.path() / "i.csv") == "source,target,inferred,category\na,b,c,inter\n");
}

TEST_CASE("digests and atomic writes") {
  TempDir dir;
  write_file_atomically(dir.path() / "abc.txt", "abc");
  CHECK(read_file(dir.path() / "abc.txt") == "abc");
  CHECK(file_digest(dir.path() / "abc.txt") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  write_file_atomically(dir.path() / "empty.txt", "");
  CHECK(file_digest(dir.path() / "empty.txt") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK_THROWS_AS(file_digest(dir.path() / "missing"), InputError);
  CHECK(format_real(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_real(std::nextafter(0.3, 1.0))) == std::nextafter(0.3, 1.0));
}
