#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "gea/graph.hpp"
#include "gea/rng.hpp"

using gea::Graph;
using gea::Mat;

namespace {

std::string tmpdir() {
    static const std::string dir = [] {
        auto d = std::filesystem::temp_directory_path() / "gea_graph_test";
        std::filesystem::create_directories(d);
        return d.string();
    }();
    return dir;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

// largest |eigenvalue| by power iteration with a fixed start vector
double spectral_radius(const Mat& m, int iters = 200) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m.rows());
    v.normalize();
    double lambda = 0.0;
    for (int i = 0; i < iters; ++i) {
        Eigen::VectorXd w = m * v;
        lambda = w.norm();
        if (lambda == 0.0) return 0.0;
        v = w / lambda;
    }
    return lambda;
}

}  // namespace

TEST_CASE("load_graph triangle") {
    const std::string e = tmpdir() + "/tri_edges.txt";
    const std::string f = tmpdir() + "/tri_feat.csv";
    write_file(e, "0 1\n1 2\n0 2\n");
    write_file(f, "1.0,0.0\n0.0,1.0\n0.5,0.5\n");
    const Graph g = gea::load_graph(e, f);
    CHECK(g.n == 3);
    CHECK(g.edge_count() == 3);
    CHECK(g.feature_dim() == 2);
}

TEST_CASE("load_graph deduplicates reversed edges and drops self-loops") {
    const std::string e = tmpdir() + "/dup_edges.txt";
    const std::string f = tmpdir() + "/dup_feat.csv";
    write_file(e, "0 1\n1 0\n1 1\n");
    write_file(f, "1\n2\n");
    const Graph g = gea::load_graph(e, f);
    CHECK(g.n == 2);
    CHECK(g.edge_count() == 1);
    CHECK(g.edges[0] == std::pair<int, int>{0, 1});
}

TEST_CASE("load_graph error paths") {
    const std::string dir = tmpdir();
    write_file(dir + "/bad_edges.txt", "0 5\n");
    write_file(dir + "/feat2.csv", "1\n2\n");
    CHECK_THROWS_WITH_AS(gea::load_graph(dir + "/bad_edges.txt", dir + "/feat2.csv"),
                         doctest::Contains("out of range"), std::runtime_error);

    write_file(dir + "/edges01.txt", "0 1\n");
    write_file(dir + "/ragged.csv", "1,2\n3\n");
    CHECK_THROWS_WITH_AS(gea::load_graph(dir + "/edges01.txt", dir + "/ragged.csv"),
                         doctest::Contains("ragged"), std::runtime_error);

    write_file(dir + "/dup_label.csv", "0,1\n0,2\n");
    CHECK_THROWS_WITH_AS(
        gea::load_graph(dir + "/edges01.txt", dir + "/feat2.csv", dir + "/dup_label.csv"),
        doctest::Contains("duplicate node"), std::runtime_error);
}

TEST_CASE("save then load round-trips bit-exactly") {
    gea::SbmConfig cfg;
    cfg.block_sizes = {20, 15};
    cfg.p_intra = 0.3;
    cfg.p_inter = 0.05;
    cfg.feature_dim = 5;
    cfg.class_signal = 1.7;
    cfg.attr_correlation = 0.8;
    cfg.seed = 99;
    const Graph g = gea::generate_sbm(cfg);

    const std::string dir = tmpdir();
    gea::save_graph(g, dir + "/rt_e.txt", dir + "/rt_f.csv", dir + "/rt_l.csv", dir + "/rt_a.csv");
    const Graph h =
        gea::load_graph(dir + "/rt_e.txt", dir + "/rt_f.csv", dir + "/rt_l.csv", dir + "/rt_a.csv");
    CHECK(h.n == g.n);
    CHECK(h.edges == g.edges);
    CHECK(h.labels == g.labels);
    CHECK(h.attrs == g.attrs);
    CHECK((h.features - g.features).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("normalize_adjacency sym on a single edge") {
    Graph g;
    g.n = 2;
    g.edges = {{0, 1}};
    g.features = Mat::Zero(2, 1);
    const auto norm = gea::normalize_adjacency(g, gea::NormMode::sym);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(norm.m(i, j) == 0.5);
}

TEST_CASE("normalize_adjacency isolated node keeps only its self-loop") {
    Graph g;
    g.n = 1;
    g.features = Mat::Zero(1, 1);
    CHECK(gea::normalize_adjacency(g, gea::NormMode::sym).m(0, 0) == 1.0);
    CHECK(gea::normalize_adjacency(g, gea::NormMode::rw).m(0, 0) == 1.0);
}

TEST_CASE("normalize_adjacency triangle is exactly all one-thirds") {
    Graph g;
    g.n = 3;
    g.edges = {{0, 1}, {0, 2}, {1, 2}};
    g.features = Mat::Zero(3, 1);
    const auto norm = gea::normalize_adjacency(g, gea::NormMode::sym);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(norm.m(i, j) == 1.0 / 3.0);
}

TEST_CASE("normalize_adjacency rw rows sum to one") {
    gea::SbmConfig cfg;
    cfg.block_sizes = {30, 30};
    cfg.seed = 5;
    const Graph g = gea::generate_sbm(cfg);
    const auto norm = gea::normalize_adjacency(g, gea::NormMode::rw);
    for (int i = 0; i < g.n; ++i) CHECK(std::abs(norm.m.row(i).sum() - 1.0) < 1e-9);
}

TEST_CASE("normalize_adjacency sym is symmetric with spectral radius <= 1") {
    gea::SbmConfig cfg;
    cfg.block_sizes = {40, 25};
    cfg.p_intra = 0.15;
    cfg.p_inter = 0.03;
    cfg.seed = 17;
    const Graph g = gea::generate_sbm(cfg);
    const auto norm = gea::normalize_adjacency(g, gea::NormMode::sym);
    CHECK((norm.m - norm.m.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(spectral_radius(norm.m) <= 1.0 + 1e-9);
}

TEST_CASE("split_disjoint partitions the node set") {
    gea::SbmConfig cfg;
    cfg.block_sizes = {5, 5};
    cfg.seed = 3;
    const Graph g = gea::generate_sbm(cfg);

    const auto s = gea::split_disjoint(g, 0.5, 77);
    CHECK(s.a.n == 5);
    CHECK(s.b.n == 5);
    std::set<int> all(s.a_ids.begin(), s.a_ids.end());
    all.insert(s.b_ids.begin(), s.b_ids.end());
    CHECK(all.size() == 10);

    // determinism
    const auto s2 = gea::split_disjoint(g, 0.5, 77);
    CHECK(s2.a_ids == s.a_ids);
    CHECK(s2.b_ids == s.b_ids);
    // a different seed moves nodes
    const auto s3 = gea::split_disjoint(g, 0.5, 78);
    CHECK(s3.a_ids != s.a_ids);

    CHECK_THROWS_AS(gea::split_disjoint(g, 0.01, 1), std::invalid_argument);
}

TEST_CASE("induced subgraph keeps only internal edges and remaps ids") {
    Graph g;
    g.n = 4;
    g.edges = {{0, 1}, {1, 2}, {2, 3}};
    g.features = Mat::Identity(4, 4);
    g.labels = {0, 1, 0, 1};
    g.n_classes = 2;
    const Graph s = gea::induced_subgraph(g, {1, 3});
    CHECK(s.n == 2);
    CHECK(s.edges.empty());
    CHECK(s.labels == std::vector<int>{1, 1});
    CHECK(s.n_classes == 2);
    CHECK(s.features(0, 1) == 1.0);
    CHECK(s.features(1, 3) == 1.0);
}

TEST_CASE("make_inductive_masks sizes and disjointness") {
    gea::SbmConfig cfg;
    cfg.block_sizes = {30, 30};
    cfg.seed = 8;
    Graph g = gea::generate_sbm(cfg);
    g = gea::make_inductive_masks(std::move(g), 10, 5, 20, 123);
    CHECK(g.train_nodes().size() == 10);
    CHECK(g.val_nodes().size() == 5);
    CHECK(g.test_nodes().size() == 20);
    g.validate();  // masks disjoint

    CHECK_THROWS_AS(gea::make_inductive_masks(g, 50, 20, 20, 1), std::invalid_argument);
}

TEST_CASE("generate_sbm edge counts concentrate around expectation") {
    gea::SbmConfig cfg;
    cfg.block_sizes = {50, 50};
    cfg.p_intra = 0.2;
    cfg.p_inter = 0.01;
    cfg.seed = 21;
    const Graph g = gea::generate_sbm(cfg);

    long intra = 0, inter = 0;
    for (auto [i, j] : g.edges)
        (g.labels[static_cast<size_t>(i)] == g.labels[static_cast<size_t>(j)] ? intra : inter)++;

    // expectation p * pairs, assert within 4 sigma of the binomial
    const double intra_pairs = 2 * (50.0 * 49.0 / 2);
    const double inter_pairs = 50.0 * 50.0;
    const double mu_intra = cfg.p_intra * intra_pairs;
    const double sd_intra = std::sqrt(intra_pairs * cfg.p_intra * (1 - cfg.p_intra));
    const double mu_inter = cfg.p_inter * inter_pairs;
    const double sd_inter = std::sqrt(inter_pairs * cfg.p_inter * (1 - cfg.p_inter));
    CHECK(std::abs(intra - mu_intra) < 4 * sd_intra);
    CHECK(std::abs(inter - mu_inter) < 4 * sd_inter);
}

TEST_CASE("generate_sbm with p_inter zero has no cross-block edges") {
    gea::SbmConfig cfg;
    cfg.block_sizes = {20, 20};
    cfg.p_intra = 0.3;
    cfg.p_inter = 0.0;
    cfg.seed = 4;
    const Graph g = gea::generate_sbm(cfg);
    for (auto [i, j] : g.edges)
        CHECK(g.labels[static_cast<size_t>(i)] == g.labels[static_cast<size_t>(j)]);
}

TEST_CASE("generate_sbm rejects empty blocks") {
    gea::SbmConfig cfg;
    cfg.block_sizes = {10, 0};
    CHECK_THROWS_AS(gea::generate_sbm(cfg), std::invalid_argument);
}

TEST_CASE("generate_sbm attribute correlation") {
    gea::SbmConfig cfg;
    cfg.block_sizes = {200, 200};
    cfg.attr_correlation = 1.0;
    cfg.seed = 6;
    const Graph g = gea::generate_sbm(cfg);
    for (int i = 0; i < g.n; ++i)
        CHECK(g.attrs[static_cast<size_t>(i)] == g.labels[static_cast<size_t>(i)] % 2);

    cfg.attr_correlation = 0.0;
    const Graph h = gea::generate_sbm(cfg);
    long agree = 0;
    for (int i = 0; i < h.n; ++i)
        agree += h.attrs[static_cast<size_t>(i)] == h.labels[static_cast<size_t>(i)] % 2;
    // independent coin: agreement near half
    CHECK(std::abs(agree / static_cast<double>(h.n) - 0.5) < 0.15);
}

TEST_CASE("subsample caps node count deterministically") {
    gea::SbmConfig cfg;
    cfg.block_sizes = {40, 40};
    cfg.seed = 10;
    const Graph g = gea::generate_sbm(cfg);
    const Graph s1 = gea::subsample(g, 30, 55);
    const Graph s2 = gea::subsample(g, 30, 55);
    CHECK(s1.n == 30);
    CHECK(s1.edges == s2.edges);
    CHECK(gea::subsample(g, 200, 1).n == g.n);
}
