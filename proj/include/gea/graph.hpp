#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gea/matrix.hpp"

namespace gea {

// Undirected graph with dense node features, optional class labels,
// optional sensitive attributes and train/val/test masks.
//
// Edges are stored as pairs (i, j) with i < j, sorted and deduplicated.
// Label/attribute value -1 means "not present for this node".
struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    Mat features;               // n x D
    std::vector<int> labels;    // size n or empty
    std::vector<int> attrs;     // size n or empty
    std::vector<char> train_mask, val_mask, test_mask;  // size n or empty
    int n_classes = 0;          // fixed at construction; inherited by subgraphs
    int n_attr_classes = 0;

    int feature_dim() const { return static_cast<int>(features.cols()); }
    long edge_count() const { return static_cast<long>(edges.size()); }

    std::vector<int> mask_nodes(const std::vector<char>& mask) const;
    std::vector<int> train_nodes() const { return mask_nodes(train_mask); }
    std::vector<int> val_nodes() const { return mask_nodes(val_mask); }
    std::vector<int> test_nodes() const { return mask_nodes(test_mask); }

    // sorted neighbor lists
    std::vector<std::vector<int>> adjacency_list() const;

    void validate() const;  // throws on violated invariants
};

enum class NormMode { sym, rw };

struct NormalizedAdjacency {
    NormMode mode;
    Mat m;  // n x n dense
};

// Deduplicates edges, drops self-loops, orients pairs i < j.
std::vector<std::pair<int, int>> canonical_edges(std::vector<std::pair<int, int>> edges);

// Ahat = A + I; sym: Ahat_ij / sqrt(d_i d_j), rw: Ahat_ij / d_i where d is the
// degree of Ahat. Isolated nodes keep only their self-loop weight.
NormalizedAdjacency normalize_adjacency(const Graph& g, NormMode mode);

// --- ingestion ---------------------------------------------------------

// edges file: one "src dst" integer pair per line ('#' comments allowed);
// features: CSV, one row per node (node id = row index, n = row count);
// labels/attributes: "node,value" CSV lines.
Graph load_graph(const std::string& edges_path, const std::string& features_path,
                 const std::string& labels_path = "", const std::string& attrs_path = "");

void save_graph(const Graph& g, const std::string& edges_path, const std::string& features_path,
                const std::string& labels_path = "", const std::string& attrs_path = "");

// --- sampling ----------------------------------------------------------

// Node-induced subgraph on the given original node ids (must be sorted and
// unique); masks/labels/attrs are carried over, class counts inherited.
Graph induced_subgraph(const Graph& g, const std::vector<int>& sorted_ids);

struct SplitResult {
    Graph a, b;
    std::vector<int> a_ids, b_ids;  // original node ids, ascending
};

// Random node partition into induced subgraphs; side a receives
// round(fraction * n) nodes. Same seed, same partition.
SplitResult split_disjoint(const Graph& g, double fraction, std::uint64_t seed);

// Samples disjoint train/val/test masks uniformly over labeled nodes.
Graph make_inductive_masks(Graph g, int n_train, int n_val, int n_test, std::uint64_t seed);

// Seeded induced subsample of at most max_nodes nodes (no-op when the graph
// is already small enough).
Graph subsample(const Graph& g, int max_nodes, std::uint64_t seed);

// --- synthetic graphs ---------------------------------------------------

struct SbmConfig {
    std::vector<int> block_sizes;
    double p_intra = 0.2;
    double p_inter = 0.01;
    int feature_dim = 8;
    double class_signal = 1.0;       // scale of the one-hot block signal added to unit noise
    double attr_correlation = 0.0;   // in [0,1]; 0 = attribute independent of block
    std::uint64_t seed = 1;
};

// Stochastic block model: labels = block id, features = class_signal * onehot(block)
// + N(0,1) noise, binary sensitive attribute = block parity flipped with
// probability (1 - attr_correlation)/2.
Graph generate_sbm(const SbmConfig& cfg);

}  // namespace gea
