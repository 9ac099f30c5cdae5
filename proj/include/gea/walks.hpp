#pragma once

#include <cstdint>
#include <vector>

#include "gea/embedding.hpp"
#include "gea/graph.hpp"
#include "gea/rng.hpp"

namespace gea {

struct WalkConfig {
    int walks_per_node = 10;
    int walk_length = 80;
    int window = 10;
    int dim = 128;
    int negatives = 5;
    int epochs = 5;
    double p = 1.0;  // return parameter; p = q = 1 is DeepWalk
    double q = 1.0;  // in-out parameter
    double lr = 0.025;
    bool normalize = false;  // row-L2 normalization of the released matrix
    std::uint64_t seed = 1;

    void validate() const;
};

// Second-order transition step: unnormalized weight 1/p back to prev, 1 to a
// neighbor of prev, 1/q to a node two hops from prev. prev = -1 makes the
// step uniform. Returns -1 at a dead end.
int next_step(const std::vector<std::vector<int>>& adj, int prev, int cur, double p, double q,
              Rng& rng);

// walks_per_node walks from every non-isolated node; each walk uses its own
// derived stream (seed, node, walk index), so results do not depend on
// scheduling order.
std::vector<std::vector<int>> sample_walks(const Graph& g, const WalkConfig& cfg);

struct SkipgramResult {
    EmbeddingMatrix embeddings;
    std::vector<double> epoch_loss;  // mean negative log likelihood per epoch
};

// SkipGram with negative sampling over (target, context) pairs within the
// window; negatives drawn proportional to frequency^0.75. Returns the
// target-side vectors, one row per node of the source graph.
SkipgramResult train_skipgram(const std::vector<std::vector<int>>& walks, int n_nodes,
                              const WalkConfig& cfg);

// sample_walks + train_skipgram
SkipgramResult train_walk_embeddings(const Graph& g, const WalkConfig& cfg);

}  // namespace gea
