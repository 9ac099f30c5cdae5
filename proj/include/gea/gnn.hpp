#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gea/embedding.hpp"
#include "gea/graph.hpp"
#include "gea/matrix.hpp"
#include "gea/optim.hpp"

namespace gea {

enum class GnnArch { gcn, sage };

struct GnnConfig {
    GnnArch arch = GnnArch::gcn;
    int num_layers = 2;
    std::vector<int> hidden_dims = {16};  // one entry is replicated to num_layers-1
    int embedding_layer = 1;              // which activation counts as "the embedding"
    double dropout = 0.0;                 // hidden activations, training only
    int epochs = 200;
    double lr = 0.01;
    OptKind optimizer = OptKind::adam;
    std::uint64_t seed = 1;

    std::vector<int> layer_widths(int input_dim, int n_classes) const;  // [D, h..., C]
    void validate() const;
};

struct EpochStats {
    double loss = 0.0;
    double train_acc = 0.0;
    double test_acc = 0.0;  // NaN when the graph has no test mask
};

// A stack of graph-convolution layers plus softmax head; the audited model.
struct NodeClassifier {
    GnnConfig config;
    int input_dim = 0;
    int n_classes = 0;
    std::vector<Mat> weights;
    std::vector<EpochStats> history;

    double final_train_acc() const { return history.empty() ? 0.0 : history.back().train_acc; }
    double final_test_acc() const { return history.empty() ? 0.0 : history.back().test_acc; }
    double generalization_gap() const { return final_train_acc() - final_test_acc(); }
};

// Forward passes return every activation H^(0)=X .. H^(L)=Z (logits).
// GCN: H^(l+1) = relu(norm_adj * H^(l) * W_l), relu omitted on the last layer.
std::vector<Mat> gcn_forward(const std::vector<Mat>& weights, const Mat& norm_adj, const Mat& X);

// GraphSAGE (mean aggregator): H^(l+1) = relu([H^(l) | M H^(l)] W_l) with M the
// neighbor-mean operator; isolated nodes aggregate a zero vector.
std::vector<Mat> sage_forward(const std::vector<Mat>& weights, const Mat& neighbor_mean, const Mat& X);

// Row-normalized adjacency without self-loops; zero rows for isolated nodes.
Mat neighbor_mean_operator(const Graph& g);

// Inductive training: only the node-induced subgraph on the train mask is seen
// by the optimizer. Per-epoch history holds loss plus train/test accuracy.
NodeClassifier train_classifier(const Graph& g, const GnnConfig& cfg);

// Blackbox surface: softmax probability rows for the requested nodes, computed
// from the node's features and neighborhood inside g.
Mat predict(const NodeClassifier& model, const Graph& g, const std::vector<int>& node_ids);

// Whitebox surface: activation rows of the requested layer (1 <= layer < L).
EmbeddingMatrix extract_embeddings(const NodeClassifier& model, const Graph& g, int layer_index);

// Flat text checkpoint: config keys, then shapes + row-major weights at full
// precision (bit-exact round trip).
void save_checkpoint(const NodeClassifier& model, const std::string& path);
NodeClassifier load_checkpoint(const std::string& path);

std::string arch_name(GnnArch a);
GnnArch arch_from_name(const std::string& s);

}  // namespace gea
