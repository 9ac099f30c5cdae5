#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gea/graph.hpp"
#include "gea/matrix.hpp"
#include "gea/metrics.hpp"

namespace gea {

enum class DecoderMode { inner_product, bilinear };
enum class ReconLoss { weighted_bce, squared };

struct GaeConfig {
    int hidden = 32;
    int emb_dim = 16;
    int epochs = 200;
    double lr = 0.01;
    DecoderMode decoder = DecoderMode::inner_product;
    ReconLoss loss = ReconLoss::weighted_bce;
    int history_stride = 10;  // record aux AUC/AP every k epochs
    std::uint64_t seed = 1;
};

// Encoder: 2-layer GCN over the adversary's auxiliary graph. Decoder: edge
// score sigma(z_i . z_j), or sigma(z_i W_b z_j) with a symmetric learned W_b
// in bilinear mode. Inner product carries no decoder parameters.
struct GraphAutoencoder {
    GaeConfig config;
    std::vector<Mat> encoder_weights;  // W0, W1
    Mat bilinear;                      // emb_dim x emb_dim, symmetric; empty for inner_product
    std::vector<double> history_auc;   // on aux train pairs
    std::vector<double> history_ap;
};

struct ThresholdPolicy {
    enum class Kind { fixed, density } kind = Kind::fixed;
    double fixed_tau = 0.5;
    double density = 0.0;  // assumed edge density when kind == density
};

struct ReconstructionResult {
    Mat scores;  // symmetric, zero diagonal, entries in [0,1]
    double tau = 0.5;
    Eigen::MatrixXi adjacency;  // binarized scores
    MetricBundle metrics;       // auc/ap over edge + sampled non-edge pairs
    MetricBundle link_metrics;  // accuracy/advantage of A_rec on balanced pairs
    bool has_metrics = false;
    std::uint64_t seed = 0;
    nlohmann::json params;

    nlohmann::json to_json() const;
};

// Trains encoder (+ bilinear decoder) on the aux adjacency. Loss defaults to
// edge-weighted binary cross entropy; the plain squared error ||A - A_rec||^2
// is selectable. Throws if aux has no edges.
GraphAutoencoder train_autoencoder(const Graph& aux, const GaeConfig& cfg);

// Embeddings of the autoencoder's own encoder on a graph the adversary holds.
Mat encode_graph(const GraphAutoencoder& ae, const Graph& g);

// S = sigma(Z Z^T) or sigma(Z W_b Z^T); diagonal forced to zero.
Mat decode_adjacency(const GraphAutoencoder& ae, const Mat& z);

// Scores + binarization; when ground truth is supplied, AUC/AP are computed on
// all true edges plus an equal number of uniformly sampled non-edges, and
// link-inference accuracy on the balanced pair set.
ReconstructionResult reconstruct_target(const GraphAutoencoder& ae, const Mat& target_embeddings,
                                        const ThresholdPolicy& policy,
                                        const Graph* ground_truth = nullptr,
                                        std::uint64_t seed = 1);

// A_rec[i][j]; throws when i == j or out of range.
int infer_link(const ReconstructionResult& r, int i, int j);

std::string decoder_name(DecoderMode m);
DecoderMode decoder_from_name(const std::string& s);

}  // namespace gea
