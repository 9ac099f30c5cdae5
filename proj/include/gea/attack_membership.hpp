#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gea/attack_result.hpp"
#include "gea/classifier.hpp"
#include "gea/gnn.hpp"
#include "gea/graph.hpp"
#include "gea/kmeans.hpp"
#include "gea/matrix.hpp"

namespace gea {

// Opaque blackbox prediction surface: node ids -> softmax probability rows.
using PredictOracle = std::function<Mat(const std::vector<int>&)>;

// Each row of a blackbox attack feature matrix is a prediction vector sorted
// descending, which makes the attack invariant to class permutations.
Mat sorted_prediction_features(const Mat& probs);

struct ShadowAttackConfig {
    GnnConfig shadow_model;          // trained on half of aux
    ClassifierConfig attack_model;   // binary member/non-member classifier
    double shadow_split = 0.5;
    std::uint64_t seed = 1;
};

// Supervised blackbox attack: train a substitute model on disjoint auxiliary
// data, label its own train/out prediction vectors as member/non-member,
// fit a binary classifier, then score the target's predictions.
AttackResult shadow_attack(const PredictOracle& target_predict, const Graph& aux,
                           const ShadowAttackConfig& cfg, const MembershipEval& eval);

// Unsupervised blackbox attack: a node is called a member when its highest
// prediction confidence clears a threshold. Without a fixed threshold the
// full curve over {0.00, 0.01, ..., 1.00} is swept and the best accuracy is
// reported along with the curve.
AttackResult confidence_attack(const Mat& prediction_vectors, const std::vector<int>& membership,
                               std::optional<double> threshold, std::uint64_t seed);

struct WhiteboxAttackConfig {
    int hidden = 16;   // autoencoder hidden width per side
    int epochs = 200;
    double lr = 0.01;
    std::uint64_t seed = 1;
};

// Unsupervised whitebox attack: an autoencoder with a scalar bottleneck is
// fit to the released embeddings, the codes are clustered with 2-means, and
// a handful of labeled anchor nodes name the member cluster. Anchors are
// excluded from the reported metrics.
AttackResult whitebox_attack(const Mat& embeddings, const std::vector<int>& anchor_indices,
                             const std::vector<int>& anchor_bits, const std::vector<int>& truth,
                             const WhiteboxAttackConfig& cfg);

// Scalar reconstruction codes of the whitebox autoencoder (exposed for tests).
Vec autoencoder_codes(const Mat& embeddings, const WhiteboxAttackConfig& cfg);

}  // namespace gea
