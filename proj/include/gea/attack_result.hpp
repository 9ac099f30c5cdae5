#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gea/graph.hpp"
#include "gea/metrics.hpp"

namespace gea {

// Per-node scores, binary decisions and the metric bundle of one attack run.
// The evaluation set is always membership-balanced so 0.5 is the honest
// random-guess baseline; advantage == 2*(accuracy - 0.5) by construction.
struct AttackResult {
    std::string attack;
    std::vector<int> eval_nodes;
    std::vector<double> scores;
    std::vector<int> decisions;
    std::vector<int> truth;
    MetricBundle metrics;
    double threshold = 0.0;
    bool has_threshold = false;
    std::vector<std::pair<double, double>> threshold_curve;  // (threshold, accuracy)
    std::uint64_t seed = 0;
    nlohmann::json params;

    nlohmann::json to_json() const;
};

// Balanced member/non-member evaluation set: members are train-mask nodes,
// non-members drawn uniformly from test-mask nodes; the larger side is
// subsampled to match the smaller.
struct MembershipEval {
    std::vector<int> node_ids;
    std::vector<int> truth;  // 1 = member of the training graph
};

MembershipEval balanced_membership_eval(const Graph& g, std::uint64_t seed);

}  // namespace gea
