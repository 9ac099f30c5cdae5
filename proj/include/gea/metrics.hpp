#pragma once

#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace gea {

// I_adv = 2*(I_acc - 0.5): zero for a random guess, one for a perfect attack.
double advantage(double accuracy);

// Rank-based (Mann-Whitney) AUC; tied scores contribute 0.5 per pair.
// Throws if either class is absent.
double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Sum over recall steps of precision at each positive, scores descending,
// ties broken by stable input order. Throws if there are no positives.
double average_precision(const std::vector<double>& scores, const std::vector<int>& labels);

// Unweighted mean over classes of 2PR/(P+R); a class with no support and no
// predictions counts as 0.
double f1_macro(const std::vector<int>& predictions, const std::vector<int>& labels, int k_classes);

struct MetricBundle {
    double accuracy = 0.0;
    double advantage = 0.0;             // 2*(accuracy - 0.5)
    double accuracy_above_chance = 0.0; // accuracy - 0.5 (the paper prose sometimes means this)
    std::optional<double> auc;
    std::optional<double> ap;
    std::optional<double> f1;
    int support_positive = 0;
    int support_negative = 0;

    nlohmann::json to_json() const;
};

MetricBundle binary_metrics(const std::vector<int>& decisions, const std::vector<int>& truth);

}  // namespace gea
