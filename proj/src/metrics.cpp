#include "gea/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace gea {

double advantage(double accuracy) { return 2.0 * (accuracy - 0.5); }

double roc_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("roc_auc: scores/labels length mismatch");
    const size_t n = scores.size();
    size_t pos = 0;
    for (int y : labels) pos += (y != 0);
    const size_t neg = n - pos;
    if (pos == 0 || neg == 0) throw std::invalid_argument("roc_auc: both classes must be present");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    // midranks over tie groups
    double rank_sum_pos = 0.0;
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // average of ranks i+1..j
        for (size_t k = i; k < j; ++k)
            if (labels[order[k]] != 0) rank_sum_pos += midrank;
        i = j;
    }
    const double p = static_cast<double>(pos), q = static_cast<double>(neg);
    return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * q);
}

double average_precision(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("average_precision: scores/labels length mismatch");
    const size_t n = scores.size();
    size_t pos = 0;
    for (int y : labels) pos += (y != 0);
    if (pos == 0) throw std::invalid_argument("average_precision: no positives");

    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return scores[a] > scores[b]; });

    double ap = 0.0;
    size_t tp = 0;
    for (size_t r = 0; r < n; ++r) {
        if (labels[order[r]] != 0) {
            ++tp;
            ap += static_cast<double>(tp) / static_cast<double>(r + 1);
        }
    }
    return ap / static_cast<double>(pos);
}

double f1_macro(const std::vector<int>& predictions, const std::vector<int>& labels, int k_classes) {
    if (predictions.size() != labels.size())
        throw std::invalid_argument("f1_macro: predictions/labels length mismatch");
    if (k_classes < 2) throw std::invalid_argument("f1_macro: k_classes must be >= 2");
    std::vector<long> tp(k_classes, 0), fp(k_classes, 0), fn(k_classes, 0);
    for (size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i], p = predictions[i];
        if (y < 0 || y >= k_classes || p < 0 || p >= k_classes)
            throw std::invalid_argument("f1_macro: class id out of range");
        if (p == y) {
            ++tp[y];
        } else {
            ++fp[p];
            ++fn[y];
        }
    }
    double total = 0.0;
    for (int c = 0; c < k_classes; ++c) {
        const double denom = 2.0 * tp[c] + fp[c] + fn[c];
        total += denom > 0.0 ? 2.0 * tp[c] / denom : 0.0;
    }
    return total / k_classes;
}

MetricBundle binary_metrics(const std::vector<int>& decisions, const std::vector<int>& truth) {
    if (decisions.size() != truth.size() || decisions.empty())
        throw std::invalid_argument("binary_metrics: decisions/truth must be nonempty and equal length");
    MetricBundle b;
    size_t correct = 0;
    for (size_t i = 0; i < truth.size(); ++i) {
        correct += (decisions[i] != 0) == (truth[i] != 0);
        if (truth[i] != 0)
            ++b.support_positive;
        else
            ++b.support_negative;
    }
    b.accuracy = static_cast<double>(correct) / static_cast<double>(truth.size());
    b.advantage = advantage(b.accuracy);
    b.accuracy_above_chance = b.accuracy - 0.5;
    return b;
}

nlohmann::json MetricBundle::to_json() const {
    nlohmann::json j{{"accuracy", accuracy},
                     {"advantage", advantage},
                     {"accuracy_above_chance", accuracy_above_chance},
                     {"support_positive", support_positive},
                     {"support_negative", support_negative}};
    if (auc) j["auc"] = *auc;
    if (ap) j["average_precision"] = *ap;
    if (f1) j["f1_macro"] = *f1;
    return j;
}

}  // namespace gea
