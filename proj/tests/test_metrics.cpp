#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "gea/metrics.hpp"
#include "gea/rng.hpp"

using gea::advantage;
using gea::average_precision;
using gea::f1_macro;
using gea::roc_auc;

namespace {

// exhaustive pair-counting oracle: (wins + 0.5 * ties) / (P * N)
double auc_pair_oracle(const std::vector<double>& scores, const std::vector<int>& labels) {
    double wins = 0.0, ties = 0.0;
    long pairs = 0;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] == 0) continue;
        for (size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) ties += 1.0;
        }
    }
    return (wins + 0.5 * ties) / static_cast<double>(pairs);
}

// hand-stepped definition: walk items in descending-score stable order and
// average precision at each positive
double ap_stepped_oracle(const std::vector<double>& scores, const std::vector<int>& labels) {
    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return scores[a] > scores[b]; });
    double ap = 0.0;
    long tp = 0, pos = 0;
    for (int y : labels) pos += (y != 0);
    for (size_t r = 0; r < order.size(); ++r) {
        if (labels[order[r]] != 0) {
            ++tp;
            ap += static_cast<double>(tp) / static_cast<double>(r + 1);
        }
    }
    return ap / static_cast<double>(pos);
}

}  // namespace

TEST_CASE("advantage formula") {
    CHECK(advantage(0.5) == 0.0);
    CHECK(advantage(1.0) == 1.0);
    CHECK(advantage(0.7828) == doctest::Approx(0.5656).epsilon(1e-12));
    // antisymmetry around 0.5
    gea::Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        const double x = 0.5 * rng.uniform();
        CHECK(advantage(0.5 + x) == doctest::Approx(-advantage(0.5 - x)).epsilon(1e-12));
    }
}

TEST_CASE("roc_auc basics") {
    CHECK(roc_auc({0.1, 0.2, 0.8, 0.9}, {0, 0, 1, 1}) == 1.0);
    // 3 of 4 pairs correctly ordered
    CHECK(roc_auc({0.1, 0.4, 0.35, 0.8}, {0, 0, 1, 1}) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK_THROWS_AS(roc_auc({0.5, 0.6}, {1, 1}), std::invalid_argument);
}

TEST_CASE("roc_auc on random labels is near 0.5") {
    gea::Rng rng(2);
    const int n = 1000;
    std::vector<double> scores(static_cast<size_t>(n));
    std::vector<int> labels(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        scores[static_cast<size_t>(i)] = rng.uniform();
        labels[static_cast<size_t>(i)] = rng.bernoulli(0.5) ? 1 : 0;
    }
    if (std::count(labels.begin(), labels.end(), 1) == 0) labels[0] = 1;
    if (std::count(labels.begin(), labels.end(), 0) == 0) labels[0] = 0;
    CHECK(std::abs(roc_auc(scores, labels) - 0.5) < 0.05);
}

TEST_CASE("average_precision basics") {
    CHECK(average_precision({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == 1.0);
    // single positive ranked 3rd of 4
    CHECK(average_precision({0.9, 0.8, 0.7, 0.6}, {0, 0, 1, 0}) ==
          doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(average_precision({0.9, 0.8, 0.7, 0.6}, {1, 0, 1, 0}) ==
          doctest::Approx((1.0 + 2.0 / 3) / 2).epsilon(1e-12));
    CHECK_THROWS_AS(average_precision({0.5}, {0}), std::invalid_argument);
}

TEST_CASE("auc and ap equal their oracles on 100 random instances") {
    gea::Rng rng(42);
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 2 + static_cast<int>(rng.uniform_int(49));
        std::vector<double> scores(static_cast<size_t>(n));
        std::vector<int> labels(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            // quantized scores force tie handling
            scores[static_cast<size_t>(i)] = std::round(rng.uniform() * 8.0) / 8.0;
            labels[static_cast<size_t>(i)] = rng.bernoulli(0.4) ? 1 : 0;
        }
        labels[0] = 1;
        if (std::count(labels.begin(), labels.end(), 0) == 0)
            labels[static_cast<size_t>(n - 1)] = 0;
        CHECK(std::abs(roc_auc(scores, labels) - auc_pair_oracle(scores, labels)) < 1e-12);
        CHECK(std::abs(average_precision(scores, labels) - ap_stepped_oracle(scores, labels)) <
              1e-12);
    }
}

TEST_CASE("roc_auc invariant under strictly monotone transforms") {
    gea::Rng rng(7);
    const int n = 200;
    std::vector<double> scores(static_cast<size_t>(n));
    std::vector<int> labels(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        scores[static_cast<size_t>(i)] = 2.0 * rng.uniform() - 1.0;
        labels[static_cast<size_t>(i)] = rng.bernoulli(0.5) ? 1 : 0;
    }
    labels[0] = 1;
    labels[1] = 0;
    std::vector<double> cubed = scores;
    for (double& s : cubed) s = s * s * s;
    CHECK(roc_auc(scores, labels) == doctest::Approx(roc_auc(cubed, labels)).epsilon(1e-12));
}

TEST_CASE("f1_macro") {
    CHECK(f1_macro({0, 1, 2, 1}, {0, 1, 2, 1}, 3) == 1.0);
    // all predicted class 0 on balanced binary labels
    CHECK(f1_macro({0, 0, 0, 0}, {0, 0, 1, 1}, 2) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(f1_macro({1, 0}, {0, 1}, 2) == 0.0);
}

TEST_CASE("f1_macro invariant under consistent class relabeling") {
    gea::Rng rng(9);
    constexpr int n = 120, k = 4;
    std::vector<int> pred(n), label(n);
    for (int i = 0; i < n; ++i) {
        pred[static_cast<size_t>(i)] = static_cast<int>(rng.uniform_int(k));
        label[static_cast<size_t>(i)] = static_cast<int>(rng.uniform_int(k));
    }
    const int perm[k] = {2, 0, 3, 1};
    std::vector<int> pred2(n), label2(n);
    for (int i = 0; i < n; ++i) {
        pred2[static_cast<size_t>(i)] = perm[pred[static_cast<size_t>(i)]];
        label2[static_cast<size_t>(i)] = perm[label[static_cast<size_t>(i)]];
    }
    CHECK(f1_macro(pred, label, k) == doctest::Approx(f1_macro(pred2, label2, k)).epsilon(1e-12));
}

TEST_CASE("binary_metrics bundles accuracy and both advantage readings") {
    const auto b = gea::binary_metrics({1, 1, 0, 0}, {1, 0, 0, 1});
    CHECK(b.accuracy == 0.5);
    CHECK(b.advantage == 0.0);
    CHECK(b.accuracy_above_chance == 0.0);
    CHECK(b.support_positive == 2);
    CHECK(b.support_negative == 2);
    const auto j = b.to_json();
    CHECK(j["accuracy"] == 0.5);
}
