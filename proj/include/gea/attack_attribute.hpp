#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "gea/classifier.hpp"
#include "gea/matrix.hpp"

namespace gea {

// Supervised attribute inference: the adversary holds (embedding, attribute)
// pairs for an auxiliary node set and predicts the hidden attribute of every
// target node from its released embedding.

struct AttributeAttackModel {
    Classifier classifier;
    int n_attr_classes = 0;
};

// Trains on aux rows only; throws when aux carries fewer than two attribute
// categories.
AttributeAttackModel train_attribute_attack(const Mat& aux_rows, const std::vector<int>& aux_attrs,
                                            int n_attr_classes, const ClassifierConfig& cfg);

struct AttributeInference {
    std::vector<int> predicted;
    double f1 = 0.0;       // macro-F1 against ground truth
    bool has_f1 = false;
    nlohmann::json to_json() const;
};

AttributeInference infer_attributes(const AttributeAttackModel& model, const Mat& target_rows,
                                    const std::vector<int>* ground_truth = nullptr);

// Macro-F1 of always predicting the majority class of `labels`.
double majority_baseline_f1(const std::vector<int>& labels, int n_classes);

}  // namespace gea
