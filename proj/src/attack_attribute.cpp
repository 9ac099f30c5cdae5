#include "gea/attack_attribute.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "gea/metrics.hpp"

namespace gea {

AttributeAttackModel train_attribute_attack(const Mat& aux_rows, const std::vector<int>& aux_attrs,
                                            int n_attr_classes, const ClassifierConfig& cfg) {
    if (aux_rows.rows() == 0) throw std::invalid_argument("train_attribute_attack: empty aux set");
    if (static_cast<size_t>(aux_rows.rows()) != aux_attrs.size())
        throw std::invalid_argument("train_attribute_attack: rows/attrs length mismatch");
    std::set<int> present(aux_attrs.begin(), aux_attrs.end());
    if (present.size() < 2)
        throw std::invalid_argument(
            "train_attribute_attack: aux set carries a single attribute category");

    AttributeAttackModel model;
    model.n_attr_classes = n_attr_classes;
    model.classifier = fit_classifier(aux_rows, aux_attrs, n_attr_classes, cfg);
    return model;
}

AttributeInference infer_attributes(const AttributeAttackModel& model, const Mat& target_rows,
                                    const std::vector<int>* ground_truth) {
    if (static_cast<int>(target_rows.cols()) != model.classifier.input_dim)
        throw std::invalid_argument("infer_attributes: embedding dim " +
                                    std::to_string(target_rows.cols()) + " does not match model (" +
                                    std::to_string(model.classifier.input_dim) + ")");
    AttributeInference out;
    out.predicted = predict_class(model.classifier, target_rows);
    if (ground_truth) {
        if (ground_truth->size() != out.predicted.size())
            throw std::invalid_argument("infer_attributes: ground truth length mismatch");
        out.f1 = f1_macro(out.predicted, *ground_truth, model.n_attr_classes);
        out.has_f1 = true;
    }
    return out;
}

double majority_baseline_f1(const std::vector<int>& labels, int n_classes) {
    if (labels.empty()) throw std::invalid_argument("majority_baseline_f1: empty labels");
    std::vector<long> counts(static_cast<size_t>(n_classes), 0);
    for (int y : labels) ++counts[static_cast<size_t>(y)];
    const int majority = static_cast<int>(
        std::max_element(counts.begin(), counts.end()) - counts.begin());
    const std::vector<int> pred(labels.size(), majority);
    return f1_macro(pred, labels, n_classes);
}

nlohmann::json AttributeInference::to_json() const {
    nlohmann::json j;
    j["attack"] = "attribute";
    if (has_f1) j["f1_macro"] = f1;
    j["predictions"] = static_cast<int>(predicted.size());
    return j;
}

}  // namespace gea
