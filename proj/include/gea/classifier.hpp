#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gea/matrix.hpp"
#include "gea/optim.hpp"

namespace gea {

enum class ClassifierKind { logreg, mlp };

struct ClassifierConfig {
    ClassifierKind kind = ClassifierKind::mlp;
    int hidden = 64;  // mlp only
    int epochs = 200;
    double lr = 0.01;
    OptKind optimizer = OptKind::adam;
    std::uint64_t seed = 1;
};

// Softmax classifier over dense feature rows: plain logistic regression or a
// one-hidden-layer relu network. Full-batch training, deterministic per seed.
struct Classifier {
    ClassifierKind kind = ClassifierKind::logreg;
    int n_classes = 0;
    int input_dim = 0;
    std::vector<Mat> weights;  // logreg: {W, b}; mlp: {W0, b0, W1, b1}
    std::vector<double> loss_history;
};

Classifier fit_classifier(const Mat& x, const std::vector<int>& y, int n_classes,
                          const ClassifierConfig& cfg);

Mat predict_proba(const Classifier& c, const Mat& x);

std::vector<int> predict_class(const Classifier& c, const Mat& x);

std::string classifier_kind_name(ClassifierKind k);
ClassifierKind classifier_kind_from_name(const std::string& s);

}  // namespace gea
