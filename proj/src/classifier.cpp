#include "gea/classifier.hpp"

#include <stdexcept>

#include "gea/autodiff.hpp"
#include "gea/rng.hpp"

namespace gea {

std::string classifier_kind_name(ClassifierKind k) {
    return k == ClassifierKind::logreg ? "logreg" : "mlp";
}

ClassifierKind classifier_kind_from_name(const std::string& s) {
    if (s == "logreg") return ClassifierKind::logreg;
    if (s == "mlp") return ClassifierKind::mlp;
    throw std::invalid_argument("unknown classifier kind: " + s);
}

namespace {

ad::Var classifier_logits(ad::TapeD& t, const Classifier& c, const std::vector<ad::Var>& ws,
                          ad::Var x) {
    if (c.kind == ClassifierKind::logreg)
        return t.add_row_broadcast(t.matmul(x, ws[0]), ws[1]);
    ad::Var h = t.relu(t.add_row_broadcast(t.matmul(x, ws[0]), ws[1]));
    return t.add_row_broadcast(t.matmul(h, ws[2]), ws[3]);
}

}  // namespace

Classifier fit_classifier(const Mat& x, const std::vector<int>& y, int n_classes,
                          const ClassifierConfig& cfg) {
    if (x.rows() == 0) throw std::invalid_argument("fit_classifier: empty input");
    if (static_cast<size_t>(x.rows()) != y.size())
        throw std::invalid_argument("fit_classifier: row/label count mismatch");
    if (n_classes < 2) throw std::invalid_argument("fit_classifier: need at least 2 classes");
    for (int v : y)
        if (v < 0 || v >= n_classes)
            throw std::invalid_argument("fit_classifier: label out of range");

    Classifier c;
    c.kind = cfg.kind;
    c.n_classes = n_classes;
    c.input_dim = static_cast<int>(x.cols());

    Rng init = derived_rng(cfg.seed, "classifier-init");
    if (cfg.kind == ClassifierKind::logreg) {
        c.weights = {glorot_uniform(x.cols(), n_classes, init), Mat::Zero(1, n_classes)};
    } else {
        c.weights = {glorot_uniform(x.cols(), cfg.hidden, init), Mat::Zero(1, cfg.hidden),
                     glorot_uniform(cfg.hidden, n_classes, init), Mat::Zero(1, n_classes)};
    }

    Mat onehot = Mat::Zero(x.rows(), n_classes);
    for (Eigen::Index i = 0; i < x.rows(); ++i) onehot(i, y[static_cast<size_t>(i)]) = 1.0;

    OptimizerD opt(cfg.optimizer, cfg.lr);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        ad::TapeD t;
        std::vector<ad::Var> ws;
        for (const auto& w : c.weights) ws.push_back(t.leaf(w));
        ad::Var probs = t.softmax_rows(classifier_logits(t, c, ws, t.leaf(x)));
        ad::Var picked = t.mul(t.leaf(onehot), t.log(t.add_scalar(probs, 1e-12)));
        ad::Var loss = t.scale(t.sum(picked), -1.0 / static_cast<double>(x.rows()));
        t.backward(loss);

        std::vector<Mat*> params;
        std::vector<const Mat*> grads;
        for (size_t i = 0; i < c.weights.size(); ++i) {
            params.push_back(&c.weights[i]);
            grads.push_back(&t.grad(ws[i]));
        }
        opt.step(params, grads);
        c.loss_history.push_back(t.value(loss)(0, 0));
    }
    return c;
}

Mat predict_proba(const Classifier& c, const Mat& x) {
    if (static_cast<int>(x.cols()) != c.input_dim)
        throw std::invalid_argument("predict_proba: input dim " + std::to_string(x.cols()) +
                                    " does not match model dim " + std::to_string(c.input_dim));
    ad::TapeD t;
    std::vector<ad::Var> ws;
    for (const auto& w : c.weights) ws.push_back(t.leaf(w));
    return stable_softmax_rows(t.value(classifier_logits(t, c, ws, t.leaf(x))));
}

std::vector<int> predict_class(const Classifier& c, const Mat& x) {
    const Mat p = predict_proba(c, x);
    std::vector<int> out(static_cast<size_t>(p.rows()));
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        Eigen::Index argmax;
        p.row(i).maxCoeff(&argmax);
        out[static_cast<size_t>(i)] = static_cast<int>(argmax);
    }
    return out;
}

}  // namespace gea
