#include "gea/attack_membership.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gea/autodiff.hpp"
#include "gea/metrics.hpp"
#include "gea/rng.hpp"

namespace gea {

Mat sorted_prediction_features(const Mat& probs) {
    Mat out(probs.rows(), probs.cols());
    std::vector<double> row(static_cast<size_t>(probs.cols()));
    for (Eigen::Index i = 0; i < probs.rows(); ++i) {
        const double sum = probs.row(i).sum();
        if (std::abs(sum - 1.0) > 1e-6)
            throw std::invalid_argument("sorted_prediction_features: row " + std::to_string(i) +
                                        " does not sum to 1 (got " + std::to_string(sum) + ")");
        for (Eigen::Index j = 0; j < probs.cols(); ++j) row[static_cast<size_t>(j)] = probs(i, j);
        std::sort(row.begin(), row.end(), std::greater<>());
        for (Eigen::Index j = 0; j < probs.cols(); ++j) out(i, j) = row[static_cast<size_t>(j)];
    }
    return out;
}

AttackResult shadow_attack(const PredictOracle& target_predict, const Graph& aux,
                           const ShadowAttackConfig& cfg, const MembershipEval& eval) {
    if (aux.n < 4)
        throw std::invalid_argument("shadow_attack: aux graph too small to split (n=" +
                                    std::to_string(aux.n) + ")");
    if (aux.labels.empty())
        throw std::invalid_argument("shadow_attack: aux graph has no class labels");

    // shadow-train / shadow-out partition of the auxiliary graph
    SplitResult parts = split_disjoint(aux, cfg.shadow_split, derive_seed(cfg.seed, "shadow-split"));
    Graph shadow_train = parts.a;
    shadow_train.train_mask.assign(static_cast<size_t>(shadow_train.n), 1);
    shadow_train.val_mask.assign(static_cast<size_t>(shadow_train.n), 0);
    shadow_train.test_mask.assign(static_cast<size_t>(shadow_train.n), 0);

    GnnConfig shadow_cfg = cfg.shadow_model;
    shadow_cfg.seed = derive_seed(cfg.seed, "shadow-model");
    const NodeClassifier shadow = train_classifier(shadow_train, shadow_cfg);

    // synthetic member/non-member dataset from the substitute's own predictions
    std::vector<int> aux_ids(static_cast<size_t>(aux.n));
    std::iota(aux_ids.begin(), aux_ids.end(), 0);
    const Mat shadow_probs = predict(shadow, aux, aux_ids);
    const Mat features = sorted_prediction_features(shadow_probs);
    std::vector<int> member_bit(static_cast<size_t>(aux.n), 0);
    for (int id : parts.a_ids) member_bit[static_cast<size_t>(id)] = 1;
    if (std::count(member_bit.begin(), member_bit.end(), 1) == 0 ||
        std::count(member_bit.begin(), member_bit.end(), 0) == 0)
        throw std::invalid_argument("shadow_attack: class-degenerate synthetic dataset");

    ClassifierConfig attack_cfg = cfg.attack_model;
    attack_cfg.seed = derive_seed(cfg.seed, "attack-model");
    const Classifier f_attack = fit_classifier(features, member_bit, 2, attack_cfg);

    // score the target through its opaque prediction surface
    const Mat target_probs = target_predict(eval.node_ids);
    if (target_probs.cols() != shadow_probs.cols())
        throw std::invalid_argument("shadow_attack: target predicts " +
                                    std::to_string(target_probs.cols()) + " classes, shadow " +
                                    std::to_string(shadow_probs.cols()));
    const Mat target_features = sorted_prediction_features(target_probs);
    const Mat proba = predict_proba(f_attack, target_features);

    AttackResult r;
    r.attack = "shadow";
    r.seed = cfg.seed;
    r.eval_nodes = eval.node_ids;
    r.truth = eval.truth;
    for (Eigen::Index i = 0; i < proba.rows(); ++i) {
        r.scores.push_back(proba(i, 1));
        r.decisions.push_back(proba(i, 1) >= 0.5 ? 1 : 0);
    }
    r.metrics = binary_metrics(r.decisions, r.truth);
    r.metrics.auc = roc_auc(r.scores, r.truth);
    r.params = {{"classifier", classifier_kind_name(cfg.attack_model.kind)},
                {"shadow_arch", arch_name(cfg.shadow_model.arch)},
                {"shadow_split", cfg.shadow_split}};
    return r;
}

AttackResult confidence_attack(const Mat& prediction_vectors, const std::vector<int>& membership,
                               std::optional<double> threshold, std::uint64_t seed) {
    const Eigen::Index n = prediction_vectors.rows();
    if (n == 0) throw std::invalid_argument("confidence_attack: empty input");
    if (static_cast<size_t>(n) != membership.size())
        throw std::invalid_argument("confidence_attack: rows/membership length mismatch");
    const long members = std::count(membership.begin(), membership.end(), 1);
    if (members * 2 != static_cast<long>(membership.size()))
        throw std::invalid_argument("confidence_attack: evaluation set must be balanced");

    std::vector<double> max_conf(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) max_conf[static_cast<size_t>(i)] = prediction_vectors.row(i).maxCoeff();

    auto accuracy_at = [&](double tau) {
        long correct = 0;
        for (Eigen::Index i = 0; i < n; ++i)
            correct += (max_conf[static_cast<size_t>(i)] >= tau) == (membership[static_cast<size_t>(i)] == 1);
        return static_cast<double>(correct) / static_cast<double>(n);
    };

    AttackResult r;
    r.attack = "confidence";
    r.seed = seed;
    r.truth = membership;
    r.scores = max_conf;

    double tau;
    if (threshold) {
        tau = *threshold;
    } else {
        // the adversary sweeps across thresholds and keeps the best
        double best_acc = -1.0;
        double best_tau = 0.0;
        for (int k = 0; k <= 100; ++k) {
            const double cand = 0.01 * k;
            const double acc = accuracy_at(cand);
            r.threshold_curve.emplace_back(cand, acc);
            if (acc > best_acc) {
                best_acc = acc;
                best_tau = cand;
            }
        }
        tau = best_tau;
    }
    r.threshold = tau;
    r.has_threshold = true;
    for (Eigen::Index i = 0; i < n; ++i)
        r.decisions.push_back(max_conf[static_cast<size_t>(i)] >= tau ? 1 : 0);
    r.metrics = binary_metrics(r.decisions, r.truth);
    r.metrics.auc = roc_auc(r.scores, r.truth);
    r.params = {{"swept", !threshold.has_value()}};
    return r;
}

Vec autoencoder_codes(const Mat& embeddings, const WhiteboxAttackConfig& cfg) {
    const Eigen::Index n = embeddings.rows();
    const Eigen::Index d = embeddings.cols();
    if (n == 0 || d == 0) throw std::invalid_argument("autoencoder_codes: empty embedding matrix");

    Mat x = embeddings;
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;

    Rng init = derived_rng(cfg.seed, "whitebox-ae");
    // d -> hidden -> 1 -> hidden -> d
    std::vector<Mat> w = {glorot_uniform(d, cfg.hidden, init), Mat::Zero(1, cfg.hidden),
                          glorot_uniform(cfg.hidden, 1, init), Mat::Zero(1, 1),
                          glorot_uniform(1, cfg.hidden, init), Mat::Zero(1, cfg.hidden),
                          glorot_uniform(cfg.hidden, d, init), Mat::Zero(1, d)};

    OptimizerD opt(OptKind::adam, cfg.lr);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        ad::TapeD t;
        std::vector<ad::Var> ws;
        for (const auto& m : w) ws.push_back(t.leaf(m));
        ad::Var input = t.leaf(x);
        ad::Var h1 = t.relu(t.add_row_broadcast(t.matmul(input, ws[0]), ws[1]));
        ad::Var code = t.add_row_broadcast(t.matmul(h1, ws[2]), ws[3]);
        ad::Var h2 = t.relu(t.add_row_broadcast(t.matmul(code, ws[4]), ws[5]));
        ad::Var recon = t.add_row_broadcast(t.matmul(h2, ws[6]), ws[7]);
        ad::Var diff = t.sub(recon, input);
        ad::Var loss = t.scale(t.sum(t.mul(diff, diff)), 1.0 / static_cast<double>(n));
        t.backward(loss);

        std::vector<Mat*> params;
        std::vector<const Mat*> grads;
        for (size_t i = 0; i < w.size(); ++i) {
            params.push_back(&w[i]);
            grads.push_back(&t.grad(ws[i]));
        }
        opt.step(params, grads);
    }

    // final encoder pass
    Mat h1 = ((x * w[0]).rowwise() + w[1].row(0)).cwiseMax(0.0);
    Mat code = (h1 * w[2]).rowwise() + w[3].row(0);
    return code.col(0);
}

AttackResult whitebox_attack(const Mat& embeddings, const std::vector<int>& anchor_indices,
                             const std::vector<int>& anchor_bits, const std::vector<int>& truth,
                             const WhiteboxAttackConfig& cfg) {
    const Eigen::Index n = embeddings.rows();
    if (static_cast<size_t>(n) != truth.size())
        throw std::invalid_argument("whitebox_attack: truth length must match embedding rows");
    if (anchor_indices.size() != anchor_bits.size() || anchor_indices.empty())
        throw std::invalid_argument("whitebox_attack: anchors missing");
    bool has_member = false, has_nonmember = false;
    for (size_t k = 0; k < anchor_indices.size(); ++k) {
        const int idx = anchor_indices[k];
        if (idx < 0 || idx >= n) throw std::invalid_argument("whitebox_attack: anchor index out of range");
        (anchor_bits[k] ? has_member : has_nonmember) = true;
    }
    if (!has_member || !has_nonmember)
        throw std::invalid_argument("whitebox_attack: need at least one member and one non-member anchor");

    const Vec codes = autoencoder_codes(embeddings, cfg);

    // cluster the scalar codes; points sorted by value so the outcome does not
    // depend on node order
    std::vector<int> order(static_cast<size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return codes(a) < codes(b); });
    Mat sorted_codes(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) sorted_codes(i, 0) = codes(order[static_cast<size_t>(i)]);
    const KmeansResult km = kmeans(sorted_codes, 2, derive_seed(cfg.seed, "whitebox-kmeans"));
    std::vector<int> cluster(static_cast<size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        cluster[static_cast<size_t>(order[static_cast<size_t>(i)])] = km.assignments[static_cast<size_t>(i)];

    // name clusters by anchor majority
    int net[2] = {0, 0};
    for (size_t k = 0; k < anchor_indices.size(); ++k)
        net[cluster[static_cast<size_t>(anchor_indices[k])]] += anchor_bits[k] ? 1 : -1;
    if (net[0] == net[1])
        throw std::invalid_argument(
            "whitebox_attack: anchor votes tie between clusters; provide more anchors");
    const int member_cluster = net[0] > net[1] ? 0 : 1;

    std::vector<char> is_anchor(static_cast<size_t>(n), 0);
    for (int idx : anchor_indices) is_anchor[static_cast<size_t>(idx)] = 1;

    // balanced evaluation over non-anchor nodes; the larger side is trimmed by
    // code-value rank so the choice is invariant to row order
    std::vector<int> pos_cand, neg_cand;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (is_anchor[static_cast<size_t>(i)]) continue;
        (truth[static_cast<size_t>(i)] ? pos_cand : neg_cand).push_back(static_cast<int>(i));
    }
    if (pos_cand.empty() || neg_cand.empty())
        throw std::invalid_argument("whitebox_attack: evaluation needs both members and non-members");
    auto by_code = [&](int a, int b) { return codes(a) < codes(b); };
    std::sort(pos_cand.begin(), pos_cand.end(), by_code);
    std::sort(neg_cand.begin(), neg_cand.end(), by_code);
    const size_t k = std::min(pos_cand.size(), neg_cand.size());
    // take every side's evenly spaced prefix of ranks to keep both tails
    auto trim = [&](std::vector<int>& v) {
        if (v.size() == k) return;
        std::vector<int> kept;
        kept.reserve(k);
        for (size_t i = 0; i < k; ++i)
            kept.push_back(v[i * v.size() / k]);
        v = std::move(kept);
    };
    trim(pos_cand);
    trim(neg_cand);

    AttackResult r;
    r.attack = "whitebox";
    r.seed = cfg.seed;
    for (int i : pos_cand) {
        r.eval_nodes.push_back(i);
        r.truth.push_back(1);
    }
    for (int i : neg_cand) {
        r.eval_nodes.push_back(i);
        r.truth.push_back(0);
    }
    const double member_centroid = km.centroids(member_cluster, 0);
    const double other_centroid = km.centroids(1 - member_cluster, 0);
    const double orient = member_centroid >= other_centroid ? 1.0 : -1.0;
    for (int i : r.eval_nodes) {
        r.scores.push_back(orient * codes(i));
        r.decisions.push_back(cluster[static_cast<size_t>(i)] == member_cluster ? 1 : 0);
    }
    r.metrics = binary_metrics(r.decisions, r.truth);
    r.metrics.auc = roc_auc(r.scores, r.truth);
    r.params = {{"anchors", anchor_indices.size()},
                {"member_cluster_centroid", member_centroid},
                {"ae_hidden", cfg.hidden},
                {"ae_epochs", cfg.epochs}};
    return r;
}

}  // namespace gea
