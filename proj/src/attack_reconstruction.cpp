#include "gea/attack_reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "gea/autodiff.hpp"
#include "gea/optim.hpp"
#include "gea/rng.hpp"

namespace gea {

std::string decoder_name(DecoderMode m) {
    return m == DecoderMode::inner_product ? "inner_product" : "bilinear";
}

DecoderMode decoder_from_name(const std::string& s) {
    if (s == "inner_product") return DecoderMode::inner_product;
    if (s == "bilinear") return DecoderMode::bilinear;
    throw std::invalid_argument("unknown decoder mode: " + s);
}

namespace {

Mat sigmoid_mat(const Mat& x) {
    return x.unaryExpr([](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
    });
}

Mat dense_adjacency(const Graph& g) {
    Mat a = Mat::Zero(g.n, g.n);
    for (auto [i, j] : g.edges) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
    }
    return a;
}

// pairs (i<j) that are not edges, sampled uniformly without replacement
std::vector<std::pair<int, int>> sample_non_edges(const Graph& g, size_t count, Rng& rng) {
    std::set<std::pair<int, int>> edge_set(g.edges.begin(), g.edges.end());
    const long n = g.n;
    const long all_pairs = n * (n - 1) / 2;
    const long available = all_pairs - static_cast<long>(edge_set.size());
    count = std::min<size_t>(count, static_cast<size_t>(std::max<long>(available, 0)));
    std::set<std::pair<int, int>> chosen;
    while (chosen.size() < count) {
        int i = rng.uniform_index(g.n);
        int j = rng.uniform_index(g.n);
        if (i == j) continue;
        if (i > j) std::swap(i, j);
        const std::pair<int, int> p{i, j};
        if (edge_set.count(p) || chosen.count(p)) continue;
        chosen.insert(p);
    }
    return {chosen.begin(), chosen.end()};
}

struct PairEval {
    double auc = 0.0;
    double ap = 0.0;
};

PairEval evaluate_pairs(const Mat& scores, const std::vector<std::pair<int, int>>& pos,
                        const std::vector<std::pair<int, int>>& neg) {
    std::vector<double> s;
    std::vector<int> y;
    for (auto [i, j] : pos) {
        s.push_back(scores(i, j));
        y.push_back(1);
    }
    for (auto [i, j] : neg) {
        s.push_back(scores(i, j));
        y.push_back(0);
    }
    return PairEval{roc_auc(s, y), average_precision(s, y)};
}

ad::Var decoder_logits(ad::TapeD& t, DecoderMode mode, ad::Var z, ad::Var bilinear) {
    if (mode == DecoderMode::inner_product) return t.matmul(z, t.transpose(z));
    return t.matmul(t.matmul(z, bilinear), t.transpose(z));
}

}  // namespace

GraphAutoencoder train_autoencoder(const Graph& aux, const GaeConfig& cfg) {
    if (aux.edges.empty()) throw std::invalid_argument("train_autoencoder: aux graph has no edges");
    if (cfg.epochs < 0) throw std::invalid_argument("train_autoencoder: epochs must be >= 0");

    const int n = aux.n;
    const Mat norm_adj = normalize_adjacency(aux, NormMode::sym).m;
    const Mat a = dense_adjacency(aux);

    GraphAutoencoder ae;
    ae.config = cfg;
    Rng init = derived_rng(cfg.seed, "gae-init");
    ae.encoder_weights = {glorot_uniform(aux.feature_dim(), cfg.hidden, init),
                          glorot_uniform(cfg.hidden, cfg.emb_dim, init)};
    if (cfg.decoder == DecoderMode::bilinear) {
        Mat wb = 0.1 * glorot_uniform(cfg.emb_dim, cfg.emb_dim, init);
        ae.bilinear = 0.5 * (wb + wb.transpose());
    }

    // constant loss masks: diagonal excluded everywhere
    const double n_pairs = static_cast<double>(n) * (n - 1);
    const double n_pos = 2.0 * static_cast<double>(aux.edges.size());
    const double pos_weight = (n_pairs - n_pos) / n_pos;
    Mat offdiag = Mat::Ones(n, n) - Mat::Identity(n, n);
    Mat pos_mask = a * pos_weight;
    Mat neg_mask = (offdiag - a).eval();

    // fixed negative sample for the training curve
    Rng curve_rng = derived_rng(cfg.seed, "gae-curve");
    const auto curve_neg = sample_non_edges(aux, aux.edges.size(), curve_rng);

    OptimizerD opt(OptKind::adam, cfg.lr);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        ad::TapeD t;
        ad::Var w0 = t.leaf(ae.encoder_weights[0]);
        ad::Var w1 = t.leaf(ae.encoder_weights[1]);
        ad::Var op = t.leaf(norm_adj);
        ad::Var h = t.relu(t.matmul(op, t.matmul(t.leaf(aux.features), w0)));
        ad::Var z = t.matmul(op, t.matmul(h, w1));
        ad::Var wb{-1};
        if (cfg.decoder == DecoderMode::bilinear) wb = t.leaf(ae.bilinear);
        ad::Var logits = decoder_logits(t, cfg.decoder, z, wb);
        ad::Var probs = t.sigmoid(logits);

        ad::Var loss;
        if (cfg.loss == ReconLoss::weighted_bce) {
            ad::Var log_p = t.log(t.add_scalar(probs, 1e-12));
            ad::Var log_1mp = t.log(t.add_scalar(t.scale(probs, -1.0), 1.0 + 1e-12));
            ad::Var term = t.add(t.mul(t.leaf(pos_mask), log_p), t.mul(t.leaf(neg_mask), log_1mp));
            loss = t.scale(t.sum(term), -1.0 / n_pairs);
        } else {
            ad::Var diff = t.mul(t.leaf(offdiag), t.sub(t.leaf(a), probs));
            loss = t.scale(t.sum(t.mul(diff, diff)), 1.0 / n_pairs);
        }
        t.backward(loss);

        std::vector<Mat*> params{&ae.encoder_weights[0], &ae.encoder_weights[1]};
        std::vector<const Mat*> grads{&t.grad(w0), &t.grad(w1)};
        if (cfg.decoder == DecoderMode::bilinear) {
            params.push_back(&ae.bilinear);
            grads.push_back(&t.grad(wb));
        }
        opt.step(params, grads);
        if (cfg.decoder == DecoderMode::bilinear)
            ae.bilinear = (0.5 * (ae.bilinear + ae.bilinear.transpose())).eval();

        if (cfg.history_stride > 0 && !curve_neg.empty() &&
            (epoch % cfg.history_stride == 0 || epoch + 1 == cfg.epochs)) {
            const Mat s = decode_adjacency(ae, encode_graph(ae, aux));
            const PairEval pe = evaluate_pairs(s, aux.edges, curve_neg);
            ae.history_auc.push_back(pe.auc);
            ae.history_ap.push_back(pe.ap);
        }
    }
    return ae;
}

Mat encode_graph(const GraphAutoencoder& ae, const Graph& g) {
    const Mat norm_adj = normalize_adjacency(g, NormMode::sym).m;
    const Mat h = (norm_adj * (g.features * ae.encoder_weights[0])).cwiseMax(0.0);
    return norm_adj * (h * ae.encoder_weights[1]);
}

Mat decode_adjacency(const GraphAutoencoder& ae, const Mat& z) {
    Mat logits;
    if (ae.config.decoder == DecoderMode::bilinear) {
        if (z.cols() != ae.bilinear.rows())
            throw std::invalid_argument("decode_adjacency: embedding dim " + std::to_string(z.cols()) +
                                        " does not match bilinear decoder dim " +
                                        std::to_string(ae.bilinear.rows()));
        logits = z * ae.bilinear * z.transpose();
    } else {
        logits = z * z.transpose();
    }
    Mat s = sigmoid_mat(logits);
    s = (0.5 * (s + s.transpose())).eval();
    s.diagonal().setZero();
    return s;
}

ReconstructionResult reconstruct_target(const GraphAutoencoder& ae, const Mat& target_embeddings,
                                        const ThresholdPolicy& policy, const Graph* ground_truth,
                                        std::uint64_t seed) {
    ReconstructionResult r;
    r.seed = seed;
    r.scores = decode_adjacency(ae, target_embeddings);
    const int n = static_cast<int>(r.scores.rows());

    if (policy.kind == ThresholdPolicy::Kind::fixed) {
        r.tau = policy.fixed_tau;
    } else {
        // pick tau so the reconstruction matches the assumed edge density
        std::vector<double> upper;
        upper.reserve(static_cast<size_t>(n) * (n - 1) / 2);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) upper.push_back(r.scores(i, j));
        const long want = std::lround(policy.density * static_cast<double>(upper.size()));
        if (want <= 0) {
            r.tau = 1.0 + 1e-12;
        } else if (want >= static_cast<long>(upper.size())) {
            r.tau = 0.0;
        } else {
            std::nth_element(upper.begin(), upper.begin() + (want - 1), upper.end(),
                             std::greater<>());
            r.tau = upper[static_cast<size_t>(want - 1)];
        }
    }

    r.adjacency = Eigen::MatrixXi::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && r.scores(i, j) >= r.tau) r.adjacency(i, j) = 1;

    r.params = {{"decoder", decoder_name(ae.config.decoder)},
                {"threshold_policy", policy.kind == ThresholdPolicy::Kind::fixed ? "fixed" : "density"},
                {"tau", r.tau}};

    if (ground_truth) {
        if (ground_truth->n != n)
            throw std::invalid_argument("reconstruct_target: ground truth size mismatch");
        Rng rng = derived_rng(seed, "recon-eval");
        auto neg = sample_non_edges(*ground_truth, ground_truth->edges.size(), rng);
        const PairEval pe = evaluate_pairs(r.scores, ground_truth->edges, neg);

        std::vector<int> decisions, truth;
        std::vector<double> pair_scores;
        for (auto [i, j] : ground_truth->edges) {
            decisions.push_back(r.adjacency(i, j));
            pair_scores.push_back(r.scores(i, j));
            truth.push_back(1);
        }
        for (auto [i, j] : neg) {
            decisions.push_back(r.adjacency(i, j));
            pair_scores.push_back(r.scores(i, j));
            truth.push_back(0);
        }
        r.metrics = binary_metrics(decisions, truth);
        r.metrics.auc = pe.auc;
        r.metrics.ap = pe.ap;
        r.link_metrics = binary_metrics(decisions, truth);
        r.has_metrics = true;
    }
    return r;
}

int infer_link(const ReconstructionResult& r, int i, int j) {
    const int n = static_cast<int>(r.adjacency.rows());
    if (i < 0 || j < 0 || i >= n || j >= n)
        throw std::invalid_argument("infer_link: node index out of range");
    if (i == j) throw std::invalid_argument("infer_link: i == j has no link bit");
    return r.adjacency(i, j);
}

nlohmann::json ReconstructionResult::to_json() const {
    nlohmann::json j;
    j["attack"] = "reconstruction";
    j["seed"] = seed;
    j["tau"] = tau;
    j["params"] = params.is_null() ? nlohmann::json::object() : params;
    if (has_metrics) {
        j["auc"] = metrics.auc ? *metrics.auc : 0.0;
        j["average_precision"] = metrics.ap ? *metrics.ap : 0.0;
        j["link_accuracy"] = link_metrics.accuracy;
        j["link_advantage"] = link_metrics.advantage;
        j["support_positive"] = link_metrics.support_positive;
        j["support_negative"] = link_metrics.support_negative;
    }
    return j;
}

}  // namespace gea
