#include "gea/walks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gea {

void WalkConfig::validate() const {
    if (p <= 0.0 || q <= 0.0) throw std::invalid_argument("WalkConfig: p and q must be positive");
    if (walk_length < 2) throw std::invalid_argument("WalkConfig: walk_length must be >= 2");
    if (window < 1) throw std::invalid_argument("WalkConfig: window must be >= 1");
    if (walks_per_node < 1) throw std::invalid_argument("WalkConfig: walks_per_node must be >= 1");
    if (dim < 1) throw std::invalid_argument("WalkConfig: dim must be >= 1");
    if (negatives < 0) throw std::invalid_argument("WalkConfig: negatives must be >= 0");
    if (epochs < 1) throw std::invalid_argument("WalkConfig: epochs must be >= 1");
    if (lr <= 0.0) throw std::invalid_argument("WalkConfig: lr must be positive");
}

namespace {

bool is_adjacent(const std::vector<std::vector<int>>& adj, int a, int b) {
    const auto& nbrs = adj[static_cast<size_t>(a)];
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

inline double sigmoid_clipped(double x) {
    if (x > 30.0) x = 30.0;
    if (x < -30.0) x = -30.0;
    return 1.0 / (1.0 + std::exp(-x));
}

}  // namespace

int next_step(const std::vector<std::vector<int>>& adj, int prev, int cur, double p, double q,
              Rng& rng) {
    const auto& nbrs = adj[static_cast<size_t>(cur)];
    if (nbrs.empty()) return -1;
    if (prev < 0) return nbrs[static_cast<size_t>(rng.uniform_index(static_cast<int>(nbrs.size())))];

    // linear scan over neighbor weights; desk-scale degrees make alias tables unnecessary
    double total = 0.0;
    std::vector<double> weights(nbrs.size());
    for (size_t k = 0; k < nbrs.size(); ++k) {
        const int x = nbrs[k];
        double w;
        if (x == prev)
            w = 1.0 / p;
        else if (is_adjacent(adj, prev, x))
            w = 1.0;
        else
            w = 1.0 / q;
        weights[k] = w;
        total += w;
    }
    double target = rng.uniform() * total;
    for (size_t k = 0; k < nbrs.size(); ++k) {
        target -= weights[k];
        if (target <= 0.0) return nbrs[k];
    }
    return nbrs.back();
}

std::vector<std::vector<int>> sample_walks(const Graph& g, const WalkConfig& cfg) {
    cfg.validate();
    const auto adj = g.adjacency_list();
    std::vector<std::vector<int>> walks;
    walks.reserve(static_cast<size_t>(g.n) * static_cast<size_t>(cfg.walks_per_node));
    for (int w = 0; w < cfg.walks_per_node; ++w) {
        for (int start = 0; start < g.n; ++start) {
            if (adj[static_cast<size_t>(start)].empty()) continue;  // isolated: no walks
            Rng rng = derived_rng(cfg.seed, "walk", static_cast<std::uint64_t>(start),
                                  static_cast<std::uint64_t>(w));
            std::vector<int> walk{start};
            int prev = -1, cur = start;
            for (int step = 1; step < cfg.walk_length; ++step) {
                const int nxt = next_step(adj, prev, cur, cfg.p, cfg.q, rng);
                if (nxt < 0) break;  // dead end
                walk.push_back(nxt);
                prev = cur;
                cur = nxt;
            }
            walks.push_back(std::move(walk));
        }
    }
    return walks;
}

SkipgramResult train_skipgram(const std::vector<std::vector<int>>& walks, int n_nodes,
                              const WalkConfig& cfg) {
    cfg.validate();
    if (walks.empty()) throw std::invalid_argument("train_skipgram: empty walk set");
    if (n_nodes <= 0) throw std::invalid_argument("train_skipgram: n_nodes must be positive");

    // unigram^0.75 table for negative sampling
    std::vector<double> counts(static_cast<size_t>(n_nodes), 0.0);
    long total_positions = 0;
    for (const auto& w : walks) {
        for (int v : w) {
            if (v < 0 || v >= n_nodes)
                throw std::invalid_argument("train_skipgram: walk node id out of range");
            counts[static_cast<size_t>(v)] += 1.0;
        }
        total_positions += static_cast<long>(w.size());
    }
    std::vector<double> neg_cdf(static_cast<size_t>(n_nodes));
    double cum = 0.0;
    for (int v = 0; v < n_nodes; ++v) {
        cum += std::pow(counts[static_cast<size_t>(v)], 0.75);
        neg_cdf[static_cast<size_t>(v)] = cum;
    }
    if (cum <= 0.0) throw std::invalid_argument("train_skipgram: walks contain no nodes");

    const int d = cfg.dim;
    Mat target_vec(n_nodes, d);   // released side
    Mat context_vec = Mat::Zero(n_nodes, d);
    {
        Rng init = derived_rng(cfg.seed, "skipgram-init");
        for (int i = 0; i < n_nodes; ++i)
            for (int j = 0; j < d; ++j) target_vec(i, j) = init.uniform(-0.5 / d, 0.5 / d);
    }

    Rng neg_rng = derived_rng(cfg.seed, "skipgram-neg");
    auto sample_negative = [&]() {
        const double u = neg_rng.uniform() * cum;
        return static_cast<int>(std::lower_bound(neg_cdf.begin(), neg_cdf.end(), u) -
                                neg_cdf.begin());
    };

    // total pair count for the linear learning-rate decay
    long total_pairs = 0;
    for (const auto& w : walks) {
        const long len = static_cast<long>(w.size());
        for (long i = 0; i < len; ++i) {
            const long lo = std::max<long>(0, i - cfg.window), hi = std::min(len - 1, i + cfg.window);
            total_pairs += hi - lo;
        }
    }
    total_pairs *= cfg.epochs;
    if (total_pairs == 0) throw std::invalid_argument("train_skipgram: no training pairs (walks too short)");

    SkipgramResult result;
    Eigen::RowVectorXd accum(d);
    long processed = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double loss_sum = 0.0;
        long loss_pairs = 0;
        for (const auto& walk : walks) {
            const long len = static_cast<long>(walk.size());
            for (long i = 0; i < len; ++i) {
                const int t = walk[static_cast<size_t>(i)];
                const long lo = std::max<long>(0, i - cfg.window);
                const long hi = std::min(len - 1, i + cfg.window);
                for (long j = lo; j <= hi; ++j) {
                    if (j == i) continue;
                    const int c = walk[static_cast<size_t>(j)];
                    const double alpha =
                        std::max(cfg.lr * (1.0 - static_cast<double>(processed) /
                                                     static_cast<double>(total_pairs)),
                                 cfg.lr * 1e-4);
                    ++processed;
                    accum.setZero();
                    double pair_loss = 0.0;
                    // positive
                    {
                        const double f = sigmoid_clipped(target_vec.row(t).dot(context_vec.row(c)));
                        const double gscale = alpha * (1.0 - f);
                        accum += gscale * context_vec.row(c);
                        context_vec.row(c) += gscale * target_vec.row(t);
                        pair_loss -= std::log(std::max(f, 1e-12));
                    }
                    for (int k = 0; k < cfg.negatives; ++k) {
                        const int neg = sample_negative();
                        const double f = sigmoid_clipped(target_vec.row(t).dot(context_vec.row(neg)));
                        const double gscale = alpha * (0.0 - f);
                        accum += gscale * context_vec.row(neg);
                        context_vec.row(neg) += gscale * target_vec.row(t);
                        pair_loss -= std::log(std::max(1.0 - f, 1e-12));
                    }
                    target_vec.row(t) += accum;
                    loss_sum += pair_loss;
                    ++loss_pairs;
                }
            }
        }
        result.epoch_loss.push_back(loss_sum / static_cast<double>(loss_pairs));
    }

    result.embeddings.node_ids.resize(static_cast<size_t>(n_nodes));
    for (int i = 0; i < n_nodes; ++i) result.embeddings.node_ids[static_cast<size_t>(i)] = i;
    result.embeddings.rows = std::move(target_vec);
    check_finite(result.embeddings.rows, "skipgram embeddings");
    if (cfg.normalize) result.embeddings.l2_normalize_rows();
    return result;
}

SkipgramResult train_walk_embeddings(const Graph& g, const WalkConfig& cfg) {
    return train_skipgram(sample_walks(g, cfg), g.n, cfg);
}

}  // namespace gea
