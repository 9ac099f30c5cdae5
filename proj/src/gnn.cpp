#include "gea/gnn.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "gea/autodiff.hpp"
#include "gea/rng.hpp"

namespace gea {

std::string arch_name(GnnArch a) { return a == GnnArch::gcn ? "gcn" : "sage"; }

GnnArch arch_from_name(const std::string& s) {
    if (s == "gcn") return GnnArch::gcn;
    if (s == "sage") return GnnArch::sage;
    throw std::invalid_argument("unknown gnn arch: " + s);
}

std::vector<int> GnnConfig::layer_widths(int input_dim, int n_classes) const {
    std::vector<int> widths{input_dim};
    if (static_cast<int>(hidden_dims.size()) == num_layers - 1) {
        widths.insert(widths.end(), hidden_dims.begin(), hidden_dims.end());
    } else if (hidden_dims.size() == 1) {
        widths.insert(widths.end(), static_cast<size_t>(num_layers - 1), hidden_dims[0]);
    } else {
        throw std::invalid_argument("GnnConfig: hidden_dims must have 1 or num_layers-1 entries");
    }
    widths.push_back(n_classes);
    return widths;
}

void GnnConfig::validate() const {
    if (num_layers < 2) throw std::invalid_argument("GnnConfig: num_layers must be >= 2");
    if (embedding_layer < 1 || embedding_layer >= num_layers)
        throw std::invalid_argument("GnnConfig: embedding_layer must satisfy 1 <= k < num_layers");
    if (hidden_dims.empty()) throw std::invalid_argument("GnnConfig: hidden_dims empty");
    for (int h : hidden_dims)
        if (h <= 0) throw std::invalid_argument("GnnConfig: hidden dims must be positive");
    if (dropout < 0.0 || dropout >= 1.0)
        throw std::invalid_argument("GnnConfig: dropout must be in [0,1)");
    if (epochs < 0) throw std::invalid_argument("GnnConfig: epochs must be >= 0");
    if (lr <= 0.0) throw std::invalid_argument("GnnConfig: learning rate must be positive");
}

Mat neighbor_mean_operator(const Graph& g) {
    Mat m = Mat::Zero(g.n, g.n);
    for (auto [i, j] : g.edges) {
        m(i, j) = 1.0;
        m(j, i) = 1.0;
    }
    for (int i = 0; i < g.n; ++i) {
        const double deg = m.row(i).sum();
        if (deg > 0.0) m.row(i) /= deg;
    }
    return m;
}

namespace {

// One forward graph shared by training and inference; dropout masks are only
// supplied while training.
std::vector<ad::Var> forward_tape(ad::TapeD& t, GnnArch arch, const std::vector<ad::Var>& ws,
                                  ad::Var op, ad::Var x, const std::vector<Mat>* dropout_masks) {
    std::vector<ad::Var> acts{x};
    ad::Var h = x;
    const int layers = static_cast<int>(ws.size());
    for (int l = 0; l < layers; ++l) {
        ad::Var z;
        if (arch == GnnArch::gcn) {
            z = t.matmul(op, t.matmul(h, ws[static_cast<size_t>(l)]));
        } else {
            z = t.matmul(t.concat_cols(h, t.matmul(op, h)), ws[static_cast<size_t>(l)]);
        }
        if (l + 1 < layers) {
            h = t.relu(z);
            if (dropout_masks && (*dropout_masks)[static_cast<size_t>(l)].size() != 0)
                h = t.mul(h, t.leaf((*dropout_masks)[static_cast<size_t>(l)]));
        } else {
            h = z;
        }
        acts.push_back(h);
    }
    return acts;
}

std::vector<Mat> forward_values(GnnArch arch, const std::vector<Mat>& weights, const Mat& op,
                                const Mat& x) {
    ad::TapeD t;
    std::vector<ad::Var> ws;
    ws.reserve(weights.size());
    for (const auto& w : weights) ws.push_back(t.leaf(w));
    auto acts = forward_tape(t, arch, ws, t.leaf(op), t.leaf(x), nullptr);
    std::vector<Mat> out;
    out.reserve(acts.size());
    for (auto v : acts) out.push_back(t.value(v));
    return out;
}

Mat operator_for(const NodeClassifier& model, const Graph& g) {
    return model.config.arch == GnnArch::gcn ? normalize_adjacency(g, NormMode::sym).m
                                             : neighbor_mean_operator(g);
}

double masked_accuracy(const Mat& logits, const std::vector<int>& labels,
                       const std::vector<int>& nodes) {
    if (nodes.empty()) return std::numeric_limits<double>::quiet_NaN();
    long correct = 0;
    for (int i : nodes) {
        Eigen::Index argmax;
        logits.row(i).maxCoeff(&argmax);
        correct += static_cast<int>(argmax) == labels[static_cast<size_t>(i)];
    }
    return static_cast<double>(correct) / static_cast<double>(nodes.size());
}

}  // namespace

std::vector<Mat> gcn_forward(const std::vector<Mat>& weights, const Mat& norm_adj, const Mat& X) {
    return forward_values(GnnArch::gcn, weights, norm_adj, X);
}

std::vector<Mat> sage_forward(const std::vector<Mat>& weights, const Mat& neighbor_mean,
                              const Mat& X) {
    return forward_values(GnnArch::sage, weights, neighbor_mean, X);
}

NodeClassifier train_classifier(const Graph& g, const GnnConfig& cfg) {
    cfg.validate();
    if (g.labels.empty() || g.n_classes < 2)
        throw std::invalid_argument("train_classifier: graph has no class labels");
    const auto train_ids = g.train_nodes();
    if (train_ids.empty()) throw std::invalid_argument("train_classifier: no labeled train nodes");

    const Graph gt = induced_subgraph(g, train_ids);
    const Mat op_train = cfg.arch == GnnArch::gcn ? normalize_adjacency(gt, NormMode::sym).m
                                                  : neighbor_mean_operator(gt);
    const Mat op_full = cfg.arch == GnnArch::gcn ? normalize_adjacency(g, NormMode::sym).m
                                                 : neighbor_mean_operator(g);

    NodeClassifier model;
    model.config = cfg;
    model.input_dim = g.feature_dim();
    model.n_classes = g.n_classes;

    const auto widths = cfg.layer_widths(model.input_dim, model.n_classes);
    Rng init_rng = derived_rng(cfg.seed, "gnn-init");
    const int fan_mult = cfg.arch == GnnArch::sage ? 2 : 1;
    for (int l = 0; l + 1 < static_cast<int>(widths.size()); ++l)
        model.weights.push_back(glorot_uniform(fan_mult * widths[static_cast<size_t>(l)],
                                               widths[static_cast<size_t>(l) + 1], init_rng));

    // one-hot target rows over labeled train-graph nodes
    std::vector<int> labeled_rows;
    Mat onehot = Mat::Zero(gt.n, model.n_classes);
    for (int i = 0; i < gt.n; ++i) {
        const int y = gt.labels[static_cast<size_t>(i)];
        if (y >= 0) {
            onehot(i, y) = 1.0;
            labeled_rows.push_back(i);
        }
    }
    if (labeled_rows.empty()) throw std::invalid_argument("train_classifier: no labeled train nodes");

    OptimizerD opt(cfg.optimizer, cfg.lr);
    const std::vector<int> test_ids = g.test_nodes();
    std::vector<int> all_train_rows(static_cast<size_t>(gt.n));
    for (int i = 0; i < gt.n; ++i) all_train_rows[static_cast<size_t>(i)] = i;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        ad::TapeD t;
        std::vector<ad::Var> ws;
        for (const auto& w : model.weights) ws.push_back(t.leaf(w));

        std::vector<Mat> masks(model.weights.size());
        if (cfg.dropout > 0.0) {
            for (size_t l = 0; l + 1 < model.weights.size(); ++l) {
                Rng drop_rng = derived_rng(cfg.seed, "gnn-dropout", static_cast<std::uint64_t>(epoch), l);
                const Eigen::Index width = model.weights[l].cols();
                Mat m(gt.n, width);
                const double keep = 1.0 - cfg.dropout;
                for (Eigen::Index i = 0; i < m.rows(); ++i)
                    for (Eigen::Index j = 0; j < m.cols(); ++j)
                        m(i, j) = drop_rng.bernoulli(keep) ? 1.0 / keep : 0.0;
                masks[l] = std::move(m);
            }
        }

        auto acts = forward_tape(t, cfg.arch, ws, t.leaf(op_train), t.leaf(gt.features),
                                 cfg.dropout > 0.0 ? &masks : nullptr);
        ad::Var probs = t.softmax_rows(acts.back());
        ad::Var picked = t.mul(t.leaf(onehot), t.log(t.add_scalar(probs, 1e-12)));
        ad::Var loss = t.scale(t.sum(picked), -1.0 / static_cast<double>(labeled_rows.size()));
        t.backward(loss);

        std::vector<Mat*> params;
        std::vector<const Mat*> grads;
        for (size_t l = 0; l < model.weights.size(); ++l) {
            params.push_back(&model.weights[l]);
            grads.push_back(&t.grad(ws[l]));
        }
        opt.step(params, grads);

        EpochStats stats;
        stats.loss = t.value(loss)(0, 0);
        if (!std::isfinite(stats.loss))
            throw std::runtime_error("train_classifier: loss diverged at epoch " +
                                     std::to_string(epoch));
        const Mat train_logits =
            forward_values(cfg.arch, model.weights, op_train, gt.features).back();
        stats.train_acc = masked_accuracy(train_logits, gt.labels, all_train_rows);
        if (!test_ids.empty()) {
            const Mat full_logits =
                forward_values(cfg.arch, model.weights, op_full, g.features).back();
            stats.test_acc = masked_accuracy(full_logits, g.labels, test_ids);
        } else {
            stats.test_acc = std::numeric_limits<double>::quiet_NaN();
        }
        model.history.push_back(stats);
    }
    return model;
}

Mat predict(const NodeClassifier& model, const Graph& g, const std::vector<int>& node_ids) {
    for (int id : node_ids)
        if (id < 0 || id >= g.n)
            throw std::invalid_argument("predict: unknown node id " + std::to_string(id));
    const Mat logits = forward_values(model.config.arch, model.weights, operator_for(model, g),
                                      g.features)
                           .back();
    const Mat probs = stable_softmax_rows(logits);
    Mat out(static_cast<Eigen::Index>(node_ids.size()), probs.cols());
    for (size_t k = 0; k < node_ids.size(); ++k)
        out.row(static_cast<Eigen::Index>(k)) = probs.row(node_ids[k]);
    return out;
}

EmbeddingMatrix extract_embeddings(const NodeClassifier& model, const Graph& g, int layer_index) {
    const int layers = static_cast<int>(model.weights.size());
    if (layer_index < 1 || layer_index >= layers)
        throw std::invalid_argument("extract_embeddings: layer index " + std::to_string(layer_index) +
                                    " out of range [1," + std::to_string(layers) + ")");
    const auto acts =
        forward_values(model.config.arch, model.weights, operator_for(model, g), g.features);
    EmbeddingMatrix e;
    e.node_ids.resize(static_cast<size_t>(g.n));
    for (int i = 0; i < g.n; ++i) e.node_ids[static_cast<size_t>(i)] = i;
    e.rows = acts[static_cast<size_t>(layer_index)];
    return e;
}

void save_checkpoint(const NodeClassifier& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.precision(17);
    out << "gea-model 1\n";
    out << "arch " << arch_name(model.config.arch) << "\n";
    out << "layers " << model.config.num_layers << "\n";
    out << "embedding_layer " << model.config.embedding_layer << "\n";
    out << "dropout " << model.config.dropout << "\n";
    out << "epochs " << model.config.epochs << "\n";
    out << "lr " << model.config.lr << "\n";
    out << "optimizer " << (model.config.optimizer == OptKind::adam ? "adam" : "sgd") << "\n";
    out << "seed " << model.config.seed << "\n";
    out << "input_dim " << model.input_dim << "\n";
    out << "classes " << model.n_classes << "\n";
    out << "hidden";
    for (int h : model.config.hidden_dims) out << " " << h;
    out << "\n";
    out << "weights " << model.weights.size() << "\n";
    char buf[64];
    for (const auto& w : model.weights) {
        out << "W " << w.rows() << " " << w.cols() << "\n";
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", w(i, j));
                out << (j ? " " : "") << buf;
            }
            out << "\n";
        }
    }
}

NodeClassifier load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "gea-model" || version != 1)
        throw std::runtime_error("checkpoint " + path + ": unrecognized format");

    NodeClassifier model;
    std::string key;
    while (in >> key) {
        if (key == "arch") {
            std::string a;
            in >> a;
            model.config.arch = arch_from_name(a);
        } else if (key == "layers") {
            in >> model.config.num_layers;
        } else if (key == "embedding_layer") {
            in >> model.config.embedding_layer;
        } else if (key == "dropout") {
            in >> model.config.dropout;
        } else if (key == "epochs") {
            in >> model.config.epochs;
        } else if (key == "lr") {
            in >> model.config.lr;
        } else if (key == "optimizer") {
            std::string o;
            in >> o;
            model.config.optimizer = o == "adam" ? OptKind::adam : OptKind::sgd;
        } else if (key == "seed") {
            in >> model.config.seed;
        } else if (key == "input_dim") {
            in >> model.input_dim;
        } else if (key == "classes") {
            in >> model.n_classes;
        } else if (key == "hidden") {
            model.config.hidden_dims.clear();
            for (int l = 0; l + 1 < model.config.num_layers; ++l) {
                int h;
                in >> h;
                model.config.hidden_dims.push_back(h);
            }
        } else if (key == "weights") {
            size_t count;
            in >> count;
            for (size_t k = 0; k < count; ++k) {
                std::string tag;
                Eigen::Index r, c;
                in >> tag >> r >> c;
                if (tag != "W") throw std::runtime_error("checkpoint " + path + ": expected W block");
                Mat w(r, c);
                for (Eigen::Index i = 0; i < r; ++i)
                    for (Eigen::Index j = 0; j < c; ++j) in >> w(i, j);
                model.weights.push_back(std::move(w));
            }
            if (!in) throw std::runtime_error("checkpoint " + path + ": truncated weights");
            return model;
        } else {
            throw std::runtime_error("checkpoint " + path + ": unknown key " + key);
        }
    }
    throw std::runtime_error("checkpoint " + path + ": missing weights");
}

}  // namespace gea
