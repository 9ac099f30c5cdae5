#include "gea/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace gea {

std::vector<int> Graph::mask_nodes(const std::vector<char>& mask) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(mask.size()); ++i)
        if (mask[i]) out.push_back(i);
    return out;
}

std::vector<std::vector<int>> Graph::adjacency_list() const {
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (auto [i, j] : edges) {
        adj[static_cast<size_t>(i)].push_back(j);
        adj[static_cast<size_t>(j)].push_back(i);
    }
    for (auto& nbrs : adj) std::sort(nbrs.begin(), nbrs.end());
    return adj;
}

void Graph::validate() const {
    if (features.rows() != n) throw std::runtime_error("Graph: feature row count != n");
    for (auto [i, j] : edges) {
        if (i >= j) throw std::runtime_error("Graph: edge not oriented i<j");
        if (i < 0 || j >= n) throw std::runtime_error("Graph: edge endpoint out of range");
    }
    if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
        throw std::runtime_error("Graph: duplicate edge");
    if (!labels.empty() && static_cast<int>(labels.size()) != n)
        throw std::runtime_error("Graph: label count != n");
    if (!attrs.empty() && static_cast<int>(attrs.size()) != n)
        throw std::runtime_error("Graph: attribute count != n");
    const size_t mn = static_cast<size_t>(n);
    if ((!train_mask.empty() && train_mask.size() != mn) ||
        (!val_mask.empty() && val_mask.size() != mn) ||
        (!test_mask.empty() && test_mask.size() != mn))
        throw std::runtime_error("Graph: mask size != n");
    for (int i = 0; i < n; ++i) {
        int roles = 0;
        if (!train_mask.empty() && train_mask[static_cast<size_t>(i)]) ++roles;
        if (!val_mask.empty() && val_mask[static_cast<size_t>(i)]) ++roles;
        if (!test_mask.empty() && test_mask[static_cast<size_t>(i)]) ++roles;
        if (roles > 1) throw std::runtime_error("Graph: masks not disjoint");
    }
    check_finite(features, "Graph features");
}

std::vector<std::pair<int, int>> canonical_edges(std::vector<std::pair<int, int>> edges) {
    for (auto& e : edges)
        if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges.erase(std::remove_if(edges.begin(), edges.end(),
                               [](const auto& e) { return e.first == e.second; }),
                edges.end());
    return edges;
}

NormalizedAdjacency normalize_adjacency(const Graph& g, NormMode mode) {
    const int n = g.n;
    Mat ahat = Mat::Identity(n, n);
    for (auto [i, j] : g.edges) {
        ahat(i, j) = 1.0;
        ahat(j, i) = 1.0;
    }
    Vec deg = ahat.rowwise().sum();
    Mat out(n, n);
    if (mode == NormMode::sym) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out(i, j) = ahat(i, j) == 0.0 ? 0.0 : ahat(i, j) / std::sqrt(deg(i) * deg(j));
    } else {
        for (int i = 0; i < n; ++i) out.row(i) = ahat.row(i) / deg(i);
    }
    return NormalizedAdjacency{mode, std::move(out)};
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

bool blank_or_comment(const std::string& line) {
    for (char c : line) {
        if (c == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

// "node,value" files; returns -1-filled vector of size n
std::vector<int> load_id_value_csv(const std::string& path, int n, const char* what) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error(std::string("cannot open ") + what + " file: " + path);
    std::vector<int> values(static_cast<size_t>(n), -1);
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (blank_or_comment(line)) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != 2)
            throw std::runtime_error(std::string(what) + " file " + path + ":" +
                                     std::to_string(lineno) + ": expected \"node,value\"");
        const int node = std::stoi(cells[0]);
        const int value = std::stoi(cells[1]);
        if (node < 0 || node >= n)
            throw std::runtime_error(std::string(what) + " file " + path + ":" +
                                     std::to_string(lineno) + ": node " + std::to_string(node) +
                                     " out of range (n=" + std::to_string(n) + ")");
        if (seen[static_cast<size_t>(node)])
            throw std::runtime_error(std::string(what) + " file " + path + ":" +
                                     std::to_string(lineno) + ": duplicate node " +
                                     std::to_string(node));
        if (value < 0)
            throw std::runtime_error(std::string(what) + " file " + path + ":" +
                                     std::to_string(lineno) + ": negative value");
        seen[static_cast<size_t>(node)] = 1;
        values[static_cast<size_t>(node)] = value;
    }
    return values;
}

int category_count(const std::vector<int>& v) {
    int m = -1;
    for (int x : v) m = std::max(m, x);
    return m + 1;
}

}  // namespace

Graph load_graph(const std::string& edges_path, const std::string& features_path,
                 const std::string& labels_path, const std::string& attrs_path) {
    Graph g;

    {
        std::ifstream in(features_path);
        if (!in) throw std::runtime_error("cannot open features file: " + features_path);
        std::vector<std::vector<double>> rows;
        std::string line;
        int lineno = 0;
        size_t width = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (blank_or_comment(line)) continue;
            auto cells = split_csv_line(line);
            if (rows.empty())
                width = cells.size();
            else if (cells.size() != width)
                throw std::runtime_error("features file " + features_path + ":" +
                                         std::to_string(lineno) + ": ragged row (" +
                                         std::to_string(cells.size()) + " cells, expected " +
                                         std::to_string(width) + ")");
            std::vector<double> row;
            row.reserve(cells.size());
            for (const auto& c : cells) row.push_back(std::stod(c));
            rows.push_back(std::move(row));
        }
        if (rows.empty()) throw std::runtime_error("features file is empty: " + features_path);
        g.n = static_cast<int>(rows.size());
        g.features.resize(g.n, static_cast<Eigen::Index>(width));
        for (int i = 0; i < g.n; ++i)
            for (size_t j = 0; j < width; ++j)
                g.features(i, static_cast<Eigen::Index>(j)) = rows[static_cast<size_t>(i)][j];
    }

    {
        std::ifstream in(edges_path);
        if (!in) throw std::runtime_error("cannot open edges file: " + edges_path);
        std::vector<std::pair<int, int>> edges;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (blank_or_comment(line)) continue;
            std::istringstream ss(line);
            int a, b;
            if (!(ss >> a >> b))
                throw std::runtime_error("edges file " + edges_path + ":" + std::to_string(lineno) +
                                         ": expected \"src dst\"");
            if (a < 0 || b < 0 || a >= g.n || b >= g.n)
                throw std::runtime_error("edges file " + edges_path + ":" + std::to_string(lineno) +
                                         ": endpoint out of range (n=" + std::to_string(g.n) + ")");
            if (a != b) edges.emplace_back(a, b);
        }
        g.edges = canonical_edges(std::move(edges));
    }

    if (!labels_path.empty()) {
        g.labels = load_id_value_csv(labels_path, g.n, "labels");
        g.n_classes = category_count(g.labels);
    }
    if (!attrs_path.empty()) {
        g.attrs = load_id_value_csv(attrs_path, g.n, "attributes");
        g.n_attr_classes = category_count(g.attrs);
    }
    g.validate();
    return g;
}

void save_graph(const Graph& g, const std::string& edges_path, const std::string& features_path,
                const std::string& labels_path, const std::string& attrs_path) {
    {
        std::ofstream out(edges_path);
        if (!out) throw std::runtime_error("cannot write edges file: " + edges_path);
        for (auto [i, j] : g.edges) out << i << " " << j << "\n";
    }
    {
        std::ofstream out(features_path);
        if (!out) throw std::runtime_error("cannot write features file: " + features_path);
        char buf[64];
        for (int i = 0; i < g.n; ++i) {
            for (int j = 0; j < g.feature_dim(); ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", g.features(i, j));
                out << (j ? "," : "") << buf;
            }
            out << "\n";
        }
    }
    if (!labels_path.empty() && !g.labels.empty()) {
        std::ofstream out(labels_path);
        if (!out) throw std::runtime_error("cannot write labels file: " + labels_path);
        for (int i = 0; i < g.n; ++i)
            if (g.labels[static_cast<size_t>(i)] >= 0)
                out << i << "," << g.labels[static_cast<size_t>(i)] << "\n";
    }
    if (!attrs_path.empty() && !g.attrs.empty()) {
        std::ofstream out(attrs_path);
        if (!out) throw std::runtime_error("cannot write attributes file: " + attrs_path);
        for (int i = 0; i < g.n; ++i)
            if (g.attrs[static_cast<size_t>(i)] >= 0)
                out << i << "," << g.attrs[static_cast<size_t>(i)] << "\n";
    }
}

Graph induced_subgraph(const Graph& g, const std::vector<int>& sorted_ids) {
    if (!std::is_sorted(sorted_ids.begin(), sorted_ids.end()) ||
        std::adjacent_find(sorted_ids.begin(), sorted_ids.end()) != sorted_ids.end())
        throw std::invalid_argument("induced_subgraph: node ids must be sorted and unique");
    std::vector<int> remap(static_cast<size_t>(g.n), -1);
    for (int k = 0; k < static_cast<int>(sorted_ids.size()); ++k) {
        const int id = sorted_ids[static_cast<size_t>(k)];
        if (id < 0 || id >= g.n) throw std::invalid_argument("induced_subgraph: node id out of range");
        remap[static_cast<size_t>(id)] = k;
    }

    Graph s;
    s.n = static_cast<int>(sorted_ids.size());
    s.n_classes = g.n_classes;
    s.n_attr_classes = g.n_attr_classes;
    s.features.resize(s.n, g.features.cols());
    for (int k = 0; k < s.n; ++k) s.features.row(k) = g.features.row(sorted_ids[static_cast<size_t>(k)]);

    for (auto [i, j] : g.edges) {
        const int a = remap[static_cast<size_t>(i)], b = remap[static_cast<size_t>(j)];
        if (a >= 0 && b >= 0) s.edges.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(s.edges.begin(), s.edges.end());

    auto carry_int = [&](const std::vector<int>& src) {
        std::vector<int> dst;
        if (src.empty()) return dst;
        dst.resize(static_cast<size_t>(s.n));
        for (int k = 0; k < s.n; ++k)
            dst[static_cast<size_t>(k)] = src[static_cast<size_t>(sorted_ids[static_cast<size_t>(k)])];
        return dst;
    };
    auto carry_mask = [&](const std::vector<char>& src) {
        std::vector<char> dst;
        if (src.empty()) return dst;
        dst.resize(static_cast<size_t>(s.n));
        for (int k = 0; k < s.n; ++k)
            dst[static_cast<size_t>(k)] = src[static_cast<size_t>(sorted_ids[static_cast<size_t>(k)])];
        return dst;
    };
    s.labels = carry_int(g.labels);
    s.attrs = carry_int(g.attrs);
    s.train_mask = carry_mask(g.train_mask);
    s.val_mask = carry_mask(g.val_mask);
    s.test_mask = carry_mask(g.test_mask);
    return s;
}

SplitResult split_disjoint(const Graph& g, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("split_disjoint: fraction must be in (0,1)");
    const int k = static_cast<int>(std::lround(fraction * g.n));
    if (k <= 0 || k >= g.n)
        throw std::invalid_argument("split_disjoint: fraction " + std::to_string(fraction) +
                                    " produces an empty side on n=" + std::to_string(g.n));
    std::vector<int> ids(static_cast<size_t>(g.n));
    std::iota(ids.begin(), ids.end(), 0);
    Rng rng(seed);
    for (int i = g.n - 1; i > 0; --i)
        std::swap(ids[static_cast<size_t>(i)], ids[static_cast<size_t>(rng.uniform_index(i + 1))]);

    SplitResult r;
    r.a_ids.assign(ids.begin(), ids.begin() + k);
    r.b_ids.assign(ids.begin() + k, ids.end());
    std::sort(r.a_ids.begin(), r.a_ids.end());
    std::sort(r.b_ids.begin(), r.b_ids.end());
    r.a = induced_subgraph(g, r.a_ids);
    r.b = induced_subgraph(g, r.b_ids);
    return r;
}

Graph make_inductive_masks(Graph g, int n_train, int n_val, int n_test, std::uint64_t seed) {
    std::vector<int> pool;
    if (g.labels.empty()) {
        pool.resize(static_cast<size_t>(g.n));
        std::iota(pool.begin(), pool.end(), 0);
    } else {
        for (int i = 0; i < g.n; ++i)
            if (g.labels[static_cast<size_t>(i)] >= 0) pool.push_back(i);
    }
    if (n_train < 0 || n_val < 0 || n_test < 0 ||
        n_train + n_val + n_test > static_cast<int>(pool.size()))
        throw std::invalid_argument("make_inductive_masks: counts " + std::to_string(n_train) + "+" +
                                    std::to_string(n_val) + "+" + std::to_string(n_test) +
                                    " exceed available nodes (" + std::to_string(pool.size()) + ")");
    Rng rng(seed);
    for (int i = static_cast<int>(pool.size()) - 1; i > 0; --i)
        std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(rng.uniform_index(i + 1))]);

    g.train_mask.assign(static_cast<size_t>(g.n), 0);
    g.val_mask.assign(static_cast<size_t>(g.n), 0);
    g.test_mask.assign(static_cast<size_t>(g.n), 0);
    int k = 0;
    for (int i = 0; i < n_train; ++i) g.train_mask[static_cast<size_t>(pool[static_cast<size_t>(k++)])] = 1;
    for (int i = 0; i < n_val; ++i) g.val_mask[static_cast<size_t>(pool[static_cast<size_t>(k++)])] = 1;
    for (int i = 0; i < n_test; ++i) g.test_mask[static_cast<size_t>(pool[static_cast<size_t>(k++)])] = 1;
    return g;
}

Graph subsample(const Graph& g, int max_nodes, std::uint64_t seed) {
    if (max_nodes <= 0 || g.n <= max_nodes) return g;
    std::vector<int> ids(static_cast<size_t>(g.n));
    std::iota(ids.begin(), ids.end(), 0);
    Rng rng(seed);
    for (int i = g.n - 1; i > 0; --i)
        std::swap(ids[static_cast<size_t>(i)], ids[static_cast<size_t>(rng.uniform_index(i + 1))]);
    ids.resize(static_cast<size_t>(max_nodes));
    std::sort(ids.begin(), ids.end());
    return induced_subgraph(g, ids);
}

Graph generate_sbm(const SbmConfig& cfg) {
    const int blocks = static_cast<int>(cfg.block_sizes.size());
    if (blocks == 0) throw std::invalid_argument("generate_sbm: no blocks");
    for (int b : cfg.block_sizes)
        if (b <= 0) throw std::invalid_argument("generate_sbm: empty block");
    if (cfg.p_inter < 0.0 || cfg.p_inter > cfg.p_intra || cfg.p_intra > 1.0)
        throw std::invalid_argument("generate_sbm: need 0 <= p_inter <= p_intra <= 1");
    if (cfg.feature_dim < blocks)
        throw std::invalid_argument("generate_sbm: feature_dim must be >= number of blocks");
    if (cfg.attr_correlation < 0.0 || cfg.attr_correlation > 1.0)
        throw std::invalid_argument("generate_sbm: attr_correlation must be in [0,1]");

    Graph g;
    g.n = std::accumulate(cfg.block_sizes.begin(), cfg.block_sizes.end(), 0);
    g.n_classes = blocks;
    g.n_attr_classes = 2;
    g.labels.resize(static_cast<size_t>(g.n));
    {
        int node = 0;
        for (int b = 0; b < blocks; ++b)
            for (int i = 0; i < cfg.block_sizes[static_cast<size_t>(b)]; ++i)
                g.labels[static_cast<size_t>(node++)] = b;
    }

    Rng edge_rng = derived_rng(cfg.seed, "sbm-edges");
    for (int i = 0; i < g.n; ++i) {
        for (int j = i + 1; j < g.n; ++j) {
            const double p = g.labels[static_cast<size_t>(i)] == g.labels[static_cast<size_t>(j)]
                                 ? cfg.p_intra
                                 : cfg.p_inter;
            if (edge_rng.bernoulli(p)) g.edges.emplace_back(i, j);
        }
    }

    Rng feat_rng = derived_rng(cfg.seed, "sbm-features");
    g.features.resize(g.n, cfg.feature_dim);
    for (int i = 0; i < g.n; ++i)
        for (int j = 0; j < cfg.feature_dim; ++j) g.features(i, j) = feat_rng.normal();
    for (int i = 0; i < g.n; ++i)
        g.features(i, g.labels[static_cast<size_t>(i)]) += cfg.class_signal;

    Rng attr_rng = derived_rng(cfg.seed, "sbm-attrs");
    g.attrs.resize(static_cast<size_t>(g.n));
    const double flip = (1.0 - cfg.attr_correlation) / 2.0;
    for (int i = 0; i < g.n; ++i) {
        const int parity = g.labels[static_cast<size_t>(i)] % 2;
        g.attrs[static_cast<size_t>(i)] = attr_rng.bernoulli(flip) ? 1 - parity : parity;
    }

    g.validate();
    return g;
}

}  // namespace gea
