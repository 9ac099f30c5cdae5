#include "gea/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "gea/attack_attribute.hpp"
#include "gea/metrics.hpp"
#include "gea/rng.hpp"

namespace fs = std::filesystem;

namespace gea {

bool AttacksConfig::wants(const std::string& name) const {
    return std::find(list.begin(), list.end(), name) != list.end();
}

namespace {

const std::set<std::string> kAttackNames = {"confidence", "shadow", "whitebox", "reconstruct",
                                            "attribute"};

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

[[noreturn]] void bad_key(const std::string& section, const std::string& key,
                          const std::string& why) {
    throw ConfigError("config error at [" + section + "]." + key + ": " + why);
}

int to_int(const std::string& section, const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        bad_key(section, key, "expected integer, got \"" + v + "\"");
    }
}

double to_double(const std::string& section, const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        bad_key(section, key, "expected number, got \"" + v + "\"");
    }
}

std::uint64_t to_u64(const std::string& section, const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return static_cast<std::uint64_t>(x);
    } catch (...) {
        bad_key(section, key, "expected unsigned integer, got \"" + v + "\"");
    }
}

bool to_bool(const std::string& section, const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_key(section, key, "expected boolean, got \"" + v + "\"");
}

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void apply_kv(ExperimentConfig& c, const std::string& section, const std::string& key,
              const std::string& value) {
    auto& d = c.dataset;
    auto& m = c.model;
    auto& a = c.attacks;
    auto& r = c.run;
    if (section == "dataset") {
        if (key == "kind") d.kind = value;
        else if (key == "edges") d.edges = value;
        else if (key == "features") d.features = value;
        else if (key == "labels") d.labels = value;
        else if (key == "attributes") d.attributes = value;
        else if (key == "max_nodes") d.max_nodes = to_int(section, key, value);
        else if (key == "blocks") {
            d.blocks.clear();
            for (const auto& s : split_list(value)) d.blocks.push_back(to_int(section, key, s));
        }
        else if (key == "p_intra") d.p_intra = to_double(section, key, value);
        else if (key == "p_inter") d.p_inter = to_double(section, key, value);
        else if (key == "feature_dim") d.feature_dim = to_int(section, key, value);
        else if (key == "class_signal") d.class_signal = to_double(section, key, value);
        else if (key == "attr_correlation") d.attr_correlation = to_double(section, key, value);
        else if (key == "train") d.n_train = to_int(section, key, value);
        else if (key == "val") d.n_val = to_int(section, key, value);
        else if (key == "test") d.n_test = to_int(section, key, value);
        else bad_key(section, key, "unknown key");
    } else if (section == "model") {
        if (key == "kind") m.kind = value;
        else if (key == "layers") m.gnn.num_layers = to_int(section, key, value);
        else if (key == "hidden") {
            m.gnn.hidden_dims.clear();
            for (const auto& s : split_list(value)) m.gnn.hidden_dims.push_back(to_int(section, key, s));
        }
        else if (key == "embedding_layer") m.gnn.embedding_layer = to_int(section, key, value);
        else if (key == "dropout") m.gnn.dropout = to_double(section, key, value);
        else if (key == "epochs") m.gnn.epochs = to_int(section, key, value);
        else if (key == "lr") m.gnn.lr = to_double(section, key, value);
        else if (key == "optimizer") {
            if (value == "adam") m.gnn.optimizer = OptKind::adam;
            else if (value == "sgd") m.gnn.optimizer = OptKind::sgd;
            else bad_key(section, key, "expected adam|sgd");
        }
        else if (key == "walks_per_node") m.walk.walks_per_node = to_int(section, key, value);
        else if (key == "walk_length") m.walk.walk_length = to_int(section, key, value);
        else if (key == "window") m.walk.window = to_int(section, key, value);
        else if (key == "dim") m.walk.dim = to_int(section, key, value);
        else if (key == "negatives") m.walk.negatives = to_int(section, key, value);
        else if (key == "p") m.walk.p = to_double(section, key, value);
        else if (key == "q") m.walk.q = to_double(section, key, value);
        else if (key == "walk_epochs") m.walk.epochs = to_int(section, key, value);
        else if (key == "walk_lr") m.walk.lr = to_double(section, key, value);
        else if (key == "normalize") m.walk.normalize = to_bool(section, key, value);
        else bad_key(section, key, "unknown key");
    } else if (section == "attacks") {
        if (key == "list") a.list = split_list(value);
        else if (key == "aux_fraction") a.aux_fraction = to_double(section, key, value);
        else if (key == "threshold") {
            if (value.empty()) a.confidence_threshold.reset();
            else a.confidence_threshold = to_double(section, key, value);
        }
        else if (key == "classifier") {
            try {
                a.classifier = classifier_kind_from_name(value);
            } catch (const std::exception&) {
                bad_key(section, key, "expected logreg|mlp");
            }
        }
        else if (key == "classifier_hidden") a.classifier_hidden = to_int(section, key, value);
        else if (key == "classifier_epochs") a.classifier_epochs = to_int(section, key, value);
        else if (key == "classifier_lr") a.classifier_lr = to_double(section, key, value);
        else if (key == "anchors") a.anchors = to_int(section, key, value);
        else if (key == "ae_hidden") a.ae_hidden = to_int(section, key, value);
        else if (key == "ae_epochs") a.ae_epochs = to_int(section, key, value);
        else if (key == "ae_lr") a.ae_lr = to_double(section, key, value);
        else if (key == "decoder") {
            try {
                a.decoder = decoder_from_name(value);
            } catch (const std::exception&) {
                bad_key(section, key, "expected inner_product|bilinear");
            }
        }
        else if (key == "recon_loss") {
            if (value == "weighted_bce") a.recon_loss = ReconLoss::weighted_bce;
            else if (value == "squared") a.recon_loss = ReconLoss::squared;
            else bad_key(section, key, "expected weighted_bce|squared");
        }
        else if (key == "recon_hidden") a.recon_hidden = to_int(section, key, value);
        else if (key == "recon_dim") a.recon_dim = to_int(section, key, value);
        else if (key == "recon_epochs") a.recon_epochs = to_int(section, key, value);
        else if (key == "recon_lr") a.recon_lr = to_double(section, key, value);
        else if (key == "threshold_policy") {
            if (value != "fixed" && value != "density") bad_key(section, key, "expected fixed|density");
            a.threshold_policy = value;
        }
        else if (key == "tau") a.recon_tau = to_double(section, key, value);
        else bad_key(section, key, "unknown key");
    } else if (section == "run") {
        if (key == "seeds") {
            r.seeds.clear();
            for (const auto& s : split_list(value)) r.seeds.push_back(to_u64(section, key, s));
        }
        else if (key == "out") r.out = value;
        else if (key == "jobs") r.jobs = to_int(section, key, value);
        else bad_key(section, key, "unknown key");
    } else {
        throw ConfigError("config error at [" + section + "]: unknown section");
    }
}

}  // namespace

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config error at line " + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config error at line " + std::to_string(lineno) +
                              ": expected key = value");
        if (section.empty())
            throw ConfigError("config error at line " + std::to_string(lineno) +
                              ": key outside any [section]");
        apply_kv(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config error: cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

ExperimentConfig ExperimentConfig::from_echo(const nlohmann::json& echo) {
    ExperimentConfig cfg;
    for (const auto& [section, kv] : echo.items())
        for (const auto& [key, value] : kv.items())
            apply_kv(cfg, section, key, value.get<std::string>());
    cfg.validate();
    return cfg;
}

nlohmann::json ExperimentConfig::echo() const {
    auto join_ints = [](const std::vector<int>& v) {
        std::string s;
        for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
        return s;
    };
    nlohmann::json j;
    j["dataset"] = {{"kind", dataset.kind},
                    {"edges", dataset.edges},
                    {"features", dataset.features},
                    {"labels", dataset.labels},
                    {"attributes", dataset.attributes},
                    {"max_nodes", std::to_string(dataset.max_nodes)},
                    {"blocks", join_ints(dataset.blocks)},
                    {"p_intra", fmt_double(dataset.p_intra)},
                    {"p_inter", fmt_double(dataset.p_inter)},
                    {"feature_dim", std::to_string(dataset.feature_dim)},
                    {"class_signal", fmt_double(dataset.class_signal)},
                    {"attr_correlation", fmt_double(dataset.attr_correlation)},
                    {"train", std::to_string(dataset.n_train)},
                    {"val", std::to_string(dataset.n_val)},
                    {"test", std::to_string(dataset.n_test)}};
    j["model"] = {{"kind", model.kind},
                  {"layers", std::to_string(model.gnn.num_layers)},
                  {"hidden", join_ints(model.gnn.hidden_dims)},
                  {"embedding_layer", std::to_string(model.gnn.embedding_layer)},
                  {"dropout", fmt_double(model.gnn.dropout)},
                  {"epochs", std::to_string(model.gnn.epochs)},
                  {"lr", fmt_double(model.gnn.lr)},
                  {"optimizer", model.gnn.optimizer == OptKind::adam ? "adam" : "sgd"},
                  {"walks_per_node", std::to_string(model.walk.walks_per_node)},
                  {"walk_length", std::to_string(model.walk.walk_length)},
                  {"window", std::to_string(model.walk.window)},
                  {"dim", std::to_string(model.walk.dim)},
                  {"negatives", std::to_string(model.walk.negatives)},
                  {"p", fmt_double(model.walk.p)},
                  {"q", fmt_double(model.walk.q)},
                  {"walk_epochs", std::to_string(model.walk.epochs)},
                  {"walk_lr", fmt_double(model.walk.lr)},
                  {"normalize", model.walk.normalize ? "true" : "false"}};
    nlohmann::json ja = {{"list", [&] {
                              std::string s;
                              for (size_t i = 0; i < attacks.list.size(); ++i)
                                  s += (i ? "," : "") + attacks.list[i];
                              return s;
                          }()},
                         {"aux_fraction", fmt_double(attacks.aux_fraction)},
                         {"classifier", classifier_kind_name(attacks.classifier)},
                         {"classifier_hidden", std::to_string(attacks.classifier_hidden)},
                         {"classifier_epochs", std::to_string(attacks.classifier_epochs)},
                         {"classifier_lr", fmt_double(attacks.classifier_lr)},
                         {"anchors", std::to_string(attacks.anchors)},
                         {"ae_hidden", std::to_string(attacks.ae_hidden)},
                         {"ae_epochs", std::to_string(attacks.ae_epochs)},
                         {"ae_lr", fmt_double(attacks.ae_lr)},
                         {"decoder", decoder_name(attacks.decoder)},
                         {"recon_loss", attacks.recon_loss == ReconLoss::weighted_bce
                                            ? "weighted_bce"
                                            : "squared"},
                         {"recon_hidden", std::to_string(attacks.recon_hidden)},
                         {"recon_dim", std::to_string(attacks.recon_dim)},
                         {"recon_epochs", std::to_string(attacks.recon_epochs)},
                         {"recon_lr", fmt_double(attacks.recon_lr)},
                         {"threshold_policy", attacks.threshold_policy},
                         {"tau", fmt_double(attacks.recon_tau)}};
    if (attacks.confidence_threshold) ja["threshold"] = fmt_double(*attacks.confidence_threshold);
    j["attacks"] = ja;
    j["run"] = {{"seeds", [&] {
                     std::string s;
                     for (size_t i = 0; i < run.seeds.size(); ++i)
                         s += (i ? "," : "") + std::to_string(run.seeds[i]);
                     return s;
                 }()},
                {"out", run.out},
                {"jobs", std::to_string(run.jobs)}};
    return j;
}

void ExperimentConfig::validate() const {
    if (dataset.kind != "sbm" && dataset.kind != "files")
        throw ConfigError("config error at [dataset].kind: expected sbm|files");
    if (dataset.kind == "files") {
        if (dataset.edges.empty() || dataset.features.empty())
            throw ConfigError("config error at [dataset]: files mode needs edges and features paths");
        for (const std::string& p : {dataset.edges, dataset.features}) {
            if (!fs::exists(p))
                throw ConfigError("config error at [dataset]: path does not exist: " + p);
        }
        for (const std::string& p : {dataset.labels, dataset.attributes}) {
            if (!p.empty() && !fs::exists(p))
                throw ConfigError("config error at [dataset]: path does not exist: " + p);
        }
    } else {
        if (dataset.blocks.empty())
            throw ConfigError("config error at [dataset].blocks: need at least one block");
        for (int b : dataset.blocks)
            if (b <= 0) throw ConfigError("config error at [dataset].blocks: block sizes must be positive");
        if (dataset.p_inter < 0 || dataset.p_inter > dataset.p_intra || dataset.p_intra > 1)
            throw ConfigError("config error at [dataset]: need 0 <= p_inter <= p_intra <= 1");
        if (dataset.feature_dim < static_cast<int>(dataset.blocks.size()))
            throw ConfigError("config error at [dataset].feature_dim: must be >= block count");
        if (dataset.attr_correlation < 0 || dataset.attr_correlation > 1)
            throw ConfigError("config error at [dataset].attr_correlation: must be in [0,1]");
    }
    if (dataset.n_train < 0 || dataset.n_val < 0 || dataset.n_test < 0)
        throw ConfigError("config error at [dataset]: mask sizes must be >= 0");

    const bool gnn_kind = model.kind == "gcn" || model.kind == "sage";
    const bool walk_kind = model.kind == "deepwalk" || model.kind == "node2vec";
    if (!gnn_kind && !walk_kind)
        throw ConfigError("config error at [model].kind: expected gcn|sage|deepwalk|node2vec");
    try {
        if (gnn_kind) {
            GnnConfig g = model.gnn;
            g.arch = arch_from_name(model.kind);
            g.validate();
        } else {
            model.walk.validate();
        }
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config error at [model]: ") + e.what());
    }
    if (model.kind == "deepwalk" && (model.walk.p != 1.0 || model.walk.q != 1.0))
        throw ConfigError("config error at [model]: deepwalk requires p = q = 1 (use node2vec)");

    for (const auto& name : attacks.list)
        if (!kAttackNames.count(name))
            throw ConfigError("config error at [attacks].list: unknown attack \"" + name + "\"");
    const bool membership = attacks.wants("confidence") || attacks.wants("shadow") ||
                            attacks.wants("whitebox");
    if (membership && !gnn_kind)
        throw ConfigError("config error at [attacks].list: membership attacks need a gcn|sage target");
    if (membership && dataset.kind == "sbm" && dataset.n_train == 0)
        throw ConfigError("config error at [dataset].train: membership attacks need train nodes");
    if (attacks.wants("attribute") && dataset.kind == "files" && dataset.attributes.empty())
        throw ConfigError(
            "config error at [attacks].list: attribute attack needs [dataset].attributes");
    if (attacks.wants("shadow") && dataset.kind == "files" && dataset.labels.empty())
        throw ConfigError("config error at [attacks].list: shadow attack needs [dataset].labels");
    if (attacks.aux_fraction <= 0.0 || attacks.aux_fraction >= 1.0)
        throw ConfigError("config error at [attacks].aux_fraction: must be in (0,1)");
    if (attacks.confidence_threshold &&
        (*attacks.confidence_threshold < 0.0 || *attacks.confidence_threshold > 1.0))
        throw ConfigError("config error at [attacks].threshold: must be in [0,1]");
    if (attacks.anchors < 1)
        throw ConfigError("config error at [attacks].anchors: must be >= 1");
    if (attacks.recon_dim < 1 || attacks.recon_hidden < 1 || attacks.ae_hidden < 1 ||
        attacks.classifier_hidden < 1)
        throw ConfigError("config error at [attacks]: widths must be >= 1");
    if (attacks.recon_epochs < 0 || attacks.ae_epochs < 0 || attacks.classifier_epochs < 0)
        throw ConfigError("config error at [attacks]: epochs must be >= 0");
    if (attacks.recon_tau < 0.0 || attacks.recon_tau > 1.0)
        throw ConfigError("config error at [attacks].tau: must be in [0,1]");

    if (run.seeds.empty()) throw ConfigError("config error at [run].seeds: need at least one seed");
    if (run.jobs < 1) throw ConfigError("config error at [run].jobs: must be >= 1");
}

Graph build_dataset(const ExperimentConfig& cfg, std::uint64_t seed) {
    if (cfg.dataset.kind == "sbm") {
        SbmConfig sc;
        sc.block_sizes = cfg.dataset.blocks;
        sc.p_intra = cfg.dataset.p_intra;
        sc.p_inter = cfg.dataset.p_inter;
        sc.feature_dim = cfg.dataset.feature_dim;
        sc.class_signal = cfg.dataset.class_signal;
        sc.attr_correlation = cfg.dataset.attr_correlation;
        sc.seed = derive_seed(seed, "graph");
        return generate_sbm(sc);
    }
    Graph g = load_graph(cfg.dataset.edges, cfg.dataset.features, cfg.dataset.labels,
                         cfg.dataset.attributes);
    return subsample(g, cfg.dataset.max_nodes, derive_seed(seed, "subsample"));
}

SeedArtifacts build_seed_artifacts(const ExperimentConfig& cfg, std::uint64_t seed) {
    SeedArtifacts art;
    art.seed = seed;
    art.full = build_dataset(cfg, seed);

    SplitResult split = split_disjoint(art.full, cfg.attacks.aux_fraction, derive_seed(seed, "split"));
    art.aux = std::move(split.a);
    art.aux_ids = std::move(split.a_ids);
    art.target = std::move(split.b);
    art.target_ids = std::move(split.b_ids);

    if (cfg.model.is_gnn()) {
        const int want = cfg.dataset.n_train + cfg.dataset.n_val + cfg.dataset.n_test;
        if (want > art.target.n)
            throw ConfigError("config error at [dataset]: train+val+test (" + std::to_string(want) +
                              ") exceeds target-side nodes (" + std::to_string(art.target.n) +
                              "); lower the mask sizes or aux_fraction");
        art.target = make_inductive_masks(std::move(art.target), cfg.dataset.n_train,
                                          cfg.dataset.n_val, cfg.dataset.n_test,
                                          derive_seed(seed, "masks"));
        GnnConfig gc = cfg.model.gnn;
        gc.arch = arch_from_name(cfg.model.kind);
        gc.seed = derive_seed(seed, "target-model");
        art.model = train_classifier(art.target, gc);
        art.has_model = true;
        art.released = extract_embeddings(art.model, art.target, gc.embedding_layer);
        art.has_released = true;
        if (cfg.attacks.wants("attribute")) {
            art.full_embeddings = extract_embeddings(art.model, art.full, gc.embedding_layer);
            art.has_full_embeddings = true;
        }
    } else {
        WalkConfig wc = cfg.model.walk;
        if (cfg.model.kind == "deepwalk") wc.p = wc.q = 1.0;
        if (cfg.attacks.wants("reconstruct") || cfg.attacks.wants("attribute")) {
            WalkConfig target_cfg = wc;
            target_cfg.seed = derive_seed(seed, "walk-embeddings");
            art.released = train_walk_embeddings(art.target, target_cfg).embeddings;
            art.has_released = true;
        }
        if (cfg.attacks.wants("attribute")) {
            WalkConfig full_cfg = wc;
            full_cfg.seed = derive_seed(seed, "walk-full");
            art.full_embeddings = train_walk_embeddings(art.full, full_cfg).embeddings;
            art.has_full_embeddings = true;
        }
    }
    return art;
}

namespace {

nlohmann::json attack_confidence(const ExperimentConfig& cfg, const SeedArtifacts& art) {
    if (!art.has_model) throw AttackError("confidence attack requires a trained gcn/sage target");
    const MembershipEval eval =
        balanced_membership_eval(art.target, derive_seed(art.seed, "eval-confidence"));
    const Mat preds = predict(art.model, art.target, eval.node_ids);
    AttackResult r = confidence_attack(preds, eval.truth, cfg.attacks.confidence_threshold,
                                       derive_seed(art.seed, "attack-confidence"));
    return r.to_json();
}

nlohmann::json attack_shadow(const ExperimentConfig& cfg, const SeedArtifacts& art) {
    if (!art.has_model) throw AttackError("shadow attack requires a trained gcn/sage target");
    ShadowAttackConfig sc;
    sc.shadow_model = cfg.model.gnn;
    sc.shadow_model.arch = arch_from_name(cfg.model.kind);
    sc.attack_model.kind = cfg.attacks.classifier;
    sc.attack_model.hidden = cfg.attacks.classifier_hidden;
    sc.attack_model.epochs = cfg.attacks.classifier_epochs;
    sc.attack_model.lr = cfg.attacks.classifier_lr;
    sc.seed = derive_seed(art.seed, "attack-shadow");
    const MembershipEval eval =
        balanced_membership_eval(art.target, derive_seed(art.seed, "eval-shadow"));
    const NodeClassifier& model = art.model;
    const Graph& target = art.target;
    PredictOracle oracle = [&model, &target](const std::vector<int>& ids) {
        return predict(model, target, ids);
    };
    try {
        AttackResult r = shadow_attack(oracle, art.aux, sc, eval);
        return r.to_json();
    } catch (const std::invalid_argument& e) {
        throw AttackError(e.what());
    }
}

nlohmann::json attack_whitebox(const ExperimentConfig& cfg, const SeedArtifacts& art) {
    if (!art.has_released || !art.has_model)
        throw AttackError("whitebox attack requires released gcn/sage embeddings");
    const std::vector<int> members = art.target.train_nodes();
    const std::vector<int> nonmembers = art.target.test_nodes();
    if (members.empty() || nonmembers.empty())
        throw AttackError("whitebox attack requires train and test masks on the target graph");

    std::vector<int> ids = members;
    ids.insert(ids.end(), nonmembers.begin(), nonmembers.end());
    const Mat rows = art.released.select(ids);
    std::vector<int> truth(ids.size(), 0);
    for (size_t i = 0; i < members.size(); ++i) truth[i] = 1;

    const int per_side = std::min({cfg.attacks.anchors, static_cast<int>(members.size()) - 1,
                                   static_cast<int>(nonmembers.size()) - 1});
    if (per_side < 1) throw AttackError("whitebox attack: anchor budget exceeds available nodes");
    Rng anchor_rng = derived_rng(art.seed, "anchors");
    auto pick = [&anchor_rng](int count, int offset, int pool) {
        std::vector<int> idx(static_cast<size_t>(pool));
        std::iota(idx.begin(), idx.end(), offset);
        for (int i = pool - 1; i > 0; --i)
            std::swap(idx[static_cast<size_t>(i)],
                      idx[static_cast<size_t>(anchor_rng.uniform_index(i + 1))]);
        idx.resize(static_cast<size_t>(count));
        return idx;
    };
    std::vector<int> anchor_idx = pick(per_side, 0, static_cast<int>(members.size()));
    std::vector<int> anchor_bits(anchor_idx.size(), 1);
    for (int i : pick(per_side, static_cast<int>(members.size()),
                      static_cast<int>(nonmembers.size()))) {
        anchor_idx.push_back(i);
        anchor_bits.push_back(0);
    }

    WhiteboxAttackConfig wc;
    wc.hidden = cfg.attacks.ae_hidden;
    wc.epochs = cfg.attacks.ae_epochs;
    wc.lr = cfg.attacks.ae_lr;
    wc.seed = derive_seed(art.seed, "attack-whitebox");
    try {
        AttackResult r = whitebox_attack(rows, anchor_idx, anchor_bits, truth, wc);
        return r.to_json();
    } catch (const std::invalid_argument& e) {
        throw AttackError(e.what());
    }
}

nlohmann::json attack_reconstruct(const ExperimentConfig& cfg, const SeedArtifacts& art) {
    if (!art.has_released) throw AttackError("reconstruction attack requires released embeddings");
    if (art.aux.edges.empty()) throw AttackError("reconstruction attack: aux graph has no edges");

    GaeConfig gc;
    gc.hidden = cfg.attacks.recon_hidden;
    gc.emb_dim = cfg.attacks.decoder == DecoderMode::bilinear ? art.released.dim()
                                                              : cfg.attacks.recon_dim;
    gc.epochs = cfg.attacks.recon_epochs;
    gc.lr = cfg.attacks.recon_lr;
    gc.decoder = cfg.attacks.decoder;
    gc.loss = cfg.attacks.recon_loss;
    gc.seed = derive_seed(art.seed, "attack-reconstruct");
    const GraphAutoencoder ae = train_autoencoder(art.aux, gc);

    ThresholdPolicy policy;
    if (cfg.attacks.threshold_policy == "fixed") {
        policy.kind = ThresholdPolicy::Kind::fixed;
        policy.fixed_tau = cfg.attacks.recon_tau;
    } else {
        policy.kind = ThresholdPolicy::Kind::density;
        const double pairs = static_cast<double>(art.aux.n) * (art.aux.n - 1) / 2.0;
        policy.density = pairs > 0 ? static_cast<double>(art.aux.edges.size()) / pairs : 0.0;
    }
    ReconstructionResult rr = reconstruct_target(ae, art.released.rows, policy, &art.target,
                                                 derive_seed(art.seed, "recon-eval"));
    nlohmann::json j = rr.to_json();
    j["aux_training_auc"] = ae.history_auc;
    j["aux_training_ap"] = ae.history_ap;
    j["seed"] = art.seed;
    return j;
}

nlohmann::json attack_attribute_json(const ExperimentConfig& cfg, const SeedArtifacts& art) {
    if (!art.has_full_embeddings) throw AttackError("attribute attack requires full-graph embeddings");
    if (art.full.attrs.empty()) throw AttackError("attribute attack requires sensitive attributes");

    std::vector<int> aux_ids, aux_attrs;
    for (int id : art.aux_ids) {
        const int a = art.full.attrs[static_cast<size_t>(id)];
        if (a >= 0) {
            aux_ids.push_back(id);
            aux_attrs.push_back(a);
        }
    }
    std::vector<int> target_ids, target_attrs;
    for (int id : art.target_ids) {
        const int a = art.full.attrs[static_cast<size_t>(id)];
        if (a >= 0) {
            target_ids.push_back(id);
            target_attrs.push_back(a);
        }
    }
    if (aux_ids.empty() || target_ids.empty())
        throw AttackError("attribute attack: no attributed nodes on one side");

    ClassifierConfig cc;
    cc.kind = cfg.attacks.classifier;
    cc.hidden = cfg.attacks.classifier_hidden;
    cc.epochs = cfg.attacks.classifier_epochs;
    cc.lr = cfg.attacks.classifier_lr;
    cc.seed = derive_seed(art.seed, "attack-attribute");
    try {
        const AttributeAttackModel model = train_attribute_attack(
            art.full_embeddings.select(aux_ids), aux_attrs, art.full.n_attr_classes, cc);
        const AttributeInference inf =
            infer_attributes(model, art.full_embeddings.select(target_ids), &target_attrs);
        nlohmann::json j = inf.to_json();
        j["seed"] = art.seed;
        const double baseline = majority_baseline_f1(target_attrs, art.full.n_attr_classes);
        j["majority_baseline_f1"] = baseline;
        j["f1_excess_over_baseline"] = inf.f1 - baseline;
        j["params"] = {{"classifier", classifier_kind_name(cc.kind)},
                       {"aux_nodes", aux_ids.size()},
                       {"target_nodes", target_ids.size()},
                       {"attr_classes", art.full.n_attr_classes}};
        return j;
    } catch (const std::invalid_argument& e) {
        throw AttackError(e.what());
    }
}

nlohmann::json target_summary(const ExperimentConfig& cfg, const SeedArtifacts& art) {
    nlohmann::json j;
    j["kind"] = cfg.model.kind;
    if (art.has_model) {
        j["train_acc"] = art.model.final_train_acc();
        j["test_acc"] = art.model.final_test_acc();
        j["generalization_gap"] = art.model.generalization_gap();
        j["layers"] = art.model.config.num_layers;
        j["hidden"] = art.model.config.hidden_dims;
        j["epochs"] = art.model.config.epochs;
        j["lr"] = art.model.config.lr;
        j["dropout"] = art.model.config.dropout;
        j["embedding_layer"] = art.model.config.embedding_layer;
    } else {
        j["dim"] = cfg.model.walk.dim;
        j["walks_per_node"] = cfg.model.walk.walks_per_node;
        j["walk_length"] = cfg.model.walk.walk_length;
        j["window"] = cfg.model.walk.window;
        j["p"] = cfg.model.walk.p;
        j["q"] = cfg.model.walk.q;
    }
    return j;
}

}  // namespace

nlohmann::json run_attack(const ExperimentConfig& cfg, const SeedArtifacts& art,
                          const std::string& attack) {
    if (attack == "confidence") return attack_confidence(cfg, art);
    if (attack == "shadow") return attack_shadow(cfg, art);
    if (attack == "whitebox") return attack_whitebox(cfg, art);
    if (attack == "reconstruct") return attack_reconstruct(cfg, art);
    if (attack == "attribute") return attack_attribute_json(cfg, art);
    throw AttackError("unknown attack: " + attack);
}

nlohmann::json run_seed(const ExperimentConfig& cfg, std::uint64_t seed, bool* any_failed) {
    const SeedArtifacts art = build_seed_artifacts(cfg, seed);
    nlohmann::json j;
    j["seed"] = seed;
    j["target"] = target_summary(cfg, art);
    nlohmann::json attacks = nlohmann::json::object();
    for (const auto& name : cfg.attacks.list) {
        try {
            attacks[name] = run_attack(cfg, art, name);
        } catch (const std::exception& e) {
            attacks[name] = {{"error", e.what()}};
            if (any_failed) *any_failed = true;
        }
    }
    j["attacks"] = attacks;
    return j;
}

nlohmann::json run_experiment(const ExperimentConfig& cfg, bool* any_failed) {
    const auto t0 = std::chrono::steady_clock::now();
    const size_t n = cfg.run.seeds.size();
    std::vector<nlohmann::json> results(n);
    std::vector<char> failed(n, 0);

    const int jobs = std::max(1, std::min<int>(cfg.run.jobs, static_cast<int>(n)));
    if (jobs == 1) {
        for (size_t i = 0; i < n; ++i) {
            bool f = false;
            results[i] = run_seed(cfg, cfg.run.seeds[i], &f);
            failed[i] = f;
        }
    } else {
        std::vector<std::thread> pool;
        std::atomic<size_t> next{0};
        for (int w = 0; w < jobs; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    const size_t i = next.fetch_add(1);
                    if (i >= n) return;
                    bool f = false;
                    results[i] = run_seed(cfg, cfg.run.seeds[i], &f);
                    failed[i] = f;
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    if (any_failed)
        *any_failed = std::any_of(failed.begin(), failed.end(), [](char c) { return c != 0; });

    nlohmann::json report;
    report["artifact"] = {{"name", kArtifactName}, {"version", kArtifactVersion}};
    report["config"] = cfg.echo();
    report["seeds"] = cfg.run.seeds;
    report["results"] = results;
    report["aggregates"] = aggregate_results(report["results"]);
    const auto t1 = std::chrono::steady_clock::now();
    report["timings"] = {
        {"total_ms", std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count()}};
    return report;
}

nlohmann::json aggregate_results(const nlohmann::json& per_seed_results) {
    // attack -> metric -> values
    std::map<std::string, std::map<std::string, std::vector<double>>> acc;
    static const std::set<std::string> skip = {"seed", "attack", "params", "threshold_curve",
                                               "predictions", "aux_training_auc",
                                               "aux_training_ap", "error"};
    for (const auto& seed_entry : per_seed_results) {
        if (seed_entry.contains("target")) {
            for (const auto& [k, v] : seed_entry["target"].items())
                if (v.is_number()) acc["target"][k].push_back(v.get<double>());
        }
        if (!seed_entry.contains("attacks")) continue;
        for (const auto& [name, a] : seed_entry["attacks"].items()) {
            for (const auto& [k, v] : a.items()) {
                if (skip.count(k) || !v.is_number()) continue;
                acc[name][k].push_back(v.get<double>());
            }
        }
    }
    nlohmann::json out = nlohmann::json::object();
    for (const auto& [name, metrics] : acc) {
        nlohmann::json m = nlohmann::json::object();
        for (const auto& [k, vals] : metrics) {
            double mean = 0.0;
            for (double v : vals) mean += v;
            mean /= static_cast<double>(vals.size());
            double var = 0.0;
            for (double v : vals) var += (v - mean) * (v - mean);
            var /= static_cast<double>(vals.size());
            m[k] = {{"mean", mean}, {"std", std::sqrt(var)}, {"n", vals.size()}};
        }
        out[name] = m;
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

std::string seed_dir(const std::string& out_dir, std::uint64_t seed) {
    return out_dir + "/seed" + std::to_string(seed);
}

}  // namespace

void save_seed_artifacts(const ExperimentConfig& cfg, const SeedArtifacts& art,
                         const std::string& out_dir) {
    const std::string dir = seed_dir(out_dir, art.seed);
    fs::create_directories(dir);

    nlohmann::json splits;
    splits["seed"] = art.seed;
    splits["target_ids"] = art.target_ids;
    splits["aux_ids"] = art.aux_ids;
    splits["train"] = art.target.train_nodes();
    splits["val"] = art.target.val_nodes();
    splits["test"] = art.target.test_nodes();
    splits["config"] = cfg.echo();
    write_text_file(dir + "/splits.json", splits.dump(2) + "\n");

    if (art.has_model) save_checkpoint(art.model, dir + "/model.ckpt");
    if (art.has_released) save_embeddings_csv(art.released, dir + "/embeddings.csv");
    if (art.has_full_embeddings)
        save_embeddings_csv(art.full_embeddings, dir + "/full_embeddings.csv");
}

SeedArtifacts load_seed_artifacts(const ExperimentConfig& cfg, const std::string& out_dir,
                                  std::uint64_t seed) {
    const std::string dir = seed_dir(out_dir, seed);
    const std::string splits_path = dir + "/splits.json";
    if (!fs::exists(splits_path))
        throw AttackError("missing artifact " + splits_path +
                          "; produce it with `gea train --config <config> --out " + out_dir + "`");
    const nlohmann::json splits = nlohmann::json::parse(read_text_file(splits_path));

    SeedArtifacts art;
    art.seed = seed;
    art.full = build_dataset(cfg, seed);
    art.target_ids = splits.at("target_ids").get<std::vector<int>>();
    art.aux_ids = splits.at("aux_ids").get<std::vector<int>>();
    art.target = induced_subgraph(art.full, art.target_ids);
    art.aux = induced_subgraph(art.full, art.aux_ids);

    auto apply_mask = [&](const char* key, std::vector<char>& mask) {
        mask.assign(static_cast<size_t>(art.target.n), 0);
        for (int id : splits.at(key).get<std::vector<int>>()) mask[static_cast<size_t>(id)] = 1;
    };
    apply_mask("train", art.target.train_mask);
    apply_mask("val", art.target.val_mask);
    apply_mask("test", art.target.test_mask);

    if (cfg.model.is_gnn()) {
        const std::string ckpt = dir + "/model.ckpt";
        if (!fs::exists(ckpt))
            throw AttackError("missing artifact " + ckpt +
                              "; produce it with `gea train --config <config> --out " + out_dir +
                              "`");
        art.model = load_checkpoint(ckpt);
        art.has_model = true;
    }
    const std::string emb = dir + "/embeddings.csv";
    if (fs::exists(emb)) {
        art.released = load_embeddings_csv(emb);
        art.has_released = true;
    }
    const std::string full_emb = dir + "/full_embeddings.csv";
    if (fs::exists(full_emb)) {
        art.full_embeddings = load_embeddings_csv(full_emb);
        art.has_full_embeddings = true;
    }
    return art;
}

std::string report_to_csv(const std::vector<nlohmann::json>& reports) {
    nlohmann::json all_results = nlohmann::json::array();
    for (const auto& r : reports) {
        if (r.contains("results")) {
            for (const auto& e : r["results"]) all_results.push_back(e);
        } else if (r.contains("attacks")) {
            all_results.push_back(r);
        } else if (r.contains("attack")) {
            nlohmann::json wrapper;
            wrapper["attacks"][r["attack"].get<std::string>()] = r;
            all_results.push_back(wrapper);
        }
    }
    const nlohmann::json agg = aggregate_results(all_results);
    std::string csv = "attack,metric,mean,std,n\n";
    for (const auto& [name, metrics] : agg.items()) {
        for (const auto& [k, v] : metrics.items()) {
            char line[256];
            std::snprintf(line, sizeof line, "%s,%s,%.10g,%.10g,%d\n", name.c_str(), k.c_str(),
                          v["mean"].get<double>(), v["std"].get<double>(), v["n"].get<int>());
            csv += line;
        }
    }
    return csv;
}

}  // namespace gea
