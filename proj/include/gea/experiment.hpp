#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gea/attack_membership.hpp"
#include "gea/attack_reconstruction.hpp"
#include "gea/classifier.hpp"
#include "gea/embedding.hpp"
#include "gea/gnn.hpp"
#include "gea/graph.hpp"
#include "gea/walks.hpp"

namespace gea {

inline constexpr const char* kArtifactName = "gea";
inline constexpr const char* kArtifactVersion = "0.1.0";

// Invalid configuration: exit code 1 at the CLI.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Attack/runtime failure: exit code 2 at the CLI.
struct AttackError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DatasetConfig {
    std::string kind = "sbm";  // sbm | files
    std::string edges, features, labels, attributes;
    int max_nodes = 4000;  // induced subsample cap for file datasets; 0 disables
    std::vector<int> blocks = {200, 200};
    double p_intra = 0.2;
    double p_inter = 0.01;
    int feature_dim = 8;
    double class_signal = 1.0;
    double attr_correlation = 0.0;
    int n_train = 100, n_val = 50, n_test = 200;  // inductive mask sizes on the target side
};

struct ModelConfig {
    std::string kind = "gcn";  // gcn | sage | deepwalk | node2vec
    GnnConfig gnn;
    WalkConfig walk;

    bool is_gnn() const { return kind == "gcn" || kind == "sage"; }
};

struct AttacksConfig {
    std::vector<std::string> list;  // confidence | shadow | whitebox | reconstruct | attribute
    double aux_fraction = 0.3;
    std::optional<double> confidence_threshold;  // unset: sweep
    ClassifierKind classifier = ClassifierKind::mlp;
    int classifier_hidden = 64;
    int classifier_epochs = 200;
    double classifier_lr = 0.01;
    int anchors = 10;  // whitebox anchors per class
    int ae_hidden = 16;
    int ae_epochs = 200;
    double ae_lr = 0.01;
    DecoderMode decoder = DecoderMode::bilinear;
    ReconLoss recon_loss = ReconLoss::weighted_bce;
    int recon_hidden = 32;
    int recon_dim = 16;
    int recon_epochs = 200;
    double recon_lr = 0.01;
    std::string threshold_policy = "density";  // fixed | density
    double recon_tau = 0.5;

    bool wants(const std::string& name) const;
};

struct RunConfig {
    std::vector<std::uint64_t> seeds = {1};
    std::string out = "out";
    int jobs = 1;
};

struct ExperimentConfig {
    DatasetConfig dataset;
    ModelConfig model;
    AttacksConfig attacks;
    RunConfig run;

    static ExperimentConfig from_file(const std::string& path);
    static ExperimentConfig from_string(const std::string& text);
    static ExperimentConfig from_echo(const nlohmann::json& echo);
    nlohmann::json echo() const;
    void validate() const;  // throws ConfigError
};

// Everything one seed's pipeline produces before attacks run.
struct SeedArtifacts {
    std::uint64_t seed = 0;
    Graph full;
    Graph target;  // masked when the target model is a classifier
    Graph aux;
    std::vector<int> target_ids, aux_ids;  // original node ids
    NodeClassifier model;
    bool has_model = false;
    EmbeddingMatrix released;  // embeddings of the target graph (attack surface)
    bool has_released = false;
    EmbeddingMatrix full_embeddings;  // full-graph embeddings for attribute inference
    bool has_full_embeddings = false;
};

Graph build_dataset(const ExperimentConfig& cfg, std::uint64_t seed);

// Split, mask, train the target model and derive released embeddings.
SeedArtifacts build_seed_artifacts(const ExperimentConfig& cfg, std::uint64_t seed);

// Runs one named attack on prepared artifacts; throws AttackError on failure.
nlohmann::json run_attack(const ExperimentConfig& cfg, const SeedArtifacts& art,
                          const std::string& attack);

// All requested attacks; failures are recorded under {"error": ...} instead of
// aborting the seed. Sets *any_failed when an attack errored.
nlohmann::json run_seed(const ExperimentConfig& cfg, std::uint64_t seed, bool* any_failed);

// Full experiment: every seed (optionally in parallel), aggregates, timings.
nlohmann::json run_experiment(const ExperimentConfig& cfg, bool* any_failed = nullptr);

// Persisted pipeline stages backing the train/attack subcommands.
void save_seed_artifacts(const ExperimentConfig& cfg, const SeedArtifacts& art,
                         const std::string& out_dir);
SeedArtifacts load_seed_artifacts(const ExperimentConfig& cfg, const std::string& out_dir,
                                  std::uint64_t seed);

// Aggregates restricted to numeric leaf metrics: mean/std per attack field.
nlohmann::json aggregate_results(const nlohmann::json& per_seed_results);

// Merge per-seed JSON reports into a flat CSV (attack,metric,mean,std,n).
std::string report_to_csv(const std::vector<nlohmann::json>& reports);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace gea
