// gea: train graph embedding models and audit their privacy leakage.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gea/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitAttackError = 2;

gea::ExperimentConfig load_config(const std::string& path, const std::optional<std::uint64_t>& seed,
                                  const std::string& out, int jobs) {
    gea::ExperimentConfig cfg = gea::ExperimentConfig::from_file(path);
    if (seed) cfg.run.seeds = {*seed};
    if (!out.empty()) cfg.run.out = out;
    if (jobs > 0) cfg.run.jobs = jobs;
    return cfg;
}

int cmd_run(const std::string& config_path, const std::optional<std::uint64_t>& seed,
            const std::string& out, int jobs) {
    gea::ExperimentConfig cfg = load_config(config_path, seed, out, jobs);
    bool any_failed = false;
    const nlohmann::json report = gea::run_experiment(cfg, &any_failed);
    const std::string path = cfg.run.out + "/report.json";
    gea::write_text_file(path, report.dump(2) + "\n");
    gea::write_text_file(cfg.run.out + "/report.csv", gea::report_to_csv({report}));
    std::cout << "report written to " << path << "\n";
    for (const auto& [name, metrics] : report["aggregates"].items()) {
        for (const auto& [k, v] : metrics.items())
            std::printf("  %-12s %-24s mean %.4f std %.4f (n=%d)\n", name.c_str(), k.c_str(),
                        v["mean"].get<double>(), v["std"].get<double>(), v["n"].get<int>());
    }
    return any_failed ? kExitAttackError : kExitOk;
}

int cmd_train(const std::string& config_path, const std::optional<std::uint64_t>& seed,
              const std::string& out, int jobs) {
    gea::ExperimentConfig cfg = load_config(config_path, seed, out, jobs);
    for (std::uint64_t s : cfg.run.seeds) {
        const gea::SeedArtifacts art = gea::build_seed_artifacts(cfg, s);
        gea::save_seed_artifacts(cfg, art, cfg.run.out);
        std::cout << "seed " << s << ": artifacts written to " << cfg.run.out << "/seed" << s
                  << "\n";
    }
    return kExitOk;
}

int cmd_attack(const std::string& config_path, const std::string& kind, const std::string& mode,
               const std::string& decoder_override, const std::optional<std::uint64_t>& seed,
               const std::string& out, int jobs) {
    gea::ExperimentConfig cfg = load_config(config_path, seed, out, jobs);
    std::string attack;
    if (kind == "membership") {
        if (mode != "confidence" && mode != "shadow" && mode != "whitebox")
            throw gea::ConfigError("attack membership: --mode must be confidence|shadow|whitebox");
        attack = mode;
    } else if (kind == "reconstruct") {
        attack = "reconstruct";
        if (!decoder_override.empty()) cfg.attacks.decoder = gea::decoder_from_name(decoder_override);
    } else if (kind == "attribute") {
        attack = "attribute";
    } else {
        throw gea::ConfigError("attack: kind must be membership|reconstruct|attribute");
    }

    bool failed = false;
    for (std::uint64_t s : cfg.run.seeds) {
        const gea::SeedArtifacts art = gea::load_seed_artifacts(cfg, cfg.run.out, s);
        try {
            const nlohmann::json j = gea::run_attack(cfg, art, attack);
            const std::string path =
                cfg.run.out + "/seed" + std::to_string(s) + "/attack_" + attack + ".json";
            gea::write_text_file(path, j.dump(2) + "\n");
            std::cout << "seed " << s << ": " << attack << " result written to " << path << "\n";
        } catch (const std::exception& e) {
            std::cerr << "seed " << s << ": " << attack << " failed: " << e.what() << "\n";
            failed = true;
        }
    }
    return failed ? kExitAttackError : kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& what,
              const std::vector<std::string>& values, const std::string& out, int jobs) {
    if (values.empty()) throw gea::ConfigError("sweep: provide --values");
    gea::ExperimentConfig base = load_config(config_path, std::nullopt, out, jobs);

    std::string csv = "value,attack,metric,mean,std,n\n";
    for (const auto& v : values) {
        gea::ExperimentConfig cfg = base;
        if (what == "layers") {
            const int layers = std::stoi(v);
            cfg.model.gnn.num_layers = layers;
            if (cfg.model.gnn.hidden_dims.size() != 1)
                cfg.model.gnn.hidden_dims = {cfg.model.gnn.hidden_dims.front()};
            if (cfg.model.gnn.embedding_layer >= layers) cfg.model.gnn.embedding_layer = 1;
        } else if (what == "aux") {
            cfg.attacks.aux_fraction = std::stod(v);
        } else {
            throw gea::ConfigError("sweep: expected layers|aux");
        }
        cfg.validate();
        cfg.run.out = base.run.out + "/sweep_" + what + "_" + v;
        bool ignored = false;
        const nlohmann::json report = gea::run_experiment(cfg, &ignored);
        gea::write_text_file(cfg.run.out + "/report.json", report.dump(2) + "\n");
        for (const auto& [name, metrics] : report["aggregates"].items()) {
            for (const auto& [k, m] : metrics.items()) {
                char line[256];
                std::snprintf(line, sizeof line, "%s,%s,%s,%.10g,%.10g,%d\n", v.c_str(),
                              name.c_str(), k.c_str(), m["mean"].get<double>(),
                              m["std"].get<double>(), m["n"].get<int>());
                csv += line;
            }
        }
        std::cout << "sweep " << what << "=" << v << " done\n";
    }
    const std::string csv_path = base.run.out + "/sweep_" + what + ".csv";
    gea::write_text_file(csv_path, csv);
    std::cout << "sweep table written to " << csv_path << "\n";
    return kExitOk;
}

int cmd_report(const std::vector<std::string>& files, const std::string& out) {
    if (files.empty()) throw gea::ConfigError("report: provide at least one report file");
    std::vector<nlohmann::json> reports;
    for (const auto& f : files) reports.push_back(nlohmann::json::parse(gea::read_text_file(f)));
    const std::string csv = gea::report_to_csv(reports);
    if (out.empty()) {
        std::cout << csv;
    } else {
        gea::write_text_file(out, csv);
        std::cout << "merged table written to " << out << "\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gea: graph embedding privacy audit"};
    app.require_subcommand(1);

    std::string config_path, out, mode, decoder, sweep_what;
    std::vector<std::string> values, files;
    std::optional<std::uint64_t> seed;
    int jobs = 0;

    auto add_common = [&](CLI::App* cmd, bool need_config) {
        auto* opt = cmd->add_option("--config", config_path, "experiment config file");
        if (need_config) opt->required();
        cmd->add_option("--out", out, "output directory (overrides [run].out)");
        cmd->add_option("--seed", seed, "run a single seed (overrides [run].seeds)");
        cmd->add_option("--jobs", jobs, "parallel seed workers (overrides [run].jobs)");
    };

    auto* run_cmd = app.add_subcommand("run", "train target, execute attacks, write report");
    add_common(run_cmd, true);

    auto* train_cmd = app.add_subcommand("train", "train target model and persist artifacts");
    add_common(train_cmd, true);

    auto* attack_cmd = app.add_subcommand("attack", "run one attack on persisted artifacts");
    std::string attack_kind;
    attack_cmd->add_option("kind", attack_kind, "membership|reconstruct|attribute")->required();
    attack_cmd->add_option("--mode", mode, "membership mode: confidence|shadow|whitebox");
    attack_cmd->add_option("--decoder", decoder, "reconstruct decoder: inner_product|bilinear");
    add_common(attack_cmd, true);

    auto* sweep_cmd = app.add_subcommand("sweep", "run the experiment across a parameter sweep");
    sweep_cmd->add_option("what", sweep_what, "layers|aux")->required();
    sweep_cmd->add_option("--values", values, "sweep values")->required()->delimiter(',');
    add_common(sweep_cmd, true);

    auto* report_cmd = app.add_subcommand("report", "merge per-seed reports into a CSV table");
    report_cmd->add_option("files", files, "report.json files")->required();
    report_cmd->add_option("--out", out, "CSV output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitConfigError : kExitOk;
    }

    try {
        if (run_cmd->parsed()) return cmd_run(config_path, seed, out, jobs);
        if (train_cmd->parsed()) return cmd_train(config_path, seed, out, jobs);
        if (attack_cmd->parsed())
            return cmd_attack(config_path, attack_kind, mode, decoder, seed, out, jobs);
        if (sweep_cmd->parsed()) return cmd_sweep(config_path, sweep_what, values, out, jobs);
        if (report_cmd->parsed()) return cmd_report(files, out);
    } catch (const gea::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfigError;
    } catch (const gea::AttackError& e) {
        std::cerr << "attack error: " << e.what() << "\n";
        return kExitAttackError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAttackError;
    }
    return kExitOk;
}
