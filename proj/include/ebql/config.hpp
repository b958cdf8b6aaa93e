#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ebql/agents.hpp"
#include "ebql/chain.hpp"

namespace ebql {

enum class ExperimentKind { MseCurve, SplitSweep, EstimatorStats, ChainTrain, BiasTrace };

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& s);

// One algorithm entry for chain experiments: "ql", "dql", or "ebql:K".
struct AlgorithmSpec {
    Algorithm algorithm = Algorithm::QL;
    int ensemble_size = 0;  // EBQL only

    std::string label() const;
    static AlgorithmSpec parse(const std::string& text);
    bool operator==(const AlgorithmSpec&) const = default;
};

// Flat key = value experiment configuration. Defaults follow the tabular
// meta-chain setup: 6 chains with symmetric means, sigma 1, 10 actions at B,
// gamma 1, polynomial learning rate with exponent 0.8, 5000 episodes,
// 50 seeds.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::ChainTrain;

    // chain-train / bias-trace
    std::vector<double> chain_mus = {-0.6, -0.4, -0.2, 0.2, 0.4, 0.6};
    double sigma = 1.0;
    int b_actions = 10;
    double gamma = 1.0;
    double lr_exponent = 0.8;
    double epsilon = 0.5;  // >= 0: constant; < 0: count-based 1/sqrt(visits)
    int episodes = 5000;
    int seeds = 50;
    std::vector<AlgorithmSpec> algorithms = {AlgorithmSpec::parse("ql"),
                                             AlgorithmSpec::parse("dql"),
                                             AlgorithmSpec::parse("ebql:10")};
    std::uint64_t master_seed = 0;

    // estimator-stats
    std::vector<double> means = {0.5, 0.0};
    std::vector<double> stds = {1.0, 1.0};
    int n_samples = 20;
    std::string estimator = "se";  // se | de | wde | ee
    int param = 2;                 // n1 for wde, K for ee
    long trials = 1000000;

    // mse-curve / split-sweep
    std::vector<double> deltas = {0.05, 0.1, 0.2, 0.4, 0.8, 1.6};
    double sigma2 = 0.25;
    std::vector<int> m_values = {2, 4, 6};
    std::vector<double> normalized_gaps;  // empty: default log grid
    long mc_trials = 20000;
    std::vector<double> snr_values;  // empty: default log grid [0.1, 100]

    std::string out_dir = "out";

    MetaChainConfig meta_chain() const;
    AgentConfig agent_config(const AlgorithmSpec& alg) const;
    void validate() const;

    bool operator==(const ExperimentConfig&) const = default;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& config);

}  // namespace ebql
