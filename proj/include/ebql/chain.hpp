#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "ebql/rng.hpp"

namespace ebql {

// One chain: A -> {terminate | B}, B -> terminal with reward ~ N(mu, sigma^2).
struct ChainConfig {
    double mu = 0.0;
    double sigma = 1.0;
    int b_actions = 10;
};

struct MetaChainConfig {
    std::vector<ChainConfig> chains;
};

enum class Node { A, B, Terminal };

struct ChainState {
    std::size_t chain = 0;
    Node node = Node::A;
};

struct Transition {
    ChainState state;
    int action = 0;
    double reward = 0.0;
    ChainState next;
    bool done = false;
};

// Action encoding at A: 0 = toward-C (terminate), 1 = toward-B.
inline constexpr int kActionTowardC = 0;
inline constexpr int kActionTowardB = 1;

class MetaChainEnv {
public:
    MetaChainEnv(MetaChainConfig config, Rng rng);

    // Samples a chain uniformly and starts its episode at A.
    ChainState reset();
    Transition step(const ChainState& state, int action);

    const MetaChainConfig& config() const { return config_; }
    std::size_t chain_count() const { return config_.chains.size(); }

    // State indexing for tabular agents: A and B per chain.
    std::size_t state_id(const ChainState& s) const;
    std::size_t state_count() const { return 2 * config_.chains.size(); }
    std::size_t max_actions() const;
    std::size_t actions_at(const ChainState& s) const;

private:
    MetaChainConfig config_;
    Rng rng_;
};

// Ground-truth optimal Q-values of a single chain.
struct TrueQ {
    double a_toward_c = 0.0;
    double a_toward_b = 0.0;
    double b_value = 0.0;      // identical for every B action
    int optimal_a_action = 0;  // -1 when both actions tie (mu == 0)
    double optimal_a_value = 0.0;
};

TrueQ true_q(const ChainConfig& chain, double gamma);

}  // namespace ebql
