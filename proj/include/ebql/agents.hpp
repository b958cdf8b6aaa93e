#pragma once

#include <cstddef>
#include <vector>

#include "ebql/chain.hpp"
#include "ebql/rng.hpp"

namespace ebql {

// Dense |S| x |A| table of action values plus per-entry update counts.
class QTable {
public:
    QTable(std::size_t n_states, std::size_t n_actions);

    double value(std::size_t s, std::size_t a) const { return values_[s * n_actions_ + a]; }
    void set_value(std::size_t s, std::size_t a, double v) { values_[s * n_actions_ + a] = v; }
    long count(std::size_t s, std::size_t a) const { return counts_[s * n_actions_ + a]; }
    long bump_count(std::size_t s, std::size_t a) { return ++counts_[s * n_actions_ + a]; }

    std::size_t state_count() const { return n_states_; }
    std::size_t action_count() const { return n_actions_; }
    long total_updates() const;

    // Greedy action over the first n_actions entries, ties toward the lowest.
    std::size_t argmax(std::size_t s, std::size_t n_actions) const;

    bool operator==(const QTable& other) const = default;

private:
    std::size_t n_states_;
    std::size_t n_actions_;
    std::vector<double> values_;
    std::vector<long> counts_;
};

// One tabular transition as seen by an update rule. `next_action_count`
// bounds the argmax at the next state; ignored when done.
struct UpdateStep {
    std::size_t s = 0;
    std::size_t a = 0;
    double reward = 0.0;
    std::size_t next_s = 0;
    bool done = false;
    std::size_t next_action_count = 0;
};

// Polynomial schedule alpha = 1 / n^exponent; n is the count after increment.
double learning_rate(long count, double exponent);

// Q(s,a) <- (1-a)Q(s,a) + a(r + g max_a' Q(s',a')); terminal bootstraps to 0.
void ql_update(QTable& q, const UpdateStep& step, double gamma, double alpha);

// Cross-evaluated update of one of the two tables; coin 0 updates `qa`
// (argmax on qa, value from qb), coin 1 the mirror image.
void dql_update(QTable& qa, QTable& qb, const UpdateStep& step, double gamma, double alpha,
                int coin);

// Member k bootstraps with its own argmax, valued by the mean of the other
// K-1 members.
void ebql_update(std::vector<QTable>& members, std::size_t k, const UpdateStep& step,
                 double gamma, double alpha);

enum class Algorithm { QL, DQL, EBQL };
enum class DqlCoin { Parity, Random };

struct AgentConfig {
    Algorithm algorithm = Algorithm::QL;
    int ensemble_size = 10;  // EBQL only, must be >= 2
    double gamma = 1.0;
    double lr_exponent = 0.8;
    // Exploration: epsilon >= 0 is a constant schedule; epsilon < 0 selects
    // the visit-count schedule eps(s) = 1/sqrt(visits(s)).
    double epsilon = 0.5;
    DqlCoin coin = DqlCoin::Parity;
};

class TabularAgent {
public:
    TabularAgent(const AgentConfig& config, std::size_t n_states, std::size_t n_actions,
                 Rng rng);

    // Epsilon-greedy over the summed member tables; bumps the state's visit
    // count used by the count-based schedule.
    std::size_t select_action(std::size_t s, std::size_t n_actions_at_s);

    // Exploration-free greedy choice (does not touch visit counts).
    std::size_t greedy_action(std::size_t s, std::size_t n_actions_at_s) const;

    void observe(const UpdateStep& step);

    // Mean of member tables at (s,a); the bias-probe readout.
    double mean_q(std::size_t s, std::size_t a) const;

    const std::vector<QTable>& members() const { return members_; }
    const AgentConfig& config() const { return cfg_; }
    long total_updates() const;

private:
    AgentConfig cfg_;
    std::vector<QTable> members_;
    std::vector<long> visits_;
    Rng rng_;
    long step_count_ = 0;
};

// Learned minus true Q-value of the chain's optimal action at state A.
double bias_probe(const TabularAgent& agent, const MetaChainEnv& env, std::size_t chain,
                  double gamma);

}  // namespace ebql
