#include "ebql/agents.hpp"

#include <cmath>

#include "ebql/errors.hpp"

namespace ebql {

QTable::QTable(std::size_t n_states, std::size_t n_actions)
    : n_states_(n_states),
      n_actions_(n_actions),
      values_(n_states * n_actions, 0.0),
      counts_(n_states * n_actions, 0) {
    if (n_states == 0 || n_actions == 0)
        throw InvalidParameter("QTable: state/action counts must be positive");
}

long QTable::total_updates() const {
    long total = 0;
    for (long c : counts_) total += c;
    return total;
}

std::size_t QTable::argmax(std::size_t s, std::size_t n_actions) const {
    std::size_t best = 0;
    for (std::size_t a = 1; a < n_actions; ++a)
        if (value(s, a) > value(s, best)) best = a;
    return best;
}

double learning_rate(long count, double exponent) {
    if (count < 1) throw InvalidParameter("learning_rate: count must be >= 1");
    return 1.0 / std::pow(static_cast<double>(count), exponent);
}

namespace {

void apply(QTable& q, const UpdateStep& step, double alpha, double target) {
    q.bump_count(step.s, step.a);
    q.set_value(step.s, step.a,
                (1.0 - alpha) * q.value(step.s, step.a) + alpha * target);
}

}  // namespace

void ql_update(QTable& q, const UpdateStep& step, double gamma, double alpha) {
    double bootstrap = 0.0;
    if (!step.done) {
        const std::size_t best = q.argmax(step.next_s, step.next_action_count);
        bootstrap = q.value(step.next_s, best);
    }
    apply(q, step, alpha, step.reward + gamma * bootstrap);
}

void dql_update(QTable& qa, QTable& qb, const UpdateStep& step, double gamma, double alpha,
                int coin) {
    QTable& chooser = coin == 0 ? qa : qb;
    QTable& valuer = coin == 0 ? qb : qa;
    double bootstrap = 0.0;
    if (!step.done) {
        const std::size_t best = chooser.argmax(step.next_s, step.next_action_count);
        bootstrap = valuer.value(step.next_s, best);
    }
    apply(chooser, step, alpha, step.reward + gamma * bootstrap);
}

void ebql_update(std::vector<QTable>& members, std::size_t k, const UpdateStep& step,
                 double gamma, double alpha) {
    if (members.size() < 2) throw InvalidParameter("ebql_update: K must be >= 2");
    if (k >= members.size()) throw InvalidParameter("ebql_update: member index out of range");
    double bootstrap = 0.0;
    if (!step.done) {
        const std::size_t best = members[k].argmax(step.next_s, step.next_action_count);
        double sum = 0.0;
        for (std::size_t j = 0; j < members.size(); ++j)
            if (j != k) sum += members[j].value(step.next_s, best);
        bootstrap = sum / static_cast<double>(members.size() - 1);
    }
    apply(members[k], step, alpha, step.reward + gamma * bootstrap);
}

TabularAgent::TabularAgent(const AgentConfig& config, std::size_t n_states,
                           std::size_t n_actions, Rng rng)
    : cfg_(config), visits_(n_states, 0), rng_(rng) {
    std::size_t members = 1;
    if (cfg_.algorithm == Algorithm::DQL) members = 2;
    if (cfg_.algorithm == Algorithm::EBQL) {
        if (cfg_.ensemble_size < 2)
            throw InvalidParameter("TabularAgent: EBQL requires ensemble_size >= 2");
        members = static_cast<std::size_t>(cfg_.ensemble_size);
    }
    members_.assign(members, QTable(n_states, n_actions));
}

std::size_t TabularAgent::greedy_action(std::size_t s, std::size_t n_actions_at_s) const {
    std::size_t best = 0;
    double best_sum = 0.0;
    for (std::size_t a = 0; a < n_actions_at_s; ++a) {
        double sum = 0.0;
        for (const auto& q : members_) sum += q.value(s, a);
        if (a == 0 || sum > best_sum) {
            best = a;
            best_sum = sum;
        }
    }
    return best;
}

std::size_t TabularAgent::select_action(std::size_t s, std::size_t n_actions_at_s) {
    const long visits = ++visits_[s];
    const double eps = cfg_.epsilon >= 0.0
                           ? cfg_.epsilon
                           : 1.0 / std::sqrt(static_cast<double>(visits));
    if (rng_.uniform01() < eps)
        return static_cast<std::size_t>(rng_.uniform_below(n_actions_at_s));
    return greedy_action(s, n_actions_at_s);
}

void TabularAgent::observe(const UpdateStep& step) {
    switch (cfg_.algorithm) {
        case Algorithm::QL: {
            const double alpha =
                learning_rate(members_[0].count(step.s, step.a) + 1, cfg_.lr_exponent);
            ql_update(members_[0], step, cfg_.gamma, alpha);
            break;
        }
        case Algorithm::DQL: {
            const int coin = cfg_.coin == DqlCoin::Parity
                                 ? static_cast<int>(step_count_ % 2)
                                 : static_cast<int>(rng_.uniform_below(2));
            QTable& target = coin == 0 ? members_[0] : members_[1];
            const double alpha =
                learning_rate(target.count(step.s, step.a) + 1, cfg_.lr_exponent);
            dql_update(members_[0], members_[1], step, cfg_.gamma, alpha, coin);
            break;
        }
        case Algorithm::EBQL: {
            const std::size_t k =
                static_cast<std::size_t>(rng_.uniform_below(members_.size()));
            const double alpha =
                learning_rate(members_[k].count(step.s, step.a) + 1, cfg_.lr_exponent);
            ebql_update(members_, k, step, cfg_.gamma, alpha);
            break;
        }
    }
    ++step_count_;
}

double TabularAgent::mean_q(std::size_t s, std::size_t a) const {
    double sum = 0.0;
    for (const auto& q : members_) sum += q.value(s, a);
    return sum / static_cast<double>(members_.size());
}

long TabularAgent::total_updates() const {
    long total = 0;
    for (const auto& q : members_) total += q.total_updates();
    return total;
}

double bias_probe(const TabularAgent& agent, const MetaChainEnv& env, std::size_t chain,
                  double gamma) {
    const TrueQ truth = true_q(env.config().chains.at(chain), gamma);
    // mu == 0 ties resolve toward-C; not exercised by the default chain set.
    const std::size_t a_opt =
        truth.optimal_a_action == kActionTowardB ? kActionTowardB : kActionTowardC;
    const std::size_t state = env.state_id({chain, Node::A});
    return agent.mean_q(state, a_opt) - truth.optimal_a_value;
}

}  // namespace ebql
