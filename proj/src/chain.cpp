#include "ebql/chain.hpp"

#include <algorithm>

#include "ebql/errors.hpp"

namespace ebql {

MetaChainEnv::MetaChainEnv(MetaChainConfig config, Rng rng)
    : config_(std::move(config)), rng_(rng) {
    if (config_.chains.empty())
        throw InvalidParameter("MetaChainEnv: need at least one chain");
    for (const auto& c : config_.chains) {
        if (!(c.sigma > 0.0)) throw InvalidParameter("MetaChainEnv: sigma must be positive");
        if (c.b_actions < 1) throw InvalidParameter("MetaChainEnv: b_actions must be >= 1");
    }
}

ChainState MetaChainEnv::reset() {
    const auto chain = static_cast<std::size_t>(rng_.uniform_below(config_.chains.size()));
    return {chain, Node::A};
}

Transition MetaChainEnv::step(const ChainState& state, int action) {
    const ChainConfig& chain = config_.chains.at(state.chain);
    Transition t;
    t.state = state;
    t.action = action;
    switch (state.node) {
        case Node::A:
            if (action == kActionTowardC) {
                t.next = {state.chain, Node::Terminal};
                t.done = true;
            } else if (action == kActionTowardB) {
                t.next = {state.chain, Node::B};
                t.done = false;
            } else {
                throw InvalidAction("step: actions at A are 0 (toward-C) and 1 (toward-B)");
            }
            break;
        case Node::B:
            if (action < 0 || action >= chain.b_actions)
                throw InvalidAction("step: action out of range at B");
            t.reward = rng_.gaussian(chain.mu, chain.sigma);
            t.next = {state.chain, Node::Terminal};
            t.done = true;
            break;
        case Node::Terminal:
            throw InvalidAction("step: episode already terminated");
    }
    return t;
}

std::size_t MetaChainEnv::state_id(const ChainState& s) const {
    return 2 * s.chain + (s.node == Node::B ? 1 : 0);
}

std::size_t MetaChainEnv::max_actions() const {
    std::size_t m = 2;
    for (const auto& c : config_.chains)
        m = std::max(m, static_cast<std::size_t>(c.b_actions));
    return m;
}

std::size_t MetaChainEnv::actions_at(const ChainState& s) const {
    return s.node == Node::A ? 2
                             : static_cast<std::size_t>(config_.chains.at(s.chain).b_actions);
}

TrueQ true_q(const ChainConfig& chain, double gamma) {
    if (gamma < 0.0 || gamma > 1.0) throw InvalidParameter("true_q: gamma must lie in [0,1]");
    TrueQ q;
    q.b_value = chain.mu;
    q.a_toward_c = 0.0;
    q.a_toward_b = gamma * chain.mu;
    if (q.a_toward_b > 0.0) {
        q.optimal_a_action = kActionTowardB;
        q.optimal_a_value = q.a_toward_b;
    } else if (q.a_toward_b < 0.0) {
        q.optimal_a_action = kActionTowardC;
        q.optimal_a_value = 0.0;
    } else {
        q.optimal_a_action = -1;  // tie, either action is optimal
        q.optimal_a_value = 0.0;
    }
    return q;
}

}  // namespace ebql
