#include <doctest.h>

#include <cmath>

#include "ebql/agents.hpp"
#include "ebql/chain.hpp"
#include "ebql/errors.hpp"

using namespace ebql;

TEST_CASE("true Q values of a single chain") {
    const TrueQ neg = true_q({-0.3, 1.0, 10}, 1.0);
    CHECK(neg.a_toward_c == 0.0);
    CHECK(neg.a_toward_b == doctest::Approx(-0.3));
    CHECK(neg.b_value == doctest::Approx(-0.3));
    CHECK(neg.optimal_a_action == kActionTowardC);
    CHECK(neg.optimal_a_value == 0.0);

    const TrueQ pos = true_q({0.4, 1.0, 10}, 1.0);
    CHECK(pos.optimal_a_action == kActionTowardB);
    CHECK(pos.optimal_a_value == doctest::Approx(0.4));

    CHECK(true_q({0.0, 1.0, 10}, 1.0).optimal_a_action == -1);

    // Discounting scales the reward reached one step later.
    CHECK(true_q({0.4, 1.0, 10}, 0.5).a_toward_b == doctest::Approx(0.2));
}

TEST_CASE("meta chain dynamics and state indexing") {
    MetaChainEnv env({{{-0.2, 1.0, 3}, {0.4, 1.0, 3}}}, Rng(2));
    CHECK(env.state_count() == 4);
    CHECK(env.max_actions() == 3);

    int chain_hits[2] = {0, 0};
    for (int i = 0; i < 2000; ++i) {
        const ChainState start = env.reset();
        CHECK(start.node == Node::A);
        ++chain_hits[start.chain];
    }
    CHECK(std::abs(chain_hits[0] - 1000) < 150);

    const ChainState a{1, Node::A};
    CHECK(env.actions_at(a) == 2);
    CHECK(env.state_id(a) == 2);
    const Transition left = env.step(a, kActionTowardC);
    CHECK(left.done);
    CHECK(left.reward == 0.0);
    const Transition right = env.step(a, kActionTowardB);
    CHECK_FALSE(right.done);
    CHECK(right.reward == 0.0);
    CHECK(right.next.node == Node::B);
    CHECK(env.state_id(right.next) == 3);
    CHECK(env.actions_at(right.next) == 3);

    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const Transition t = env.step(right.next, static_cast<int>(i % 3));
        CHECK(t.done);
        sum += t.reward;
    }
    CHECK(sum / n == doctest::Approx(0.4).epsilon(0.1));

    CHECK_THROWS_AS(env.step(a, 2), InvalidAction);
    CHECK_THROWS_AS(env.step(a, -1), InvalidAction);
    CHECK_THROWS_AS(env.step(left.next, 0), InvalidAction);
}

TEST_CASE("learning rate schedule") {
    CHECK(learning_rate(1, 0.8) == 1.0);
    CHECK(learning_rate(32, 0.8) == doctest::Approx(std::pow(32.0, -0.8)));
    CHECK(learning_rate(100, 1.0) == doctest::Approx(0.01));
}

TEST_CASE("ql_update applies the bellman backup") {
    QTable q(2, 3);
    q.set_value(1, 0, 2.0);
    q.set_value(1, 2, 5.0);

    UpdateStep step;
    step.s = 0;
    step.a = 1;
    step.reward = 1.0;
    step.next_s = 1;
    step.next_action_count = 3;
    ql_update(q, step, 0.5, 0.25);
    // target = 1 + 0.5 * 5; value = 0.75 * 0 + 0.25 * 3.5
    CHECK(q.value(0, 1) == doctest::Approx(0.875));
    CHECK(q.count(0, 1) == 1);

    UpdateStep terminal;
    terminal.s = 0;
    terminal.a = 2;
    terminal.reward = -2.0;
    terminal.done = true;
    ql_update(q, terminal, 0.5, 1.0);
    CHECK(q.value(0, 2) == doctest::Approx(-2.0));

    // Bounded argmax ignores actions beyond next_action_count.
    step.next_action_count = 2;
    QTable q2(2, 3);
    q2.set_value(1, 0, 2.0);
    q2.set_value(1, 2, 5.0);
    ql_update(q2, step, 0.5, 1.0);
    CHECK(q2.value(0, 1) == doctest::Approx(1.0 + 0.5 * 2.0));
}

TEST_CASE("dql_update cross-evaluates the two tables") {
    QTable qa(2, 2), qb(2, 2);
    qa.set_value(1, 0, 3.0);
    qa.set_value(1, 1, 1.0);
    qb.set_value(1, 0, -1.0);
    qb.set_value(1, 1, 10.0);

    UpdateStep step;
    step.s = 0;
    step.a = 0;
    step.reward = 0.0;
    step.next_s = 1;
    step.next_action_count = 2;

    dql_update(qa, qb, step, 1.0, 1.0, 0);  // argmax on qa (action 0), value from qb
    CHECK(qa.value(0, 0) == doctest::Approx(-1.0));
    CHECK(qb.value(0, 0) == 0.0);

    dql_update(qa, qb, step, 1.0, 1.0, 1);  // argmax on qb (action 1), value from qa
    CHECK(qb.value(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("ebql_update bootstraps with the mean of the other members") {
    std::vector<QTable> members(3, QTable(2, 2));
    members[0].set_value(1, 0, 6.0);   // member 0 prefers action 0
    members[1].set_value(1, 0, 2.0);
    members[2].set_value(1, 0, 4.0);
    members[1].set_value(1, 1, 100.0);

    UpdateStep step;
    step.s = 0;
    step.a = 1;
    step.reward = 1.0;
    step.next_s = 1;
    step.next_action_count = 2;

    ebql_update(members, 0, step, 1.0, 0.5);
    // member 0 argmax is action 0; value = mean(2, 4) = 3; target = 4.
    CHECK(members[0].value(0, 1) == doctest::Approx(2.0));
    CHECK(members[1].value(0, 1) == 0.0);
    CHECK(members[2].value(0, 1) == 0.0);

    CHECK_THROWS_AS(ebql_update(members, 3, step, 1.0, 0.5), InvalidParameter);
    std::vector<QTable> one(1, QTable(2, 2));
    CHECK_THROWS_AS(ebql_update(one, 0, step, 1.0, 0.5), InvalidParameter);
}

TEST_CASE("ebql with two members reproduces dql exactly") {
    Rng rng(404);
    MetaChainEnv env({{{0.2, 1.0, 4}}}, rng.child(0));
    Rng policy = rng.child(1);
    Rng coins = rng.child(2);

    QTable qa(env.state_count(), env.max_actions());
    QTable qb(env.state_count(), env.max_actions());
    std::vector<QTable> members(2, QTable(env.state_count(), env.max_actions()));

    for (int ep = 0; ep < 200; ++ep) {
        ChainState state = env.reset();
        while (state.node != Node::Terminal) {
            const int action = static_cast<int>(policy.uniform_below(env.actions_at(state)));
            const Transition tr = env.step(state, action);
            UpdateStep step;
            step.s = env.state_id(state);
            step.a = static_cast<std::size_t>(action);
            step.reward = tr.reward;
            step.done = tr.done;
            if (!tr.done) {
                step.next_s = env.state_id(tr.next);
                step.next_action_count = env.actions_at(tr.next);
            }
            const int coin = static_cast<int>(coins.uniform_below(2));
            QTable& target = coin == 0 ? qa : qb;
            const double alpha = learning_rate(target.count(step.s, step.a) + 1, 0.8);
            dql_update(qa, qb, step, 1.0, alpha, coin);
            ebql_update(members, static_cast<std::size_t>(coin), step, 1.0, alpha);
            state = tr.next;
        }
    }
    CHECK(qa == members[0]);
    CHECK(qb == members[1]);
}

TEST_CASE("tabular agent learns a single positive chain") {
    AgentConfig cfg;
    cfg.algorithm = Algorithm::EBQL;
    cfg.ensemble_size = 5;
    MetaChainEnv env({{{0.6, 1.0, 5}}}, Rng(11).child(0));
    TabularAgent agent(cfg, env.state_count(), env.max_actions(), Rng(11).child(1));

    for (int ep = 0; ep < 2000; ++ep) {
        ChainState state = env.reset();
        while (state.node != Node::Terminal) {
            const std::size_t sid = env.state_id(state);
            const auto action = agent.select_action(sid, env.actions_at(state));
            const Transition tr = env.step(state, static_cast<int>(action));
            UpdateStep step;
            step.s = sid;
            step.a = action;
            step.reward = tr.reward;
            step.done = tr.done;
            if (!tr.done) {
                step.next_s = env.state_id(tr.next);
                step.next_action_count = env.actions_at(tr.next);
            }
            agent.observe(step);
            state = tr.next;
        }
    }
    CHECK(agent.greedy_action(0, 2) == static_cast<std::size_t>(kActionTowardB));
    CHECK(agent.mean_q(0, kActionTowardB) == doctest::Approx(0.6).epsilon(0.4));
    // Probe = learned minus true optimal value at A.
    const double probe = bias_probe(agent, env, 0, 1.0);
    CHECK(probe == doctest::Approx(agent.mean_q(0, kActionTowardB) - 0.6).epsilon(1e-12));
}

TEST_CASE("agent config validation") {
    MetaChainEnv env({{{0.2, 1.0, 4}}}, Rng(1));
    AgentConfig bad;
    bad.algorithm = Algorithm::EBQL;
    bad.ensemble_size = 1;
    CHECK_THROWS_AS(TabularAgent(bad, env.state_count(), env.max_actions(), Rng(2)),
                    InvalidParameter);
}
