#include "ebql/experiment.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <thread>

#include "ebql/agents.hpp"
#include "ebql/csv.hpp"
#include "ebql/errors.hpp"
#include "ebql/stats.hpp"

namespace ebql {

namespace {

void parallel_for(std::size_t task_count, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || task_count <= 1) {
        for (std::size_t i = 0; i < task_count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(jobs), task_count);
    for (std::size_t w = 0; w < count; ++w)
        workers.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < task_count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& t : workers) t.join();
}

SeedRun train_one(const ExperimentConfig& config, const AlgorithmSpec& alg,
                  std::size_t alg_index, std::uint64_t seed) {
    const Rng seed_root = Rng(config.master_seed).child(seed);
    MetaChainEnv env(config.meta_chain(), seed_root.child(1));
    TabularAgent agent(config.agent_config(alg), env.state_count(), env.max_actions(),
                       seed_root.child(2 + alg_index));

    SeedRun run;
    run.seed = seed;
    run.chain.reserve(static_cast<std::size_t>(config.episodes));
    run.correct.reserve(static_cast<std::size_t>(config.episodes));
    run.bias.reserve(static_cast<std::size_t>(config.episodes));

    for (int ep = 0; ep < config.episodes; ++ep) {
        ChainState state = env.reset();
        const std::size_t chain = state.chain;

        // Correct-action rate is measured exploration-free at episode start.
        const TrueQ truth = true_q(env.config().chains[chain], config.gamma);
        const std::size_t greedy = agent.greedy_action(env.state_id(state), 2);
        const bool correct = truth.optimal_a_action < 0 ||
                             greedy == static_cast<std::size_t>(truth.optimal_a_action);

        while (state.node != Node::Terminal) {
            const std::size_t sid = env.state_id(state);
            const std::size_t n_actions = env.actions_at(state);
            const auto action = agent.select_action(sid, n_actions);
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

        double bias_sum = 0.0;
        for (std::size_t c = 0; c < env.chain_count(); ++c)
            bias_sum += bias_probe(agent, env, c, config.gamma);

        run.chain.push_back(static_cast<int>(chain));
        run.correct.push_back(correct ? 1 : 0);
        run.bias.push_back(bias_sum / static_cast<double>(env.chain_count()));
    }
    return run;
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    long count = 0;
};

MeanSe mean_and_se(const std::vector<double>& values) {
    MeanSe out;
    out.count = static_cast<long>(values.size());
    if (values.empty()) return out;
    out.mean = compensated_sum(values) / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        out.se = std::sqrt(ss / (static_cast<double>(values.size()) *
                                 static_cast<double>(values.size() - 1)));
    }
    return out;
}

void write_plot_script(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write plot script: " + path.string());
    out << body;
}

}  // namespace

double terminal_window_mean(const std::vector<double>& series) {
    if (series.empty()) throw InvalidParameter("terminal_window_mean: empty series");
    const std::size_t window = std::max<std::size_t>(1, series.size() / 10);
    std::vector<double> tail(series.end() - static_cast<std::ptrdiff_t>(window), series.end());
    return compensated_sum(tail) / static_cast<double>(window);
}

double terminal_window_rate(const std::vector<std::uint8_t>& series) {
    std::vector<double> d(series.begin(), series.end());
    return terminal_window_mean(d);
}

double overall_rate(const std::vector<std::uint8_t>& series) {
    if (series.empty()) throw InvalidParameter("overall_rate: empty series");
    double sum = 0.0;
    for (std::uint8_t v : series) sum += v;
    return sum / static_cast<double>(series.size());
}

ChainTrainData train_chain_agents(const ExperimentConfig& config, int jobs) {
    ChainTrainData data;
    for (const auto& alg : config.algorithms)
        data.runs[alg.label()].resize(static_cast<std::size_t>(config.seeds));

    struct Task {
        std::size_t alg_index;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t a = 0; a < config.algorithms.size(); ++a)
        for (int s = 0; s < config.seeds; ++s)
            tasks.push_back({a, static_cast<std::uint64_t>(s)});

    parallel_for(tasks.size(), jobs, [&](std::size_t i) {
        const Task& t = tasks[i];
        const AlgorithmSpec& alg = config.algorithms[t.alg_index];
        data.runs[alg.label()][t.seed] = train_one(config, alg, t.alg_index, t.seed);
    });
    return data;
}

void run_chain_experiment(const ExperimentConfig& config, const std::filesystem::path& out,
                          int jobs, const ChainTrainData* precomputed) {
    std::filesystem::create_directories(out);
    const ChainTrainData data =
        precomputed ? *precomputed : train_chain_agents(config, jobs);
    const auto& chains = config.chain_mus;

    CsvWriter final_rates(out / "final_rates.csv", {"algorithm", "seed", "final_rate"});
    for (const auto& alg : config.algorithms) {
        const auto& runs = data.runs.at(alg.label());

        CsvWriter per_seed(out / (alg.label() + "_runs.csv"),
                           {"run_id", "seed", "episode", "chain", "mu", "correct"});
        for (const auto& run : runs) {
            const std::string run_id = alg.label() + "-" + std::to_string(run.seed);
            for (std::size_t ep = 0; ep < run.correct.size(); ++ep) {
                const int chain = run.chain[ep];
                const std::string cells[] = {run_id,
                                             std::to_string(run.seed),
                                             std::to_string(ep),
                                             std::to_string(chain),
                                             csv_double(chains[static_cast<std::size_t>(chain)]),
                                             std::to_string(static_cast<int>(run.correct[ep]))};
                per_seed.write_row(cells);
            }
        }
        per_seed.close();

        // Aggregate by episode, split by the sign of the sampled chain's mean.
        CsvWriter agg(out / (alg.label() + "_aggregate.csv"),
                      {"episode", "rate_neg", "se_neg", "n_neg", "rate_pos", "se_pos", "n_pos",
                       "rate_all", "se_all"});
        for (int ep = 0; ep < config.episodes; ++ep) {
            std::vector<double> neg, pos, all;
            for (const auto& run : runs) {
                const double mu = chains[static_cast<std::size_t>(run.chain[ep])];
                const double c = run.correct[static_cast<std::size_t>(ep)];
                (mu < 0 ? neg : pos).push_back(c);
                all.push_back(c);
            }
            const MeanSe n = mean_and_se(neg), p = mean_and_se(pos), a = mean_and_se(all);
            const std::string cells[] = {std::to_string(ep),
                                         csv_double(n.mean), csv_double(n.se),
                                         std::to_string(n.count),
                                         csv_double(p.mean), csv_double(p.se),
                                         std::to_string(p.count),
                                         csv_double(a.mean), csv_double(a.se)};
            agg.write_row(cells);
        }
        agg.close();

        for (const auto& run : runs) {
            const std::string cells[] = {alg.label(), std::to_string(run.seed),
                                         csv_double(overall_rate(run.correct))};
            final_rates.write_row(cells);
        }
    }
    final_rates.close();

    write_plot_script(out / "plot_rates.py", R"(#!/usr/bin/env python3
"""Plot per-episode correct-action rates from *_aggregate.csv files."""
import glob, os, sys
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

window = int(sys.argv[1]) if len(sys.argv) > 1 else 1
here = os.path.dirname(os.path.abspath(__file__))

def smooth(x, w):
    if w <= 1:
        return x
    return np.convolve(x, np.ones(w) / w, mode="valid")

fig, axes = plt.subplots(1, 3, figsize=(15, 4), sharey=True)
for path in sorted(glob.glob(os.path.join(here, "*_aggregate.csv"))):
    label = os.path.basename(path).replace("_aggregate.csv", "")
    data = np.genfromtxt(path, delimiter=",", names=True)
    for ax, col, title in zip(axes, ["rate_neg", "rate_pos", "rate_all"],
                              ["chains with mu < 0", "chains with mu > 0", "all chains"]):
        ax.plot(smooth(data[col], window), label=label)
        ax.set_title(title)
        ax.set_xlabel("episode")
axes[0].set_ylabel("correct-action rate")
axes[0].legend()
fig.tight_layout()
fig.savefig(os.path.join(here, "correct_action_rate.png"), dpi=150)
print("wrote correct_action_rate.png")
)");
}

void run_bias_trace(const ExperimentConfig& config, const std::filesystem::path& out,
                    int jobs, const ChainTrainData* precomputed) {
    std::filesystem::create_directories(out);
    const ChainTrainData data =
        precomputed ? *precomputed : train_chain_agents(config, jobs);

    CsvWriter summary(out / "bias_terminal.csv", {"algorithm", "terminal_bias"});
    for (const auto& alg : config.algorithms) {
        const auto& runs = data.runs.at(alg.label());

        CsvWriter per_seed(out / (alg.label() + "_bias_runs.csv"),
                           {"seed", "episode", "bias"});
        for (const auto& run : runs)
            for (std::size_t ep = 0; ep < run.bias.size(); ++ep) {
                const std::string cells[] = {std::to_string(run.seed), std::to_string(ep),
                                             csv_double(run.bias[ep])};
                per_seed.write_row(cells);
            }
        per_seed.close();

        CsvWriter agg(out / (alg.label() + "_bias.csv"), {"episode", "bias", "se"});
        std::vector<double> seed_means;
        std::vector<double> episode_means(static_cast<std::size_t>(config.episodes));
        for (int ep = 0; ep < config.episodes; ++ep) {
            std::vector<double> vals;
            vals.reserve(runs.size());
            for (const auto& run : runs) vals.push_back(run.bias[static_cast<std::size_t>(ep)]);
            const MeanSe m = mean_and_se(vals);
            episode_means[static_cast<std::size_t>(ep)] = m.mean;
            const std::string cells[] = {std::to_string(ep), csv_double(m.mean),
                                         csv_double(m.se)};
            agg.write_row(cells);
        }
        agg.close();

        const std::string cells[] = {alg.label(),
                                     csv_double(terminal_window_mean(episode_means))};
        summary.write_row(cells);
    }
    summary.close();

    write_plot_script(out / "plot_bias.py", R"(#!/usr/bin/env python3
"""Plot per-episode estimation bias from *_bias.csv files."""
import glob, os, sys
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

window = int(sys.argv[1]) if len(sys.argv) > 1 else 1
here = os.path.dirname(os.path.abspath(__file__))

def smooth(x, w):
    if w <= 1:
        return x
    return np.convolve(x, np.ones(w) / w, mode="valid")

plt.figure(figsize=(7, 4.5))
for path in sorted(glob.glob(os.path.join(here, "*_bias.csv"))):
    label = os.path.basename(path).replace("_bias.csv", "")
    data = np.genfromtxt(path, delimiter=",", names=True)
    plt.plot(smooth(data["bias"], window), label=label)
plt.axhline(0.0, color="k", lw=0.5)
plt.xlabel("episode")
plt.ylabel("estimation bias at A")
plt.legend()
plt.tight_layout()
plt.savefig(os.path.join(here, "estimation_bias.png"), dpi=150)
print("wrote estimation_bias.png")
)");
}

void run_mse_figures(const ExperimentConfig& config, const std::filesystem::path& out,
                     int jobs) {
    std::filesystem::create_directories(out);
    const double sigma = std::sqrt(config.sigma2);
    const int n = config.n_samples;

    // MSE as a function of the split point, one curve per mean gap.
    CsvWriter fig1(out / "mse_curve.csv",
                   {"delta", "n1", "split_ratio", "mse", "is_min"});
    for (double delta : config.deltas) {
        GaussianSpec spec({delta, 0.0}, {sigma, sigma});
        const SplitCurve curve = optimal_split(spec, n, ProbSource::ClosedForm);
        for (std::size_t i = 0; i < curve.n1_grid.size(); ++i) {
            const int n1 = curve.n1_grid[i];
            const std::string cells[] = {
                csv_double(delta), std::to_string(n1),
                csv_double(static_cast<double>(n1) / static_cast<double>(n)),
                csv_double(curve.mse[i]), std::to_string(n1 == curve.n1_star ? 1 : 0)};
            fig1.write_row(cells);
        }
    }
    fig1.close();

    // Optimal split point versus normalized gap for m in m_values; means are
    // evenly spread over [0, delta].
    std::vector<double> gaps = config.normalized_gaps;
    if (gaps.empty()) {
        for (int i = 0; i <= 20; ++i)
            gaps.push_back(0.02 * std::pow(10.0, 2.2 * i / 20.0));  // ~[0.02, 3.2]
    }

    struct Point {
        int m;
        double gap;
        int n1_star = 0;
    };
    std::vector<Point> points;
    for (int m : config.m_values)
        for (double g : gaps) points.push_back({m, g});

    parallel_for(points.size(), jobs, [&](std::size_t i) {
        Point& pt = points[i];
        const double delta = pt.gap * sigma * std::sqrt(static_cast<double>(pt.m));
        std::vector<double> means(static_cast<std::size_t>(pt.m));
        for (int a = 0; a < pt.m; ++a)
            means[static_cast<std::size_t>(a)] =
                pt.m == 1 ? 0.0 : delta * (pt.m - 1 - a) / (pt.m - 1);
        GaussianSpec spec(means, std::vector<double>(static_cast<std::size_t>(pt.m), sigma));
        if (pt.m == 2) {
            pt.n1_star = optimal_split(spec, n, ProbSource::ClosedForm).n1_star;
        } else {
            McOptions mc;
            mc.trials = config.mc_trials;
            mc.seed = Rng(config.master_seed).child(i).seed();
            pt.n1_star = optimal_split(spec, n, ProbSource::MonteCarlo, mc).n1_star;
        }
    });

    CsvWriter fig2(out / "optimal_split.csv",
                   {"m", "normalized_gap", "delta", "n1_star", "split_ratio"});
    for (const auto& pt : points) {
        const double delta = pt.gap * sigma * std::sqrt(static_cast<double>(pt.m));
        const std::string cells[] = {
            std::to_string(pt.m), csv_double(pt.gap), csv_double(delta),
            std::to_string(pt.n1_star),
            csv_double(static_cast<double>(pt.n1_star) / static_cast<double>(n))};
        fig2.write_row(cells);
    }
    fig2.close();

    write_plot_script(out / "plot_mse.py", R"(#!/usr/bin/env python3
"""Plot MSE-vs-split and optimal-split-vs-gap curves."""
import os
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

here = os.path.dirname(os.path.abspath(__file__))

data = np.genfromtxt(os.path.join(here, "mse_curve.csv"), delimiter=",", names=True)
plt.figure(figsize=(7, 4.5))
for delta in np.unique(data["delta"]):
    sel = data[data["delta"] == delta]
    plt.plot(sel["split_ratio"], sel["mse"], label=f"gap={delta:g}")
    star = sel[sel["is_min"] == 1]
    plt.plot(star["split_ratio"], star["mse"], "k*", ms=10)
plt.xlabel("split ratio N1/N")
plt.ylabel("MSE")
plt.legend()
plt.tight_layout()
plt.savefig(os.path.join(here, "mse_curve.png"), dpi=150)

data = np.genfromtxt(os.path.join(here, "optimal_split.csv"), delimiter=",", names=True)
plt.figure(figsize=(7, 4.5))
for m in np.unique(data["m"]):
    sel = data[data["m"] == m]
    plt.semilogx(sel["normalized_gap"], sel["split_ratio"], marker="o", label=f"m={int(m)}")
plt.axhline(0.5, color="k", lw=0.5, ls="--")
plt.xlabel("normalized gap")
plt.ylabel("optimal split ratio N1*/N")
plt.legend()
plt.tight_layout()
plt.savefig(os.path.join(here, "optimal_split.png"), dpi=150)
print("wrote mse_curve.png and optimal_split.png")
)");
}

void run_split_sweep(const ExperimentConfig& config, const std::filesystem::path& out) {
    std::filesystem::create_directories(out);
    std::vector<double> snrs = config.snr_values;
    if (snrs.empty()) {
        for (int i = 0; i <= 24; ++i)
            snrs.push_back(0.1 * std::pow(10.0, 3.0 * i / 24.0));  // [0.1, 100]
    }
    const double sigma = std::sqrt(config.sigma2);
    const SnrReport report = snr_asymptote_check(config.n_samples, snrs, sigma);

    CsvWriter csv(out / "snr_sweep.csv", {"snr", "delta", "n1_star", "split_ratio"});
    for (const auto& row : report.rows) {
        const std::string cells[] = {csv_double(row.snr), csv_double(row.delta),
                                     std::to_string(row.n1_star),
                                     csv_double(row.split_ratio)};
        csv.write_row(cells);
    }
    csv.close();
}

EstimatorKind estimator_kind_from_string(const std::string& s) {
    if (s == "se") return EstimatorKind::Single;
    if (s == "de") return EstimatorKind::Double;
    if (s == "wde") return EstimatorKind::WeightedDouble;
    if (s == "ee") return EstimatorKind::Ensemble;
    throw ConfigError("unknown estimator '" + s + "' (want se, de, wde, ee)");
}

McEstimatorStats run_estimator_stats(const ExperimentConfig& config, int jobs) {
    GaussianSpec spec(config.means, config.stds);
    return monte_carlo_estimator_stats(spec, estimator_kind_from_string(config.estimator),
                                       config.n_samples, config.param, config.trials,
                                       Rng(config.master_seed), jobs);
}

}  // namespace ebql
