#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "ebql/csv.hpp"
#include "ebql/errors.hpp"
#include "ebql/experiment.hpp"

using namespace ebql;

namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::ChainTrain;
    cfg.chain_mus = {-0.2, 0.4};
    cfg.episodes = 60;
    cfg.seeds = 4;
    cfg.algorithms = {AlgorithmSpec::parse("ql"), AlgorithmSpec::parse("ebql:3")};
    cfg.master_seed = 77;
    return cfg;
}

}  // namespace

TEST_CASE("terminal window statistics cover the last tenth") {
    std::vector<double> series(100, 0.0);
    for (int i = 90; i < 100; ++i) series[static_cast<std::size_t>(i)] = 1.0;
    CHECK(terminal_window_mean(series) == doctest::Approx(1.0));

    std::vector<std::uint8_t> bits(5, 1);
    bits.back() = 0;  // short series: window is max(1, n/10) = 1
    CHECK(terminal_window_rate(bits) == doctest::Approx(0.0));
    CHECK_THROWS_AS(terminal_window_mean({}), InvalidParameter);
}

TEST_CASE("training results do not depend on the worker count") {
    const ExperimentConfig cfg = tiny_config();
    const ChainTrainData serial = train_chain_agents(cfg, 1);
    const ChainTrainData parallel = train_chain_agents(cfg, 5);
    for (const auto& [label, runs] : serial.runs) {
        const auto& other = parallel.runs.at(label);
        REQUIRE(runs.size() == other.size());
        for (std::size_t i = 0; i < runs.size(); ++i) {
            CHECK(runs[i].chain == other[i].chain);
            CHECK(runs[i].correct == other[i].correct);
            CHECK(runs[i].bias == other[i].bias);
        }
    }
}

TEST_CASE("chain experiment csv output is self-consistent") {
    const ExperimentConfig cfg = tiny_config();
    const auto out = std::filesystem::temp_directory_path() / "ebql-test-chain-out";
    std::filesystem::remove_all(out);
    run_chain_experiment(cfg, out, 2);

    const CsvTable runs = read_csv(out / "ql_runs.csv");
    CHECK(runs.rows.size() ==
          static_cast<std::size_t>(cfg.episodes) * static_cast<std::size_t>(cfg.seeds));

    // Recompute the aggregate correct-rate from the raw per-run rows.
    const CsvTable agg = read_csv(out / "ql_aggregate.csv");
    REQUIRE(agg.rows.size() == static_cast<std::size_t>(cfg.episodes));
    const std::size_t ep_col = runs.column_index("episode");
    const std::size_t correct_col = runs.column_index("correct");
    std::vector<double> totals(static_cast<std::size_t>(cfg.episodes), 0.0);
    for (const auto& row : runs.rows)
        totals[static_cast<std::size_t>(std::stoul(row[ep_col]))] += std::stod(row[correct_col]);
    const std::size_t rate_col = agg.column_index("rate_all");
    for (std::size_t ep = 0; ep < totals.size(); ++ep)
        CHECK(std::stod(agg.rows[ep][rate_col]) ==
              doctest::Approx(totals[ep] / cfg.seeds).epsilon(1e-12));

    const CsvTable final = read_csv(out / "final_rates.csv");
    CHECK(final.rows.size() == 2 * static_cast<std::size_t>(cfg.seeds));
    CHECK(std::filesystem::exists(out / "ebql3_aggregate.csv"));
    CHECK(std::filesystem::exists(out / "plot_rates.py"));
    std::filesystem::remove_all(out);
}

TEST_CASE("bias trace aggregates the per-seed probes") {
    ExperimentConfig cfg = tiny_config();
    cfg.kind = ExperimentKind::BiasTrace;
    const auto out = std::filesystem::temp_directory_path() / "ebql-test-bias-out";
    std::filesystem::remove_all(out);
    run_bias_trace(cfg, out, 2);

    const CsvTable raw = read_csv(out / "ql_bias_runs.csv");
    const CsvTable agg = read_csv(out / "ql_bias.csv");
    REQUIRE(agg.rows.size() == static_cast<std::size_t>(cfg.episodes));

    const std::size_t ep_col = raw.column_index("episode");
    const std::size_t bias_col = raw.column_index("bias");
    std::vector<double> totals(static_cast<std::size_t>(cfg.episodes), 0.0);
    for (const auto& row : raw.rows)
        totals[static_cast<std::size_t>(std::stoul(row[ep_col]))] += std::stod(row[bias_col]);
    const std::size_t agg_col = agg.column_index("bias");
    for (std::size_t ep = 0; ep < totals.size(); ++ep)
        CHECK(std::stod(agg.rows[ep][agg_col]) ==
              doctest::Approx(totals[ep] / cfg.seeds).epsilon(1e-12));

    const CsvTable summary = read_csv(out / "bias_terminal.csv");
    CHECK(summary.rows.size() == 2);
    std::filesystem::remove_all(out);
}

TEST_CASE("mse figures and snr sweep write their tables") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::MseCurve;
    cfg.deltas = {0.2, 0.8};
    cfg.m_values = {2};
    cfg.normalized_gaps = {0.1, 1.0};
    cfg.mc_trials = 2000;
    const auto out = std::filesystem::temp_directory_path() / "ebql-test-mse-out";
    std::filesystem::remove_all(out);
    run_mse_figures(cfg, out, 2);
    CHECK(read_csv(out / "mse_curve.csv").rows.size() > 0);
    CHECK(read_csv(out / "optimal_split.csv").rows.size() == 2);

    cfg.kind = ExperimentKind::SplitSweep;
    cfg.snr_values = {0.5, 5.0, 50.0};
    run_split_sweep(cfg, out);
    const CsvTable snr = read_csv(out / "snr_sweep.csv");
    CHECK(snr.rows.size() == 3);
    for (const auto& row : snr.rows)
        CHECK(std::stod(row[snr.column_index("split_ratio")]) < 0.5);
    std::filesystem::remove_all(out);
}

TEST_CASE("estimator stats honor the configured estimator") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::EstimatorStats;
    cfg.means = {0.5, 0.0};
    cfg.stds = {1.0, 1.0};
    cfg.n_samples = 10;
    cfg.estimator = "se";
    cfg.trials = 50000;
    const auto se = run_estimator_stats(cfg, 2);
    CHECK(se.trials == 50000);
    CHECK(se.bias > 0.0);

    cfg.estimator = "de";
    cfg.param = 0;
    CHECK(run_estimator_stats(cfg, 2).bias < 0.0);

    cfg.estimator = "nope";
    CHECK_THROWS_AS(run_estimator_stats(cfg, 2), ConfigError);
}
