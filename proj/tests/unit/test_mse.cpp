#include <doctest.h>

#include <cmath>

#include "ebql/errors.hpp"
#include "ebql/mse.hpp"
#include "ebql/stats.hpp"

using namespace ebql;

TEST_CASE("two-arm argmax probabilities sum to one and favor the larger mean") {
    const GaussianSpec spec({0.4, 0.0}, {1.0, 0.7});
    for (int n1 : {1, 4, 16, 64}) {
        const auto p = argmax_probability_2gauss(spec, n1);
        CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p[0] > 0.5);
    }
    // More phase-1 samples sharpen the selection.
    CHECK(argmax_probability_2gauss(spec, 64)[0] > argmax_probability_2gauss(spec, 4)[0]);
    CHECK_THROWS_AS(argmax_probability_2gauss(GaussianSpec({0.0, 0.0, 0.0}, {1, 1, 1}), 4),
                    UnsupportedDimension);
}

TEST_CASE("closed-form argmax probabilities match Monte Carlo frequencies") {
    Rng rng(17);
    for (int trial = 0; trial < 5; ++trial) {
        const GaussianSpec spec({rng.uniform01(), 0.0},
                                {0.5 + rng.uniform01(), 0.5 + rng.uniform01()});
        const int n1 = 2 + static_cast<int>(rng.uniform_below(20));
        const auto exact = argmax_probability_2gauss(spec, n1);
        const auto mc = argmax_probability_mc(spec, n1, 200000, rng.child(trial));
        for (int a = 0; a < 2; ++a)
            CHECK(std::abs(exact[static_cast<std::size_t>(a)] - mc.probs[a]) <=
                  4.0 * mc.std_errors[a] + 1e-4);
    }
}

TEST_CASE("wde closed forms satisfy mse = variance + bias^2") {
    const GaussianSpec spec({0.6, 0.1}, {1.2, 0.8});
    for (int n1 : {2, 5, 9}) {
        const auto probs = argmax_probability_2gauss(spec, n1);
        const auto s = wde_statistics(spec, 12, n1, probs);
        CHECK(s.mse == doctest::Approx(s.variance + s.bias * s.bias).epsilon(1e-10));
        CHECK(s.bias <= 0.0);  // phase-2 means make the W-DE pessimistic
    }
}

TEST_CASE("wde_mse_2gauss agrees with the general closed form") {
    const GaussianSpec spec({0.9, 0.2}, {0.7, 0.7});
    for (int n1 = 1; n1 < 16; ++n1) {
        const auto probs = argmax_probability_2gauss(spec, n1);
        const auto s = wde_statistics(spec, 16, n1, probs);
        CHECK(wde_mse_2gauss(spec, 16, n1) == doctest::Approx(s.mse).epsilon(1e-10));
    }
    CHECK_THROWS_AS(wde_mse_2gauss(GaussianSpec({1.0, 0.0}, {1.0, 0.5}), 16, 4),
                    UnsupportedDimension);
}

TEST_CASE("closed-form statistics match brute-force simulation") {
    const GaussianSpec spec({0.5, 0.0}, {1.0, 1.0});
    const int n = 20, n1 = 6;
    const auto probs = argmax_probability_2gauss(spec, n1);
    const auto cf = wde_statistics(spec, n, n1, probs);
    const auto mc =
        monte_carlo_estimator_stats(spec, EstimatorKind::WeightedDouble, n, n1, 400000, Rng(3), 2);
    CHECK(std::abs(cf.bias - mc.bias) <= 4.0 * mc.bias_std_error);
    CHECK(std::abs(cf.mse - mc.mse) <= 4.0 * mc.mse_std_error);
    CHECK(cf.variance == doctest::Approx(mc.variance).epsilon(0.02));
}

TEST_CASE("analytic derivative matches central finite differences") {
    const GaussianSpec spec({0.8, 0.0}, {1.0, 1.0});
    const int n = 40;
    auto mse = [&](double x) {
        const double d = 0.8, s = 1.0;
        return s * s / (n - x) + d * d * (1.0 - normal_cdf(d * std::sqrt(x) / (std::sqrt(2.0) * s)));
    };
    for (double n1 : {2.0, 7.5, 16.0, 30.0}) {
        const double h = 1e-4;
        const double fd = (mse(n1 + h) - mse(n1 - h)) / (2.0 * h);
        CHECK(wde_mse_derivative(spec, n, n1) == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("optimal_split returns the grid argmin with ties toward small n1") {
    const GaussianSpec spec({0.5, 0.0}, {1.0, 1.0});
    const SplitCurve c = optimal_split(spec, 30, ProbSource::ClosedForm);
    CHECK(c.n1_grid.size() == 29);
    int best = c.n1_grid[0];
    double best_mse = c.mse[0];
    for (std::size_t i = 1; i < c.mse.size(); ++i)
        if (c.mse[i] < best_mse) {
            best_mse = c.mse[i];
            best = c.n1_grid[i];
        }
    CHECK(c.n1_star == best);
    CHECK(c.n1_star < 15);
}

TEST_CASE("monte carlo split search stays close to the closed form") {
    const GaussianSpec spec({0.6, 0.0}, {1.0, 1.0});
    McOptions mc;
    mc.trials = 50000;
    mc.seed = 9;
    const SplitCurve exact = optimal_split(spec, 20, ProbSource::ClosedForm);
    const SplitCurve approx = optimal_split(spec, 20, ProbSource::MonteCarlo, mc);
    CHECK(std::abs(exact.n1_star - approx.n1_star) <= 2);
}

TEST_CASE("estimator statistics are independent of the worker count") {
    const GaussianSpec spec({0.3, 0.0, -0.2}, {1.0, 0.8, 1.2});
    const auto a = monte_carlo_estimator_stats(spec, EstimatorKind::Single, 12, 0, 60000,
                                               Rng(1234), 1);
    const auto b = monte_carlo_estimator_stats(spec, EstimatorKind::Single, 12, 0, 60000,
                                               Rng(1234), 7);
    CHECK(a.bias == b.bias);
    CHECK(a.mse == b.mse);
    CHECK(a.variance == b.variance);
}

TEST_CASE("snr sweep keeps the optimal split below half") {
    const double snrs[] = {0.5, 2.0, 8.0, 32.0};
    const SnrReport rep = snr_asymptote_check(40, snrs, 1.0);
    CHECK(rep.all_below_half);
    CHECK(rep.max_split_ratio < 0.5);
    for (const auto& row : rep.rows) CHECK(row.n1_star >= 1);
    CHECK_THROWS_AS(snr_asymptote_check(9, snrs, 1.0), InvalidParameter);
}

TEST_CASE("gaussian spec validation") {
    CHECK_THROWS_AS(GaussianSpec({}, {}), InvalidParameter);
    CHECK_THROWS_AS(GaussianSpec({0.0}, {0.0}), InvalidParameter);
    CHECK_THROWS_AS(GaussianSpec({0.0, 1.0}, {1.0}), InvalidParameter);
    std::vector<std::size_t> perm;
    const GaussianSpec sorted = GaussianSpec({0.1, 0.9, 0.5}, {1, 2, 3}).sorted_descending(&perm);
    CHECK(sorted.means == std::vector<double>{0.9, 0.5, 0.1});
    CHECK(perm == std::vector<std::size_t>{1, 2, 0});
    CHECK(sorted.stds == std::vector<double>{2, 3, 1});
}
