#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ebql/errors.hpp"
#include "ebql/estimators.hpp"

using namespace ebql;

namespace {

// Plain double-loop mean over selected indices; a deliberately naive oracle.
double naive_mean(const std::vector<double>& arm, std::span<const std::size_t> idx) {
    double s = 0.0;
    for (std::size_t i : idx) s += arm[i];
    return s / static_cast<double>(idx.size());
}

}  // namespace

TEST_CASE("single estimator takes the max of full-sample means") {
    const SampleSet s({{1.0, 3.0}, {10.0, -2.0}, {2.0, 2.0}});
    const auto e = single_estimator(s);
    CHECK(e.chosen_index == 1);
    CHECK(e.estimate == doctest::Approx(4.0));
    CHECK(e.index_phase_count == 2);
    CHECK(e.mean_phase_count == 0);
}

TEST_CASE("single estimator breaks ties toward the lowest arm") {
    const SampleSet s({{2.0, 2.0}, {1.0, 3.0}, {4.0, 0.0}});
    CHECK(single_estimator(s).chosen_index == 0);
}

TEST_CASE("double estimator picks with one half and values with the other") {
    // Arm 0 looks best on the index half but arm values come from the mean half.
    const SampleSet s({{100.0, 0.0}, {1.0, 7.0}});
    const Partition p({{0}, {1}}, 2);
    const auto e = double_estimator(s, p, 0);
    CHECK(e.chosen_index == 0);
    CHECK(e.estimate == doctest::Approx(0.0));
    CHECK(e.index_phase_count == 1);
    CHECK(e.mean_phase_count == 1);

    const Partition p3({{0}, {1}, {2}}, 3);
    const SampleSet s3({{1.0, 2.0, 3.0}});
    CHECK_THROWS_AS(double_estimator(s3, p3, 0), InvalidParameter);
}

TEST_CASE("weighted double estimator matches a naive recomputation") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 1 + rng.uniform_below(5);
        const std::size_t n = 6 + rng.uniform_below(20);
        std::vector<std::vector<double>> arms(m);
        for (auto& a : arms) a = rng.gaussians(rng.uniform01(), 1.0, n);
        const SampleSet s(arms);

        std::vector<std::size_t> idx, mean_idx;
        for (std::size_t i = 0; i < n; ++i) (i % 3 == 0 ? idx : mean_idx).push_back(i);

        const auto e = weighted_double_estimator(s, idx, mean_idx);
        std::size_t best = 0;
        for (std::size_t a = 1; a < m; ++a)
            if (naive_mean(arms[a], idx) > naive_mean(arms[best], idx)) best = a;
        CHECK(e.chosen_index == best);
        CHECK(e.estimate == doctest::Approx(naive_mean(arms[best], mean_idx)).epsilon(1e-12));
        CHECK(e.index_phase_count == idx.size());
        CHECK(e.mean_phase_count == mean_idx.size());
    }
}

TEST_CASE("weighted double estimator rejects bad index lists") {
    const SampleSet s({{1.0, 2.0, 3.0, 4.0}});
    const std::vector<std::size_t> a{0, 1}, b{1, 2}, empty{}, oob{0, 9};
    CHECK_THROWS_AS(weighted_double_estimator(s, a, b), InvalidParameter);     // overlap
    CHECK_THROWS_AS(weighted_double_estimator(s, empty, a), InvalidParameter);
    CHECK_THROWS_AS(weighted_double_estimator(s, a, empty), InvalidParameter);
    CHECK_THROWS_AS(weighted_double_estimator(s, oob, b), InvalidParameter);
}

TEST_CASE("ensemble estimator equals the matched weighted double estimator") {
    Rng rng(57);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + rng.uniform_below(6);
        const std::size_t n = k * (2 + rng.uniform_below(10));
        const std::size_t m = 1 + rng.uniform_below(4);
        std::vector<double> mu(m), sd(m, 1.0);
        for (auto& v : mu) v = 2.0 * rng.uniform01() - 1.0;
        const SampleSet s = sample_gaussian_set(rng, mu, sd, n);
        const Partition p = partition_samples(n, k, rng);
        const std::size_t k_tilde = rng.uniform_below(k);

        std::vector<std::size_t> mean_idx;
        for (std::size_t j = 0; j < k; ++j)
            if (j != k_tilde)
                mean_idx.insert(mean_idx.end(), p.subset(j).begin(), p.subset(j).end());

        const auto ee = ensemble_estimator(s, p, k_tilde);
        const auto wde = weighted_double_estimator(s, p.subset(k_tilde), mean_idx);
        CHECK(ee.chosen_index == wde.chosen_index);
        worst = std::max(worst, std::abs(ee.estimate - wde.estimate));
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("ensemble estimator equals the double estimator at K = 2") {
    Rng rng(58);
    const SampleSet s = sample_gaussian_set(rng, std::vector<double>{0.3, 0.0},
                                            std::vector<double>{1.0, 1.0}, 8);
    const Partition p = partition_samples(8, 2, rng);
    const auto ee = ensemble_estimator(s, p, 0);
    const auto de = double_estimator(s, p, 0);
    CHECK(ee.chosen_index == de.chosen_index);
    CHECK(ee.estimate == de.estimate);
}

TEST_CASE("estimator bias signs on a separated two-arm instance") {
    // mu = (0.5, 0), sigma = 1, N = 10: SE is biased up, DE and EE down.
    Rng rng(71);
    const std::vector<double> mu{0.5, 0.0}, sd{1.0, 1.0};
    const int trials = 40000;
    double se_sum = 0.0, de_sum = 0.0, ee_sum = 0.0;
    for (int t = 0; t < trials; ++t) {
        const SampleSet s = sample_gaussian_set(rng, mu, sd, 10);
        se_sum += single_estimator(s).estimate - 0.5;
        const Partition p2 = partition_samples(10, 2, rng);
        de_sum += double_estimator(s, p2, 0).estimate - 0.5;
        const Partition p5 = partition_samples(10, 5, rng);
        ee_sum += ensemble_estimator(s, p5, 0).estimate - 0.5;
    }
    // Expected magnitudes are a few 1e-2; 40k trials give SE ~ 2e-3.
    CHECK(se_sum / trials > 0.01);
    CHECK(de_sum / trials < -0.01);
    CHECK(ee_sum / trials < -0.01);
}
