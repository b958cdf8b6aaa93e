#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "ebql/rng.hpp"

namespace ebql {

// Means and standard deviations of m independent Gaussian arms.
struct GaussianSpec {
    std::vector<double> means;
    std::vector<double> stds;

    GaussianSpec() = default;
    GaussianSpec(std::vector<double> mu, std::vector<double> sigma);

    std::size_t arm_count() const { return means.size(); }
    double max_mean() const;

    // Copy with means sorted descending; `permutation[i]` is the original
    // index of the i-th sorted arm.
    GaussianSpec sorted_descending(std::vector<std::size_t>* permutation = nullptr) const;
};

// Exact two-arm probability that phase 1 (n1 samples per arm) selects each
// arm: P(a* = a) = 2 * prod_j Phi(sqrt(n1) (mu_a - mu_j) / sqrt(s_a^2 + s_j^2)).
std::array<double, 2> argmax_probability_2gauss(const GaussianSpec& spec, int n1);

struct McProbabilities {
    std::vector<double> probs;
    std::vector<double> std_errors;
    long trials = 0;
};

// Empirical selection frequencies for arbitrary m; deterministic given seed.
McProbabilities argmax_probability_mc(const GaussianSpec& spec, int n1, long trials, Rng rng);

// Closed-form bias/variance/MSE of the weighted double estimator for given
// selection probabilities.
struct WdeStatistics {
    double bias = 0.0;
    double variance = 0.0;
    double mse = 0.0;
    std::vector<double> argmax_probs;
};

WdeStatistics wde_statistics(const GaussianSpec& spec, int n, int n1,
                             std::span<const double> probs);

// Scalar closed form for two equal-variance Gaussians:
//   MSE(n1) = s^2/(N-n1) + d^2 - d^2 Phi(d sqrt(n1) / (sqrt(2) s)).
double wde_mse_2gauss(const GaussianSpec& spec, int n, int n1);

// Analytic derivative of the two-Gaussian MSE in continuous n1:
//   s^2/(N-n1)^2 - d^3/(4 s sqrt(pi n1)) exp(-d^2 n1 / (4 s^2)).
double wde_mse_derivative(const GaussianSpec& spec, int n, double n1);

enum class ProbSource { ClosedForm, MonteCarlo };

struct SplitCurve {
    int n = 0;
    std::vector<int> n1_grid;
    std::vector<double> mse;
    int n1_star = 1;  // ties broken toward the smallest n1
};

struct McOptions {
    long trials = 100000;
    std::uint64_t seed = 0;
};

// Exhaustive integer scan of the MSE over n1 in [1, N-1]. The closed-form
// probability path requires m == 2; larger m uses Monte Carlo frequencies.
SplitCurve optimal_split(const GaussianSpec& spec, int n, ProbSource source,
                         const McOptions& mc = {});

enum class EstimatorKind { Single, Double, WeightedDouble, Ensemble };

// Brute-force estimator statistics; the oracle the closed forms are checked
// against. `param` is n1 for WeightedDouble and K for Ensemble, unused
// otherwise. Results are independent of `jobs`.
struct McEstimatorStats {
    double bias = 0.0;
    double variance = 0.0;
    double mse = 0.0;
    double bias_std_error = 0.0;
    double mse_std_error = 0.0;
    long trials = 0;
};

McEstimatorStats monte_carlo_estimator_stats(const GaussianSpec& spec, EstimatorKind kind,
                                             int n, int param, long trials, const Rng& rng,
                                             int jobs = 1);

// Optimal-split behavior across a sweep of signal-to-noise ratios
// (SNR = gap / (sigma / sqrt(N))).
struct SnrReport {
    struct Row {
        double snr = 0.0;
        double delta = 0.0;
        int n1_star = 0;
        double split_ratio = 0.0;
    };
    std::vector<Row> rows;
    double max_split_ratio = 0.0;
    bool all_below_half = true;
};

SnrReport snr_asymptote_check(int n, std::span<const double> snr_values, double sigma);

}  // namespace ebql
