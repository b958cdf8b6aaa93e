#include "ebql/mse.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <numeric>
#include <thread>

#include "ebql/errors.hpp"
#include "ebql/estimators.hpp"
#include "ebql/stats.hpp"

namespace ebql {

GaussianSpec::GaussianSpec(std::vector<double> mu, std::vector<double> sigma)
    : means(std::move(mu)), stds(std::move(sigma)) {
    if (means.empty() || means.size() != stds.size())
        throw InvalidParameter("GaussianSpec: means/stds must be nonempty and equal length");
    for (double s : stds)
        if (!(s > 0.0)) throw InvalidParameter("GaussianSpec: stds must be positive");
}

double GaussianSpec::max_mean() const {
    return *std::max_element(means.begin(), means.end());
}

GaussianSpec GaussianSpec::sorted_descending(std::vector<std::size_t>* permutation) const {
    std::vector<std::size_t> order(means.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return means[a] > means[b]; });
    GaussianSpec out;
    out.means.reserve(means.size());
    out.stds.reserve(stds.size());
    for (std::size_t i : order) {
        out.means.push_back(means[i]);
        out.stds.push_back(stds[i]);
    }
    if (permutation) *permutation = order;
    return out;
}

std::array<double, 2> argmax_probability_2gauss(const GaussianSpec& spec, int n1) {
    if (spec.arm_count() != 2)
        throw UnsupportedDimension("argmax_probability_2gauss: closed form requires m=2");
    if (n1 < 1) throw InvalidParameter("argmax_probability_2gauss: n1 must be >= 1");
    const double root_n1 = std::sqrt(static_cast<double>(n1));
    std::array<double, 2> probs{};
    for (int a = 0; a < 2; ++a) {
        double p = 2.0;
        for (int j = 0; j < 2; ++j) {
            const double denom = std::sqrt(spec.stds[a] * spec.stds[a] +
                                           spec.stds[j] * spec.stds[j]);
            p *= normal_cdf(root_n1 * (spec.means[a] - spec.means[j]) / denom);
        }
        probs[a] = p;
    }
    return probs;
}

McProbabilities argmax_probability_mc(const GaussianSpec& spec, int n1, long trials, Rng rng) {
    if (n1 < 1) throw InvalidParameter("argmax_probability_mc: n1 must be >= 1");
    if (trials < 1) throw InvalidParameter("argmax_probability_mc: trials must be >= 1");
    const std::size_t m = spec.arm_count();
    std::vector<long> counts(m, 0);
    std::vector<double> draws(static_cast<std::size_t>(n1));
    for (long t = 0; t < trials; ++t) {
        std::size_t best = 0;
        double best_mean = 0.0;
        for (std::size_t a = 0; a < m; ++a) {
            for (auto& d : draws) d = rng.gaussian(spec.means[a], spec.stds[a]);
            const double mean = empirical_mean(draws);
            if (a == 0 || mean > best_mean) {
                best = a;
                best_mean = mean;
            }
        }
        ++counts[best];
    }
    McProbabilities out;
    out.trials = trials;
    out.probs.resize(m);
    out.std_errors.resize(m);
    for (std::size_t a = 0; a < m; ++a) {
        const double p = static_cast<double>(counts[a]) / static_cast<double>(trials);
        out.probs[a] = p;
        out.std_errors[a] = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    }
    return out;
}

WdeStatistics wde_statistics(const GaussianSpec& spec, int n, int n1,
                             std::span<const double> probs) {
    if (probs.size() != spec.arm_count())
        throw InvalidParameter("wde_statistics: probs must have one entry per arm");
    if (n1 < 1 || n1 > n - 1)
        throw InvalidParameter("wde_statistics: n1 must lie in [1, N-1]");
    const double mu_star = spec.max_mean();
    const double mean_samples = static_cast<double>(n - n1);

    double bias = 0.0, second = 0.0, first = 0.0, mse = 0.0;
    for (std::size_t a = 0; a < spec.arm_count(); ++a) {
        const double mu = spec.means[a];
        const double var_a = spec.stds[a] * spec.stds[a] / mean_samples;
        const double gap = mu_star - mu;
        bias += (mu - mu_star) * probs[a];
        first += mu * probs[a];
        second += (var_a + mu * mu) * probs[a];
        mse += (var_a + gap * gap) * probs[a];
    }
    WdeStatistics out;
    out.bias = bias;
    out.variance = second - first * first;
    out.mse = mse;
    out.argmax_probs.assign(probs.begin(), probs.end());

    // The two routes to the MSE must agree.
    const double alt = out.variance + out.bias * out.bias;
    const double tol = 1e-12 * std::max({1.0, std::abs(out.mse), first * first});
    if (std::abs(out.mse - alt) > tol)
        throw std::logic_error("wde_statistics: mse != variance + bias^2");
    return out;
}

double wde_mse_2gauss(const GaussianSpec& spec, int n, int n1) {
    if (spec.arm_count() != 2)
        throw UnsupportedDimension("wde_mse_2gauss: closed form requires m=2");
    if (spec.stds[0] != spec.stds[1])
        throw UnsupportedDimension("wde_mse_2gauss: requires equal stds (use wde_statistics)");
    if (n1 < 1 || n1 > n - 1)
        throw InvalidParameter("wde_mse_2gauss: n1 must lie in [1, N-1]");
    const double sigma = spec.stds[0];
    const double delta = std::abs(spec.means[0] - spec.means[1]);
    const double phi = normal_cdf(delta * std::sqrt(static_cast<double>(n1)) /
                                  (std::sqrt(2.0) * sigma));
    return sigma * sigma / static_cast<double>(n - n1) + delta * delta * (1.0 - phi);
}

double wde_mse_derivative(const GaussianSpec& spec, int n, double n1) {
    if (spec.arm_count() != 2)
        throw UnsupportedDimension("wde_mse_derivative: requires m=2");
    if (spec.stds[0] != spec.stds[1])
        throw UnsupportedDimension("wde_mse_derivative: requires equal stds");
    if (!(n1 > 0.0 && n1 < static_cast<double>(n)))
        throw InvalidParameter("wde_mse_derivative: n1 must lie in (0, N)");
    const double sigma = spec.stds[0];
    const double delta = std::abs(spec.means[0] - spec.means[1]);
    const double rest = static_cast<double>(n) - n1;
    const double pole = sigma * sigma / (rest * rest);
    const double bump = delta * delta * delta /
                        (4.0 * sigma * std::sqrt(M_PI * n1)) *
                        std::exp(-0.25 * delta * delta * n1 / (sigma * sigma));
    return pole - bump;
}

SplitCurve optimal_split(const GaussianSpec& spec, int n, ProbSource source,
                         const McOptions& mc) {
    if (n < 4) throw InvalidParameter("optimal_split: N must be >= 4");
    if (source == ProbSource::ClosedForm && spec.arm_count() != 2)
        throw UnsupportedDimension("optimal_split: closed-form probabilities require m=2");
    SplitCurve curve;
    curve.n = n;
    Rng root(mc.seed);
    for (int n1 = 1; n1 <= n - 1; ++n1) {
        std::vector<double> probs;
        if (source == ProbSource::ClosedForm) {
            auto p = argmax_probability_2gauss(spec, n1);
            probs.assign(p.begin(), p.end());
        } else {
            probs = argmax_probability_mc(spec, n1, mc.trials,
                                          root.child(static_cast<std::uint64_t>(n1)))
                        .probs;
        }
        const double mse = wde_statistics(spec, n, n1, probs).mse;
        curve.n1_grid.push_back(n1);
        curve.mse.push_back(mse);
    }
    curve.n1_star = curve.n1_grid.front();
    double best = curve.mse.front();
    for (std::size_t i = 1; i < curve.mse.size(); ++i) {
        if (curve.mse[i] < best) {  // strict: ties keep the smaller n1
            best = curve.mse[i];
            curve.n1_star = curve.n1_grid[i];
        }
    }
    return curve;
}

namespace {

struct TrialPlan {
    EstimatorKind kind;
    int n;
    std::vector<std::size_t> index_indices;  // WeightedDouble / Double
    std::vector<std::size_t> mean_indices;
    std::size_t ensemble_k = 0;
};

TrialPlan make_plan(EstimatorKind kind, int n, int param) {
    TrialPlan plan;
    plan.kind = kind;
    plan.n = n;
    switch (kind) {
        case EstimatorKind::Single:
            break;
        case EstimatorKind::Double: {
            if (n % 2 != 0)
                throw InvalidParameter("monte_carlo_estimator_stats: Double needs even N");
            for (int i = 0; i < n / 2; ++i) plan.index_indices.push_back(i);
            for (int i = n / 2; i < n; ++i) plan.mean_indices.push_back(i);
            break;
        }
        case EstimatorKind::WeightedDouble: {
            if (param < 1 || param > n - 1)
                throw InvalidParameter("monte_carlo_estimator_stats: n1 must lie in [1, N-1]");
            for (int i = 0; i < param; ++i) plan.index_indices.push_back(i);
            for (int i = param; i < n; ++i) plan.mean_indices.push_back(i);
            break;
        }
        case EstimatorKind::Ensemble: {
            if (param < 2 || n % param != 0)
                throw InvalidParameter("monte_carlo_estimator_stats: K must be >= 2 and divide N");
            plan.ensemble_k = static_cast<std::size_t>(param);
            break;
        }
    }
    return plan;
}

double run_trial(const TrialPlan& plan, const GaussianSpec& spec, Rng& rng,
                 const Partition* partition) {
    SampleSet samples = sample_gaussian_set(rng, spec.means, spec.stds,
                                            static_cast<std::size_t>(plan.n));
    switch (plan.kind) {
        case EstimatorKind::Single:
            return single_estimator(samples).estimate;
        case EstimatorKind::Double:
        case EstimatorKind::WeightedDouble:
            return weighted_double_estimator(samples, plan.index_indices, plan.mean_indices)
                .estimate;
        case EstimatorKind::Ensemble:
            return ensemble_estimator(samples, *partition, 0).estimate;
    }
    return 0.0;  // unreachable
}

}  // namespace

McEstimatorStats monte_carlo_estimator_stats(const GaussianSpec& spec, EstimatorKind kind,
                                             int n, int param, long trials, const Rng& rng,
                                             int jobs) {
    if (trials < 1) throw InvalidParameter("monte_carlo_estimator_stats: trials must be >= 1");
    const TrialPlan plan = make_plan(kind, n, param);

    // Contiguous K-way partition; any fixed split is valid for i.i.d. draws.
    std::unique_ptr<Partition> partition;
    if (kind == EstimatorKind::Ensemble) {
        std::vector<std::vector<std::size_t>> subsets(plan.ensemble_k);
        const std::size_t each = static_cast<std::size_t>(n) / plan.ensemble_k;
        for (std::size_t k = 0; k < plan.ensemble_k; ++k)
            for (std::size_t i = 0; i < each; ++i) subsets[k].push_back(k * each + i);
        partition = std::make_unique<Partition>(std::move(subsets), static_cast<std::size_t>(n));
    }

    const double mu_star = spec.max_mean();

    // Trials are split into fixed-size blocks, one child stream per block;
    // the reduction runs in block order, so the result does not depend on
    // how many workers execute the blocks.
    constexpr long kBlock = 16384;
    const long n_blocks = (trials + kBlock - 1) / kBlock;
    struct Partial {
        double s1 = 0.0, s2 = 0.0, s4 = 0.0;
    };
    std::vector<Partial> partials(static_cast<std::size_t>(n_blocks));

    auto run_block = [&](long b) {
        Rng block_rng = rng.child(static_cast<std::uint64_t>(b));
        const long lo = b * kBlock;
        const long hi = std::min(trials, lo + kBlock);
        Partial p;
        for (long t = lo; t < hi; ++t) {
            const double d = run_trial(plan, spec, block_rng, partition.get()) - mu_star;
            const double d2 = d * d;
            p.s1 += d;
            p.s2 += d2;
            p.s4 += d2 * d2;
        }
        partials[static_cast<std::size_t>(b)] = p;
    };

    if (jobs <= 1) {
        for (long b = 0; b < n_blocks; ++b) run_block(b);
    } else {
        std::atomic<long> next{0};
        std::vector<std::thread> workers;
        const int count = std::min<long>(jobs, n_blocks);
        workers.reserve(static_cast<std::size_t>(count));
        for (int w = 0; w < count; ++w)
            workers.emplace_back([&] {
                for (long b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1))
                    run_block(b);
            });
        for (auto& w : workers) w.join();
    }

    std::vector<double> s1s, s2s, s4s;
    s1s.reserve(partials.size());
    s2s.reserve(partials.size());
    s4s.reserve(partials.size());
    for (const auto& p : partials) {
        s1s.push_back(p.s1);
        s2s.push_back(p.s2);
        s4s.push_back(p.s4);
    }
    const double t = static_cast<double>(trials);
    const double m1 = compensated_sum(s1s) / t;
    const double m2 = compensated_sum(s2s) / t;
    const double m4 = compensated_sum(s4s) / t;

    McEstimatorStats out;
    out.trials = trials;
    out.bias = m1;
    out.mse = m2;
    out.variance = m2 - m1 * m1;
    out.bias_std_error = std::sqrt(std::max(0.0, out.variance) / t);
    out.mse_std_error = std::sqrt(std::max(0.0, m4 - m2 * m2) / t);
    return out;
}

SnrReport snr_asymptote_check(int n, std::span<const double> snr_values, double sigma) {
    if (n <= 10 || n % 2 != 0)
        throw InvalidParameter("snr_asymptote_check: N must be even and > 10");
    if (!(sigma > 0.0)) throw InvalidParameter("snr_asymptote_check: sigma must be positive");
    SnrReport report;
    for (double snr : snr_values) {
        const double delta = snr * sigma / std::sqrt(static_cast<double>(n));
        GaussianSpec spec({delta, 0.0}, {sigma, sigma});
        const SplitCurve curve = optimal_split(spec, n, ProbSource::ClosedForm);
        SnrReport::Row row;
        row.snr = snr;
        row.delta = delta;
        row.n1_star = curve.n1_star;
        row.split_ratio = static_cast<double>(curve.n1_star) / static_cast<double>(n);
        report.max_split_ratio = std::max(report.max_split_ratio, row.split_ratio);
        if (curve.n1_star >= n / 2) report.all_below_half = false;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace ebql
