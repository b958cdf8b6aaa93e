#include "ebql/estimators.hpp"

#include <algorithm>
#include <vector>

#include "ebql/errors.hpp"

namespace ebql {

namespace {

// Mean of arm values at the given indices, accumulated in ascending index
// order with compensation so matched subsets reproduce identical digits.
double subset_mean(const std::vector<double>& arm, std::span<const std::size_t> indices) {
    std::vector<std::size_t> order(indices.begin(), indices.end());
    std::sort(order.begin(), order.end());
    std::vector<double> vals;
    vals.reserve(order.size());
    for (std::size_t i : order) vals.push_back(arm.at(i));
    return empirical_mean(vals);
}

// Index of the largest value, ties broken toward the lowest index.
std::size_t argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

}  // namespace

MaxMeanEstimate single_estimator(const SampleSet& samples) {
    std::vector<double> means(samples.arm_count());
    for (std::size_t a = 0; a < samples.arm_count(); ++a)
        means[a] = empirical_mean(samples.arm(a));
    const std::size_t best = argmax(means);
    return {best, means[best], samples.samples_per_arm(), 0};
}

MaxMeanEstimate double_estimator(const SampleSet& samples, const Partition& partition,
                                 std::size_t index_subset) {
    if (partition.subset_count() != 2)
        throw InvalidParameter("double_estimator: partition must have K=2");
    if (index_subset > 1)
        throw InvalidParameter("double_estimator: index_subset must be 0 or 1");
    return weighted_double_estimator(samples, partition.subset(index_subset),
                                     partition.subset(1 - index_subset));
}

MaxMeanEstimate weighted_double_estimator(const SampleSet& samples,
                                          std::span<const std::size_t> index_indices,
                                          std::span<const std::size_t> mean_indices) {
    if (index_indices.empty() || mean_indices.empty())
        throw InvalidParameter("weighted_double_estimator: both index lists must be nonempty");
    const std::size_t n = samples.samples_per_arm();
    std::vector<bool> used(n, false);
    for (std::size_t i : index_indices) {
        if (i >= n) throw InvalidParameter("weighted_double_estimator: index out of range");
        used[i] = true;
    }
    for (std::size_t i : mean_indices) {
        if (i >= n) throw InvalidParameter("weighted_double_estimator: index out of range");
        if (used[i])
            throw InvalidParameter("weighted_double_estimator: index and mean subsets overlap");
    }

    std::vector<double> phase1(samples.arm_count());
    for (std::size_t a = 0; a < samples.arm_count(); ++a)
        phase1[a] = subset_mean(samples.arm(a), index_indices);
    const std::size_t best = argmax(phase1);
    const double estimate = subset_mean(samples.arm(best), mean_indices);
    return {best, estimate, index_indices.size(), mean_indices.size()};
}

MaxMeanEstimate ensemble_estimator(const SampleSet& samples, const Partition& partition,
                                   std::size_t k_tilde) {
    const std::size_t k = partition.subset_count();
    if (k < 2) throw InvalidParameter("ensemble_estimator: K must be >= 2");
    if (k_tilde >= k) throw InvalidParameter("ensemble_estimator: k_tilde out of range");

    std::vector<double> phase1(samples.arm_count());
    for (std::size_t a = 0; a < samples.arm_count(); ++a)
        phase1[a] = subset_mean(samples.arm(a), partition.subset(k_tilde));
    std::size_t best = 0;
    for (std::size_t a = 1; a < phase1.size(); ++a)
        if (phase1[a] > phase1[best]) best = a;

    std::vector<double> other_means;
    other_means.reserve(k - 1);
    for (std::size_t j = 0; j < k; ++j)
        if (j != k_tilde) other_means.push_back(subset_mean(samples.arm(best), partition.subset(j)));
    const double estimate = compensated_sum(other_means) / static_cast<double>(k - 1);
    return {best, estimate, partition.subset_size(),
            partition.subset_size() * (k - 1)};
}

}  // namespace ebql
