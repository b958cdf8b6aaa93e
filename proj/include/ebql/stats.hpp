#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ebql/rng.hpp"

namespace ebql {

// Neumaier-compensated sum; summation order is the element order of `values`.
double compensated_sum(std::span<const double> values);

// Arithmetic mean with compensated accumulation. Empty input throws.
double empirical_mean(std::span<const double> values);

// Standard normal CDF, absolute error well below 1e-9.
double normal_cdf(double x);

// Standard normal density.
double normal_pdf(double x);

// One-sided survival function P(T > t) of Student's t with df degrees of
// freedom, via the regularized incomplete beta function.
double student_t_sf(double t, double df);

// Equal-sized i.i.d. samples for m arms.
class SampleSet {
public:
    explicit SampleSet(std::vector<std::vector<double>> per_arm);

    std::size_t arm_count() const { return samples_.size(); }
    std::size_t samples_per_arm() const { return n_; }
    const std::vector<double>& arm(std::size_t a) const { return samples_.at(a); }
    const std::vector<std::vector<double>>& arms() const { return samples_; }

private:
    std::vector<std::vector<double>> samples_;
    std::size_t n_;
};

// K equal-sized disjoint index subsets covering [0, N). The same index split
// applies to every arm of a SampleSet.
class Partition {
public:
    Partition(std::vector<std::vector<std::size_t>> subsets, std::size_t n);

    std::size_t subset_count() const { return subsets_.size(); }
    std::size_t total_indices() const { return n_; }
    std::size_t subset_size() const { return n_ / subsets_.size(); }
    const std::vector<std::size_t>& subset(std::size_t k) const { return subsets_.at(k); }

private:
    std::vector<std::vector<std::size_t>> subsets_;
    std::size_t n_;
};

// Uniformly random K-way split of [0, N), deterministic given the rng state.
Partition partition_samples(std::size_t n, std::size_t k, Rng& rng);

// Draws n Gaussian samples per arm from the given means/stds.
SampleSet sample_gaussian_set(Rng& rng, std::span<const double> means,
                              std::span<const double> stds, std::size_t n);

}  // namespace ebql
